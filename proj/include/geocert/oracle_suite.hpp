#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geocert {

struct OracleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Formula-versus-oracle checks behind `geocert oracle-check`.
std::vector<OracleCheck> run_oracle_checks();

/// Prints one line per check and returns true when all pass.
bool print_oracle_table(std::ostream& os, const std::vector<OracleCheck>& checks);

}  // namespace geocert
