#include "geocert/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace geocert {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_results_csv(std::ostream& os, std::span<const CertificationReport> rows, bool timing) {
  os << kResultsHeader << '\n';
  for (const CertificationReport& r : rows) {
    os << r.instance_id << ',' << r.label << ',' << r.predicted << ',' << (r.abstained ? 1 : 0)
       << ',' << format_double(r.e0_lower) << ',' << format_double(r.e1_upper) << ','
       << format_double(r.r_cohen) << ',' << format_double(r.r_single) << ','
       << format_double(r.r_double) << ',' << format_double(r.r_boundary) << ','
       << format_double(r.r_best) << ',' << to_string(r.best_method) << ',' << r.iterations_used
       << ',' << format_double(timing ? r.wall_time_ms : 0.0) << ',' << r.seed << '\n';
  }
}

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "radius,certified_accuracy_cohen,certified_accuracy_best\n";
  for (const CurvePoint& p : curve) {
    os << format_double(p.radius) << ',' << format_double(p.fraction_cohen) << ','
       << format_double(p.fraction_best) << '\n';
  }
}

void write_improvement_csv(std::ostream& os, const ImprovementMetrics& m) {
  os << "r_center,count,median_pct_single,median_pct_double,median_pct_boundary,median_pct_best\n";
  for (const ImprovementBin& b : m.bins) {
    os << format_double(b.center) << ',' << b.count << ',' << format_double(b.median_single) << ','
       << format_double(b.median_double) << ',' << format_double(b.median_boundary) << ','
       << format_double(b.median_best) << '\n';
  }
}

void write_summary(std::ostream& os, std::span<const CertificationReport> rows,
                   const ImprovementMetrics& m) {
  std::size_t abstained = 0;
  std::size_t improved = 0;
  for (const CertificationReport& r : rows) {
    if (r.abstained) ++abstained;
    if (r.correct() && r.r_best > r.r_cohen) ++improved;
  }
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  os << "instances: " << rows.size() << '\n'
     << "abstained: " << abstained << '\n'
     << "abstention_rate: " << format_double(static_cast<double>(abstained) / n) << '\n'
     << "correct: " << m.correct << '\n'
     << "improved: " << improved << '\n'
     << "mean_improvement_pct: " << format_double(m.mean_improvement) << '\n'
     << "median_improvement_pct: " << format_double(m.median_improvement) << '\n'
     << "best_cohen: " << format_double(m.best_method.cohen) << '\n'
     << "best_single: " << format_double(m.best_method.single) << '\n'
     << "best_double: " << format_double(m.best_method.double_transitive) << '\n'
     << "best_boundary: " << format_double(m.best_method.boundary) << '\n';
}

}  // namespace geocert
