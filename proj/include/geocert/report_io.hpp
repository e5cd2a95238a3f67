#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "geocert/metrics.hpp"
#include "geocert/search.hpp"

namespace geocert {

/// Column order of results.csv; bump kResultsSchemaVersion on any change.
inline constexpr std::string_view kResultsHeader =
    "instance_id,label,predicted,abstained,e0_lower,e1_upper,r_cohen,r_single,r_double,"
    "r_boundary,r_best,best_method,iterations,wall_time_ms,seed";
inline constexpr int kResultsSchemaVersion = 1;

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Writes header and one row per report. wall_time_ms is written as 0 unless
/// `timing` is set, so that reruns are byte-identical.
void write_results_csv(std::ostream& os, std::span<const CertificationReport> rows, bool timing);

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve);
void write_improvement_csv(std::ostream& os, const ImprovementMetrics& m);

/// Human-readable counts, abstention rate and improvement summary.
void write_summary(std::ostream& os, std::span<const CertificationReport> rows,
                   const ImprovementMetrics& m);

}  // namespace geocert
