#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geocert/search.hpp"

namespace geocert {

struct CurvePoint {
  double radius = 0.0;
  double fraction_cohen = 0.0;  // correct and r_cohen > radius
  double fraction_best = 0.0;   // correct and r_best > radius
};

/// Proportion of rows correctly predicted with a certified radius greater
/// than R, for each R in `grid`. Throws std::invalid_argument on empty rows.
std::vector<CurvePoint> certified_accuracy_curve(std::span<const CertificationReport> rows,
                                                 std::span<const double> grid);

/// Evenly spaced grid 0, step, 2 step, ... up to and including `max`.
std::vector<double> radius_grid(double max, double step);

struct ImprovementBin {
  double center = 0.0;
  std::size_t count = 0;
  // Median of 100 (r_method - r_cohen) / r_cohen over correct rows whose
  // r_cohen lies within the window around `center`.
  double median_single = 0.0;
  double median_double = 0.0;
  double median_boundary = 0.0;
  double median_best = 0.0;
};

struct MethodProportions {
  double cohen = 0.0;
  double single = 0.0;
  double double_transitive = 0.0;
  double boundary = 0.0;
};

struct ImprovementMetrics {
  std::vector<ImprovementBin> bins;  // empty bins omitted
  MethodProportions best_method;     // over correctly predicted rows
  std::size_t correct = 0;
  double median_improvement = 0.0;   // median % improvement of r_best, correct rows
  double mean_improvement = 0.0;
};

inline constexpr double kDefaultWindow = 0.075;

ImprovementMetrics improvement_metrics(std::span<const CertificationReport> rows,
                                       std::span<const double> centers,
                                       double window = kDefaultWindow);

double median(std::vector<double> v);

}  // namespace geocert
