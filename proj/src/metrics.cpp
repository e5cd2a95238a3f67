#include "geocert/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geocert {

namespace {

void require_rows(std::span<const CertificationReport> rows) {
  if (rows.empty()) throw std::invalid_argument("metrics: no rows");
}

double percent_gain(double r, double base) { return 100.0 * (r - base) / base; }

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::vector<double> radius_grid(double max, double step) {
  if (!(step > 0.0) || !(max >= 0.0)) throw std::invalid_argument("radius_grid: bad step or max");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor(max / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) * step);
  return out;
}

std::vector<CurvePoint> certified_accuracy_curve(std::span<const CertificationReport> rows,
                                                 std::span<const double> grid) {
  require_rows(rows);
  const double n = static_cast<double>(rows.size());
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double r : grid) {
    std::size_t cohen = 0;
    std::size_t best = 0;
    for (const CertificationReport& row : rows) {
      if (!row.correct()) continue;
      if (row.r_cohen > r) ++cohen;
      if (row.r_best > r) ++best;
    }
    out.push_back(CurvePoint{r, static_cast<double>(cohen) / n, static_cast<double>(best) / n});
  }
  return out;
}

ImprovementMetrics improvement_metrics(std::span<const CertificationReport> rows,
                                       std::span<const double> centers, double window) {
  require_rows(rows);
  if (!(window > 0.0)) throw std::invalid_argument("improvement_metrics: window must be positive");
  ImprovementMetrics out;

  std::vector<double> gains;
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const CertificationReport& row : rows) {
    if (!row.correct()) continue;
    ++out.correct;
    ++counts[static_cast<int>(row.best_method)];
    gains.push_back(percent_gain(row.r_best, row.r_cohen));
  }
  if (out.correct > 0) {
    const double c = static_cast<double>(out.correct);
    out.best_method = MethodProportions{counts[0] / c, counts[1] / c, counts[2] / c, counts[3] / c};
    double sum = 0.0;
    for (double g : gains) sum += g;
    out.mean_improvement = sum / c;
    out.median_improvement = median(gains);
  }

  for (double center : centers) {
    std::vector<double> single, dbl, boundary, best;
    for (const CertificationReport& row : rows) {
      if (!row.correct() || std::abs(row.r_cohen - center) > window) continue;
      single.push_back(percent_gain(row.r_single, row.r_cohen));
      dbl.push_back(percent_gain(row.r_double, row.r_cohen));
      boundary.push_back(percent_gain(row.r_boundary, row.r_cohen));
      best.push_back(percent_gain(row.r_best, row.r_cohen));
    }
    if (best.empty()) continue;
    out.bins.push_back(ImprovementBin{center, best.size(), median(single), median(dbl),
                                      median(boundary), median(best)});
  }
  return out;
}

}  // namespace geocert
