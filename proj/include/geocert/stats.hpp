#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace geocert {

// ---------------------------------------------------------------------------
// Gaussian helpers

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of the standard normal CDF, accurate to well below 1e-9 over
/// (0, 1). Throws std::domain_error outside the open interval.
double normal_quantile(double p);

/// Quantile of the chi-square distribution with `dof` degrees of freedom,
/// found by bisection on the regularized lower incomplete gamma function.
double chi_square_quantile(double p, double dof);

// ---------------------------------------------------------------------------
// Class counts

/// Per-class sample counts from N noisy evaluations. sum(counts) == total.
struct ClassCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  /// Builds and validates counts; total is the sum. Throws
  /// std::invalid_argument if fewer than two classes or no samples.
  static ClassCounts from(std::vector<std::uint64_t> counts);
};

inline constexpr std::size_t kMetaClass = std::numeric_limits<std::size_t>::max();

/// Counts after small classes were merged into one meta-class.
///
/// Surviving classes keep their relative order; the meta-class, if any, is
/// appended last. `total` is the original sample count N. The meta count is
/// raised to the threshold when its members sum to less, so sum(counts) may
/// exceed total by at most threshold - 1.
struct CoalescedCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::vector<std::size_t> source_class;  // original class, or kMetaClass
  std::vector<std::size_t> index_of;      // original class -> coalesced index
  std::vector<std::size_t> meta_members;  // original classes in the meta-class

  [[nodiscard]] bool has_meta() const { return !meta_members.empty(); }
  [[nodiscard]] std::size_t size() const { return counts.size(); }
};

CoalescedCounts coalesce_classes(const ClassCounts& counts, std::uint64_t threshold = 5);

// ---------------------------------------------------------------------------
// Goodman simultaneous intervals

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Goodman's simultaneous (1 - alpha) confidence intervals for multinomial
/// proportions. Every count must be at least 5 (run coalesce_classes first);
/// otherwise std::invalid_argument is thrown.
std::vector<Interval> goodman_bounds(std::span<const std::uint64_t> counts, std::uint64_t total,
                                     double alpha);

inline std::vector<Interval> goodman_bounds(const CoalescedCounts& c, double alpha) {
  return goodman_bounds(c.counts, c.total, alpha);
}

/// Bounds on the two largest smoothed class expectations.
struct ExpectationBounds {
  std::size_t top_class = 0;     // original class index
  std::size_t runner_class = 1;  // original class index, or kMetaClass
  double e0_lower = 0.0;
  double e1_upper = 1.0;
  double alpha = 0.001;
  double z0 = 0.0;  // raw top frequency
  double z1 = 0.0;  // raw runner-up frequency
};

// ---------------------------------------------------------------------------
// Gumbel-Softmax

/// Standard Gumbel noise -log(-log u) for u in (0, 1).
double gumbel_noise(double u);

/// softmax((logits + g) / tau) with g_i = -log(-log u_i).
/// Throws std::domain_error for tau <= 0 or u outside (0, 1).
std::vector<double> gumbel_softmax(std::span<const double> logits, double tau,
                                   std::span<const double> u);

/// In-place softmax of (logits + g) / tau into `out`; no validation.
void gumbel_softmax_into(std::span<const double> logits, double tau, std::span<const double> u,
                         std::span<double> out);

}  // namespace geocert
