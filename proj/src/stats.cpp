#include "geocert/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace geocert {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Acklam's rational approximation; relative error about 1e-9 before the
// Halley correction in normal_quantile.
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  constexpr double p_high = 1.0 - p_low;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= p_high) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1), got " + std::to_string(p));
  }
  double x = acklam(p);
  // Halley refinement. In the upper tail the residual is taken against the
  // complementary CDF to avoid cancellation in 1 - p.
  for (int iter = 0; iter < 2; ++iter) {
    const double e = (p > 0.5) ? (0.5 * std::erfc(x / std::sqrt(2.0)) - (1.0 - p)) * -1.0
                               : normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double chi_square_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("chi_square_quantile: p must lie in (0, 1)");
  if (!(dof > 0.0)) throw std::domain_error("chi_square_quantile: dof must be positive");

  const auto cdf = [dof](double x) { return boost::math::gamma_p(0.5 * dof, 0.5 * x); };
  double lo = 0.0;
  double hi = std::max(1.0, dof);
  while (cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ClassCounts ClassCounts::from(std::vector<std::uint64_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("ClassCounts: need at least two classes");
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw std::invalid_argument("ClassCounts: total must be positive");
  return ClassCounts{std::move(counts), total};
}

CoalescedCounts coalesce_classes(const ClassCounts& in, std::uint64_t threshold) {
  CoalescedCounts out;
  out.total = in.total;
  out.index_of.assign(in.counts.size(), 0);

  std::uint64_t small_sum = 0;
  for (std::size_t j = 0; j < in.counts.size(); ++j) {
    if (in.counts[j] >= threshold) {
      out.index_of[j] = out.counts.size();
      out.counts.push_back(in.counts[j]);
      out.source_class.push_back(j);
    } else {
      out.meta_members.push_back(j);
      small_sum += in.counts[j];
    }
  }
  if (out.has_meta()) {
    const std::size_t meta = out.counts.size();
    for (std::size_t j : out.meta_members) out.index_of[j] = meta;
    out.counts.push_back(std::max(threshold, small_sum));
    out.source_class.push_back(kMetaClass);
  }
  return out;
}

std::vector<Interval> goodman_bounds(std::span<const std::uint64_t> counts, std::uint64_t total,
                                     double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("goodman_bounds: alpha must lie in (0, 1)");
  if (counts.size() < 2) throw std::invalid_argument("goodman_bounds: need at least two classes");
  if (total == 0) throw std::invalid_argument("goodman_bounds: total must be positive");
  for (std::uint64_t y : counts) {
    if (y < 5) {
      throw std::invalid_argument(
          "goodman_bounds: every class count must be at least 5; coalesce small classes first");
    }
  }

  const double k = static_cast<double>(counts.size());
  const double a = chi_square_quantile(1.0 - alpha / k, 1.0);
  const double n = static_cast<double>(total);

  std::vector<Interval> out;
  out.reserve(counts.size());
  for (std::uint64_t yi : counts) {
    const double y = std::min(static_cast<double>(yi), n);
    const double root = std::sqrt(a * (a + 4.0 * y * (n - y) / n));
    const double denom = 2.0 * (n + a);
    out.push_back({std::clamp((a + 2.0 * y - root) / denom, 0.0, 1.0),
                   std::clamp((a + 2.0 * y + root) / denom, 0.0, 1.0)});
  }
  return out;
}

double gumbel_noise(double u) { return -std::log(-std::log(u)); }

void gumbel_softmax_into(std::span<const double> logits, double tau, std::span<const double> u,
                         std::span<double> out) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = (logits[i] + gumbel_noise(u[i])) / tau;
    peak = std::max(peak, out[i]);
  }
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : out) v /= sum;
}

std::vector<double> gumbel_softmax(std::span<const double> logits, double tau,
                                   std::span<const double> u) {
  if (!(tau > 0.0)) throw std::domain_error("gumbel_softmax: tau must be positive");
  if (u.size() != logits.size()) throw std::invalid_argument("gumbel_softmax: size mismatch");
  for (double ui : u) {
    if (!(ui > 0.0 && ui < 1.0)) throw std::domain_error("gumbel_softmax: u must lie in (0, 1)");
  }
  std::vector<double> out(logits.size());
  gumbel_softmax_into(logits, tau, u, out);
  return out;
}

}  // namespace geocert
