#include "geocert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "geocert/errors.hpp"
#include "geocert/stats.hpp"

namespace geocert {

bool DomainBox::contains(std::span<const double> x, double tol) const {
  return std::all_of(x.begin(), x.end(), [tol](double v) { return v >= -tol && v <= 1.0 + tol; });
}

void DomainBox::clip(std::span<double> x) const {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

double cohen_radius(double e0_lower, double e1_upper, double sigma) {
  return 0.5 * sigma * (normal_quantile(e0_lower) - normal_quantile(e1_upper));
}

double single_transitive_radius(double r2, double dist) { return r2 - dist; }

namespace {

Vec unit_direction(std::span<const double> from, std::span<const double> to) {
  Vec dir = sub(to, from);
  const double len = norm(dir);
  if (!(len > 0.0)) throw DegenerateGeometry("direction between coincident points is undefined");
  for (double& v : dir) v /= len;
  return dir;
}

}  // namespace

Vec nearest_surface_point(std::span<const double> x1, std::span<const double> x2, double r2) {
  const Vec dir = unit_direction(x2, x1);
  return axpy(x2, r2, dir);
}

Vec line_point(std::span<const double> x1, std::span<const double> x2, double r_prime, double s) {
  const Vec dir = unit_direction(x2, x1);
  return axpy(x1, s * r_prime, dir);
}

std::optional<double> two_sphere_radius(double d2, double d3, double r2, double r3) {
  if (!(d2 + d3 > 0.0)) return std::nullopt;
  const double inner = (d2 * (r3 * r3 - d3 * d3) + d3 * (r2 * r2 - d2 * d2)) / (d2 + d3);
  if (!(inner >= 0.0)) return std::nullopt;
  return std::sqrt(inner);
}

double boundary_radius(std::span<const double> x1, std::span<const double> x2, double r2,
                       const DomainBox& domain) {
  const double d = distance(x1, x2);
  if (!(d > 0.0) || d > r2) return 0.0;

  const Vec nearest = nearest_surface_point(x1, x2, r2);
  double best = 0.0;
  for (std::size_t k = 0; k < domain.dimension; ++k) {
    // Off-axis separation of the centers, i.e. |x2~ - x1~| in the face plane.
    const double axial = x2[k] - x1[k];
    const double lateral = std::sqrt(std::max(0.0, d * d - axial * axial));
    for (const double z : {0.0, 1.0}) {
      const bool beyond = (z == 0.0) ? nearest[k] < 0.0 : nearest[k] > 1.0;
      const double reach = r2 * r2 - (z - x2[k]) * (z - x2[k]);
      if (!beyond || reach < 0.0) continue;
      const double ring = std::sqrt(reach) - lateral;
      const double h = z - x1[k];
      best = std::max(best, std::sqrt(h * h + ring * ring));
    }
  }
  return best;
}

double intersection_ring_radius(double center_distance, double r2, double r3) {
  const double dd = center_distance;
  if (!(std::abs(r2 - r3) < dd && dd < r2 + r3)) {
    throw DegenerateGeometry("intersection_ring_radius: spheres do not intersect in a ring");
  }
  const double a = (dd * dd + r2 * r2 - r3 * r3) / (2.0 * dd);
  return std::sqrt(std::max(0.0, r2 * r2 - a * a));
}

double hypersphere_volume(std::size_t d, double r) {
  if (d == 0) throw std::invalid_argument("hypersphere_volume: d must be positive");
  if (r < 0.0) throw std::invalid_argument("hypersphere_volume: r must be non-negative");
  if (r == 0.0) return 0.0;
  const double half = 0.5 * static_cast<double>(d);
  return std::exp(static_cast<double>(d) * std::log(r) + half * std::log(std::numbers::pi) -
                  std::lgamma(half + 1.0));
}

double hypersphere_surface(std::size_t d, double r) {
  if (d == 0) throw std::invalid_argument("hypersphere_surface: d must be positive");
  if (r < 0.0) throw std::invalid_argument("hypersphere_surface: r must be non-negative");
  if (r == 0.0) return d == 1 ? 2.0 : 0.0;
  const double half = 0.5 * static_cast<double>(d);
  return static_cast<double>(d) *
         std::exp(static_cast<double>(d - 1) * std::log(r) + half * std::log(std::numbers::pi) -
                  std::lgamma(half + 1.0));
}

}  // namespace geocert
