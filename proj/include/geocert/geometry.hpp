#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "geocert/vec.hpp"

namespace geocert {

/// A certified L2 ball: every point within `radius` of `center` receives
/// `class_label` from the smoothed classifier.
struct CertifiedBall {
  Vec center;
  double radius = 0.0;
  std::size_t class_label = 0;
};

/// The unit hypercube [0, 1]^d the inputs live in.
struct DomainBox {
  std::size_t dimension = 1;

  [[nodiscard]] bool contains(std::span<const double> x, double tol = 0.0) const;
  void clip(std::span<double> x) const;
};

/// (sigma / 2) * (Phi^-1(e0_lower) - Phi^-1(e1_upper)). Non-positive values
/// mean "abstain"; the caller decides.
double cohen_radius(double e0_lower, double e1_upper, double sigma);

/// Certificate at x1 inherited from an enclosing ball of radius r2 whose
/// center is `dist` away: r2 - dist. May be negative.
double single_transitive_radius(double r2, double dist);

/// Point of the sphere S(x2, r2) closest to x1, for x1 inside the ball.
/// Throws DegenerateGeometry when x1 == x2.
Vec nearest_surface_point(std::span<const double> x1, std::span<const double> x2, double r2);

/// x1 + s * r_prime * (x1 - x2) / |x1 - x2|, the placement line for a third
/// ball. Throws DegenerateGeometry when x1 == x2.
Vec line_point(std::span<const double> x1, std::span<const double> x2, double r_prime, double s);

/// Distance from x1 to the intersection of two spheres centered on opposite
/// sides of x1 along one line, at distances d2 and d3 with radii r2 and r3.
/// Returns nullopt when the configuration has no real intersection.
std::optional<double> two_sphere_radius(double d2, double d3, double r2, double r3);

/// Certificate from the part of ball (x2, r2) that leaves the unit box:
/// the largest distance from x1 to a face/sphere intersection ring, over
/// faces that the unconstrained nearest surface point lies beyond. Returns 0
/// when no face qualifies.
double boundary_radius(std::span<const double> x1, std::span<const double> x2, double r2,
                       const DomainBox& domain);

/// Radius of the circle (in general, the (d-2)-sphere) where two spheres
/// with centers D apart intersect. Throws DegenerateGeometry when they do not.
double intersection_ring_radius(double center_distance, double r2, double r3);

double hypersphere_volume(std::size_t d, double r);
double hypersphere_surface(std::size_t d, double r);

}  // namespace geocert
