#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "geocert/geometry.hpp"
#include "geocert/model.hpp"
#include "geocert/rng.hpp"

namespace geocert {

struct LinearModel {
  Vec w;
  double b = 0.0;
};

/// Binary classifier with logits (z/2, -z/2), z = w.x + b: class 0 iff z >= 0.
class LinearClassifier final : public Classifier {
 public:
  explicit LinearClassifier(LinearModel m);
  std::size_t input_dim() const override { return m_.w.size(); }
  std::size_t num_classes() const override { return 2; }
  void logits(std::span<const double> x, std::span<double> out) const override;
  bool has_input_gradient() const override { return true; }
  void input_gradient(std::span<const double> x, std::span<const double> seed,
                      std::span<double> out) const override;
  const LinearModel& params() const { return m_; }

 private:
  LinearModel m_;
};

/// Predicts one class everywhere.
class ConstantClassifier final : public Classifier {
 public:
  ConstantClassifier(std::size_t dim, std::size_t classes, std::size_t cls);
  std::size_t input_dim() const override { return dim_; }
  std::size_t num_classes() const override { return classes_; }
  void logits(std::span<const double> x, std::span<double> out) const override;
  bool has_input_gradient() const override { return true; }
  void input_gradient(std::span<const double> x, std::span<const double> seed,
                      std::span<double> out) const override;

 private:
  std::size_t dim_;
  std::size_t classes_;
  std::size_t cls_;
};

/// One-dimensional: class 0 iff x < t, class 1 otherwise.
class ThresholdClassifier final : public Classifier {
 public:
  explicit ThresholdClassifier(double t) : t_(t) {}
  std::size_t input_dim() const override { return 1; }
  std::size_t num_classes() const override { return 2; }
  void logits(std::span<const double> x, std::span<double> out) const override;

 private:
  double t_;
};

/// Phi((w.x + b) / (sigma |w|)): exact probability of class 0 under noise.
double linear_expectation_exact(const LinearModel& m, std::span<const double> x, double sigma);

/// |w.x + b| / |w|.
double linear_certified_radius_exact(const LinearModel& m, std::span<const double> x);

/// Brute-force distance from x1 to the boundary of the union of `balls`,
/// restricted to the domain box when given (box faces are not boundary; only
/// sphere points inside the box count). Sphere surfaces are sampled with
/// `resolution` points in total, then the best candidates are refined
/// locally. Supports d = 2 and d = 3.
double union_boundary_distance(std::span<const double> x1, std::span<const CertifiedBall> balls,
                               const std::optional<DomainBox>& domain, std::size_t resolution);

/// Fraction of `trials` multinomial draws whose Goodman intervals (after
/// coalescing, meta-class truth = sum of member probabilities) all contain
/// the true probabilities.
double multinomial_coverage_sim(std::span<const double> p, std::uint64_t n, double alpha,
                                std::size_t trials, RngStream stream);

}  // namespace geocert
