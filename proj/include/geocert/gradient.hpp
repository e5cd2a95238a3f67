#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "geocert/model.hpp"
#include "geocert/rng.hpp"
#include "geocert/smoothing.hpp"

namespace geocert {

enum class GradientMode {
  approx,       // score-function estimator over argmax votes
  full,         // backpropagation through the Gumbel-Softmax
  finite_diff,  // central differences (test oracle)
};

GradientMode parse_gradient_mode(std::string_view name);
std::string_view to_string(GradientMode mode);

struct GradientEstimate {
  Vec vector;
  GradientMode mode = GradientMode::approx;
  std::size_t n_used = 0;
};

/// Score-function estimate of the gradient of E_k(x) = P[argmax f(x + n) = k]:
///   (1 / (N sigma^2)) * sum_i 1[argmax f(x_i) = k] (x_i - x),  x_i = x + n_i.
GradientEstimate score_gradient(const Classifier& model, std::span<const double> x, std::size_t k,
                                double sigma, std::size_t n, RngStream stream);

/// Votes and per-class score gradients from a single noise batch.
struct ScoreBatch {
  ClassCounts counts;
  std::vector<Vec> class_gradients;
  std::vector<Vec> class_stderr;  // per-coordinate standard error, diagnostic only
  Vec noise_mean;

  /// Class gradient with the batch-mean noise as baseline:
  /// (1 / (N sigma^2)) sum_i 1[class_i = c] (n_i - mean(n)). Zero when every
  /// vote agrees.
  [[nodiscard]] Vec centered_gradient(std::size_t c, double sigma) const;
};

ScoreBatch score_gradients_all(const Classifier& model, std::span<const double> x,
                               const SmoothingConfig& cfg, RngStream stream);

/// Mean Gumbel-Softmax probability of class k over cfg.n_samples noise draws.
double gumbel_expectation(const Classifier& model, std::span<const double> x, std::size_t k,
                          const SmoothingConfig& cfg, RngStream stream);

/// Exact gradient of gumbel_expectation for the same stream, via the model's
/// input gradients. Throws CapabilityError if the model has none.
GradientEstimate full_gradient(const Classifier& model, std::span<const double> x, std::size_t k,
                               const SmoothingConfig& cfg, RngStream stream);

/// Central differences of fn at x with step h.
Vec finite_difference_gradient(const std::function<double(std::span<const double>)>& fn,
                               std::span<const double> x, double h);

/// One noise batch at a probe: its certificate plus the gradient of the
/// point-estimate radius (sigma/2)(Phi^-1(E0) - Phi^-1(E1)), E0/E1 clamped.
/// In full mode E0/E1 are Gumbel-Softmax means, in approx mode vote
/// frequencies with baseline-centered score gradients. `incumbent_gradient` holds grad E_incumbent when the probe
/// abstains or predicts another class.
struct ProbeEvaluation {
  CertifyOutcome outcome;
  Vec radius_gradient;
  Vec incumbent_gradient;
  double e0_point = 0.0;
  double e1_point = 0.0;
  double point_radius = 0.0;
};

ProbeEvaluation evaluate_probe(const Classifier& model, std::span<const double> x,
                               const SmoothingConfig& cfg, GradientMode mode,
                               std::size_t incumbent_class, RngStream stream);

/// Full-mode point radius for fixed top/runner classes; the function whose
/// gradient evaluate_probe returns in full mode (finite-difference oracle).
double gumbel_point_radius(const Classifier& model, std::span<const double> x, std::size_t top,
                           std::span<const std::size_t> runner_members,
                           const SmoothingConfig& cfg, RngStream stream);

/// Ascent direction of r'(x_probe) = r2(x_probe) - |x_probe - x1|.
/// Throws DegenerateGeometry when x_probe == x1.
GradientEstimate transitive_objective_gradient(const Classifier& model, std::span<const double> x1,
                                               std::span<const double> x_probe,
                                               const SmoothingConfig& cfg, GradientMode mode,
                                               RngStream stream);

}  // namespace geocert
