#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "geocert/geometry.hpp"
#include "geocert/gradient.hpp"
#include "geocert/model.hpp"
#include "geocert/rng.hpp"
#include "geocert/smoothing.hpp"

namespace geocert {

struct SearchConfig {
  std::size_t iterations = 20;
  double gamma0 = 0.01;
  std::size_t s_grid = 11;
  GradientMode mode = GradientMode::approx;
  std::size_t search_n_samples = 1000;
  std::size_t final_n_samples = 1000;
  bool enable_double = true;
  bool enable_boundary = true;
  std::size_t golden_iterations = 8;
  double max_step = 0.25;

  /// Throws ConfigError unless gamma0 > 0, s_grid >= 5, max_step > 0,
  /// both sample counts >= 100 and mode is approx or full.
  void validate() const;
};

enum class Method { cohen, single, double_transitive, boundary };

std::string_view to_string(Method m);

struct IteratePair {
  Vec point;
  Vec gradient;
};

/// Barzilai-Borwein step |dx.dg| / (dg.dg), gamma0 on the first iteration or
/// when dg.dg < 1e-12 or the quotient is not finite; clipped to [1e-6, 1].
double bb_step(const std::optional<IteratePair>& prev, const IteratePair& cur, double gamma0);

/// One evaluation of the search objective at a probe. `ascent` is the
/// direction of the step: the objective gradient when on_class, otherwise the
/// direction that leads back into the instance's class region.
struct ProbeStep {
  bool on_class = false;
  double value = 0.0;
  Vec ascent;
};

class ProbeObjective {
 public:
  virtual ~ProbeObjective() = default;
  virtual ProbeStep evaluate(std::span<const double> probe, std::size_t iteration) = 0;
};

struct AscentOptions {
  std::size_t iterations = 20;
  double gamma0 = 0.01;
  double max_step = 0.25;
  std::optional<DomainBox> domain;
  double incumbent_value = -std::numeric_limits<double>::infinity();
};

struct AscentResult {
  Vec best_point;
  double best_value = -std::numeric_limits<double>::infinity();
  bool improved = false;  // some on-class probe beat incumbent_value
  std::size_t iterations_used = 0;
  std::vector<double> values;  // objective per iteration (-inf off class)
};

/// Gradient ascent with Barzilai-Borwein steps x <- x + gamma * ascent, the
/// step length capped at max_step and the probe clipped to the domain. BB
/// history is reset whenever the on_class branch changes; a vanishing ascent
/// direction is replaced by a random unit step of length gamma0.
AscentResult bubble_ascent(ProbeObjective& objective, std::span<const double> start,
                           const AscentOptions& opts, RngStream stream);

struct SingleResult {
  double r_single = 0.0;  // search-time value of r2 - |x2 - x|
  Vec x2;
  bool moved = false;
  std::size_t iterations_used = 0;
};

/// Single-transitivity search from x for class `cls`, whose Cohen radius is
/// r_cohen. Probes are certified with search_n_samples.
SingleResult single_bubble_loop(const Classifier& model, std::span<const double> x, std::size_t cls,
                                double r_cohen, const SmoothingConfig& smoothing,
                                const SearchConfig& cfg, RngStream stream);

struct ProbeCertificate {
  std::size_t class_label = 0;
  double radius = 0.0;
  bool abstained = true;
};

/// Certifies a probe; the second argument numbers the evaluations so that
/// each can draw its own noise.
using ProbeCertifier = std::function<ProbeCertificate(std::span<const double>, std::size_t)>;

/// Two-sphere certificate from balls (x2, r2) and (x3, r3) around x1, when the
/// three centers are collinear with x1 between them and the intersection ring
/// is the nearest part of the union boundary; nullopt otherwise.
std::optional<double> double_candidate(double d2, double r2, double d3, double r3);

struct DoubleResult {
  double r_double = 0.0;
  std::optional<Vec> x3;
  double r3 = 0.0;
  std::size_t evaluations = 0;
};

/// Places x3 on the line x1 + s r' (x1 - x2)/|x1 - x2|, s over a uniform grid
/// on (0, 1] followed by golden-section refinement around the best grid
/// point. Returns r_prime when no placement is valid.
DoubleResult double_transitive_search(const ProbeCertifier& certifier, std::span<const double> x1,
                                      std::span<const double> x2, double r_prime, std::size_t cls,
                                      const SearchConfig& cfg);

struct CertificationReport {
  std::uint64_t instance_id = 0;
  std::size_t label = 0;
  std::size_t predicted = 0;
  bool abstained = true;
  double e0_lower = 0.0;
  double e1_upper = 0.0;
  double r_cohen = 0.0;
  double r_single = 0.0;
  double r_double = 0.0;
  double r_boundary = 0.0;
  double r_best = 0.0;
  Method best_method = Method::cohen;
  std::optional<Vec> x2_found;
  std::optional<Vec> x3_found;
  std::size_t iterations_used = 0;
  double wall_time_ms = 0.0;
  double single_ms = 0.0;
  double double_ms = 0.0;
  std::uint64_t seed = 0;

  [[nodiscard]] bool correct() const { return !abstained && predicted == label; }
};

/// Cohen certification of x followed by single transitivity, double
/// transitivity and boundary treatment. Winning probes are re-certified with
/// final_n_samples fresh draws. Throws InvariantViolation if r_best < r_cohen.
CertificationReport certify_geometric(const Classifier& model, std::span<const double> x,
                                      std::size_t label, const SmoothingConfig& smoothing,
                                      const SearchConfig& cfg, RngStream stream);

}  // namespace geocert
