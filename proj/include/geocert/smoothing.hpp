#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "geocert/model.hpp"
#include "geocert/rng.hpp"
#include "geocert/stats.hpp"

namespace geocert {

/// How a noisy forward pass is turned into a class vote.
enum class SamplingMode {
  argmax,  // argmax of the logits
  gumbel,  // argmax of the Gumbel-Softmax output (a Gumbel-max sample)
};

SamplingMode parse_sampling_mode(std::string_view name);
std::string_view to_string(SamplingMode mode);

struct SmoothingConfig {
  double sigma = 0.5;
  std::size_t n_samples = 1000;
  double alpha = 0.001;
  double tau = 1.0;
  SamplingMode mode = SamplingMode::argmax;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless sigma > 0, n_samples >= 100, alpha in (0,1)
  /// and tau > 0.
  void validate() const;
};

/// Draws are generated in fixed chunks, each from its own child stream, so
/// the noise of draw j depends only on (stream, j).
inline constexpr std::size_t kNoiseChunk = 256;

struct NoisySample {
  std::size_t index = 0;
  std::span<const double> noise;     // n_j ~ N(0, sigma^2 I)
  std::span<const double> point;     // x + n_j
  std::span<const double> logits;    // f(x + n_j)
  std::span<const double> uniforms;  // Gumbel uniforms; empty unless requested
};

/// Calls fn(const NoisySample&) for j = 0..n-1 in order. Gaussian noise and
/// Gumbel uniforms come from separate substreams, so requesting uniforms does
/// not change the noise.
template <class Fn>
void visit_noisy_samples(const Classifier& model, std::span<const double> x, double sigma,
                         std::size_t n, bool with_uniforms, RngStream stream, Fn&& fn) {
  const std::size_t d = x.size();
  const std::size_t k = model.num_classes();
  Vec noise(d), point(d), logits(k), uniforms(with_uniforms ? k : 0);
  std::normal_distribution<double> gauss(0.0, sigma);

  for (std::size_t chunk = 0; chunk * kNoiseChunk < n; ++chunk) {
    const RngStream cs = stream.child(chunk);
    auto noise_eng = cs.child(0).engine();
    auto unif_eng = cs.child(1).engine();
    gauss.reset();
    const std::size_t stop = std::min(n, (chunk + 1) * kNoiseChunk);
    for (std::size_t j = chunk * kNoiseChunk; j < stop; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        noise[i] = gauss(noise_eng);
        point[i] = x[i] + noise[i];
      }
      for (double& u : uniforms) u = open_unit(unif_eng);
      model.logits(point, logits);
      fn(NoisySample{j, noise, point, logits, uniforms});
    }
  }
}

/// Class vote of one noisy sample under `mode`.
std::size_t vote(const NoisySample& s, SamplingMode mode);

struct SampleSummary {
  ClassCounts counts;
  Vec soft_mean;  // mean Gumbel-Softmax output; gumbel mode only
};

/// N noisy votes around x (and, in gumbel mode, the mean soft vector).
SampleSummary sample_expectations(const Classifier& model, std::span<const double> x,
                                  const SmoothingConfig& cfg, RngStream stream);

struct CertifyOutcome {
  ExpectationBounds bounds;
  double radius = 0.0;
  bool abstained = true;
  std::uint64_t n_samples = 0;
  ClassCounts counts;
  std::vector<std::size_t> runner_members;  // original classes behind bounds.runner_class

  [[nodiscard]] std::size_t predicted() const { return bounds.top_class; }
};

/// Certification from raw counts: coalesce, Goodman bounds, top-two
/// selection on counts, clamp into [1/(2N), 1 - 1/(2N)], Cohen radius.
CertifyOutcome certify_counts(const ClassCounts& counts, double sigma, double alpha);

/// Sample N votes around x and certify them.
CertifyOutcome certify(const Classifier& model, std::span<const double> x,
                       const SmoothingConfig& cfg, RngStream stream);

/// Clamp of an expectation estimate into [1/(2N), 1 - 1/(2N)].
double clamp_expectation(double e, std::uint64_t n);

}  // namespace geocert
