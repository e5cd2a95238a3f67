#include "geocert/smoothing.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "geocert/errors.hpp"
#include "geocert/geometry.hpp"

namespace geocert {

SamplingMode parse_sampling_mode(std::string_view name) {
  if (name == "argmax") return SamplingMode::argmax;
  if (name == "gumbel") return SamplingMode::gumbel;
  throw ConfigError("unknown sampling mode '" + std::string(name) + "' (expected argmax or gumbel)");
}

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::argmax ? "argmax" : "gumbel";
}

void SmoothingConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("smoothing: sigma must be positive");
  if (n_samples < 100) throw ConfigError("smoothing: n_samples must be at least 100");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("smoothing: alpha must lie in (0, 1)");
  if (!(tau > 0.0)) throw ConfigError("smoothing: tau must be positive");
}

std::size_t vote(const NoisySample& s, SamplingMode mode) {
  if (mode == SamplingMode::argmax) return argmax(s.logits);
  std::size_t best = 0;
  double best_v = s.logits[0] + gumbel_noise(s.uniforms[0]);
  for (std::size_t k = 1; k < s.logits.size(); ++k) {
    const double v = s.logits[k] + gumbel_noise(s.uniforms[k]);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

SampleSummary sample_expectations(const Classifier& model, std::span<const double> x,
                                  const SmoothingConfig& cfg, RngStream stream) {
  const std::size_t k = model.num_classes();
  std::vector<std::uint64_t> counts(k, 0);
  const bool gumbel = cfg.mode == SamplingMode::gumbel;
  Vec soft_mean(gumbel ? k : 0, 0.0);
  Vec soft(k);

  visit_noisy_samples(model, x, cfg.sigma, cfg.n_samples, gumbel, stream,
                      [&](const NoisySample& s) {
                        ++counts[vote(s, cfg.mode)];
                        if (gumbel) {
                          gumbel_softmax_into(s.logits, cfg.tau, s.uniforms, soft);
                          for (std::size_t c = 0; c < k; ++c) soft_mean[c] += soft[c];
                        }
                      });
  for (double& v : soft_mean) v /= static_cast<double>(cfg.n_samples);
  return SampleSummary{ClassCounts::from(std::move(counts)), std::move(soft_mean)};
}

double clamp_expectation(double e, std::uint64_t n) {
  const double half = 0.5 / static_cast<double>(n);
  return std::clamp(e, half, 1.0 - half);
}

CertifyOutcome certify_counts(const ClassCounts& counts, double sigma, double alpha) {
  CertifyOutcome out;
  out.counts = counts;
  out.n_samples = counts.total;
  out.bounds.alpha = alpha;

  const double n = static_cast<double>(counts.total);
  const CoalescedCounts c = coalesce_classes(counts);

  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c.counts[a] > c.counts[b]; });

  const auto raw_top = static_cast<std::size_t>(
      std::max_element(counts.counts.begin(), counts.counts.end()) - counts.counts.begin());
  if (c.size() < 2 || c.source_class[order[0]] == kMetaClass) {
    out.bounds.top_class = raw_top;
    out.bounds.runner_class = kMetaClass;
    out.bounds.z0 = static_cast<double>(counts.counts[raw_top]) / n;
    out.bounds.e0_lower = 0.0;
    out.bounds.e1_upper = 1.0;
    out.radius = 0.0;
    out.abstained = true;
    return out;
  }

  const std::size_t top = order[0];
  const std::size_t runner = order[1];
  const std::vector<Interval> iv = goodman_bounds(c, alpha);

  out.bounds.top_class = c.source_class[top];
  out.bounds.runner_class = c.source_class[runner];
  out.runner_members = c.source_class[runner] == kMetaClass
                           ? c.meta_members
                           : std::vector<std::size_t>{c.source_class[runner]};
  out.bounds.z0 = static_cast<double>(c.counts[top]) / n;
  out.bounds.z1 = static_cast<double>(c.counts[runner]) / n;
  out.bounds.e0_lower = clamp_expectation(iv[top].lower, counts.total);
  out.bounds.e1_upper = clamp_expectation(iv[runner].upper, counts.total);
  out.radius = cohen_radius(out.bounds.e0_lower, out.bounds.e1_upper, sigma);
  out.abstained = !(out.radius > 0.0);
  return out;
}

CertifyOutcome certify(const Classifier& model, std::span<const double> x,
                       const SmoothingConfig& cfg, RngStream stream) {
  cfg.validate();
  if (x.size() != model.input_dim()) {
    throw std::invalid_argument("certify: point dimension does not match the model");
  }
  const SampleSummary s = sample_expectations(model, x, cfg, stream);
  return certify_counts(s.counts, cfg.sigma, cfg.alpha);
}

}  // namespace geocert
