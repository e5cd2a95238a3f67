#include "geocert/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geocert/errors.hpp"
#include "geocert/stats.hpp"

namespace geocert {

GradientMode parse_gradient_mode(std::string_view name) {
  if (name == "approx") return GradientMode::approx;
  if (name == "full") return GradientMode::full;
  throw ConfigError("unknown gradient mode '" + std::string(name) + "' (expected approx or full)");
}

std::string_view to_string(GradientMode mode) {
  switch (mode) {
    case GradientMode::approx:
      return "approx";
    case GradientMode::full:
      return "full";
    case GradientMode::finite_diff:
      return "finite_diff";
  }
  return "?";
}

ScoreBatch score_gradients_all(const Classifier& model, std::span<const double> x,
                               const SmoothingConfig& cfg, RngStream stream) {
  const std::size_t d = x.size();
  const std::size_t k = model.num_classes();
  std::vector<std::uint64_t> counts(k, 0);
  std::vector<Vec> sums(k, Vec(d, 0.0));
  std::vector<Vec> squares(k, Vec(d, 0.0));
  const bool gumbel = cfg.mode == SamplingMode::gumbel;

  visit_noisy_samples(model, x, cfg.sigma, cfg.n_samples, gumbel, stream,
                      [&](const NoisySample& s) {
                        const std::size_t c = vote(s, cfg.mode);
                        ++counts[c];
                        for (std::size_t i = 0; i < d; ++i) {
                          sums[c][i] += s.noise[i];
                          squares[c][i] += s.noise[i] * s.noise[i];
                        }
                      });

  const double n = static_cast<double>(cfg.n_samples);
  const double s2 = cfg.sigma * cfg.sigma;
  ScoreBatch out{ClassCounts::from(std::move(counts)), std::vector<Vec>(k, Vec(d)),
                 std::vector<Vec>(k, Vec(d)), Vec(d, 0.0)};
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < d; ++i) out.noise_mean[i] += sums[c][i] / n;
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      const double mean = sums[c][i] / (n * s2);
      const double second = squares[c][i] / (n * s2 * s2);
      out.class_gradients[c][i] = mean;
      out.class_stderr[c][i] = std::sqrt(std::max(0.0, second - mean * mean) / n);
    }
  }
  return out;
}

Vec ScoreBatch::centered_gradient(std::size_t c, double sigma) const {
  const double share =
      static_cast<double>(counts.counts[c]) / static_cast<double>(counts.total);
  Vec g = class_gradients[c];
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= share * noise_mean[i] / (sigma * sigma);
  return g;
}

GradientEstimate score_gradient(const Classifier& model, std::span<const double> x, std::size_t k,
                                double sigma, std::size_t n, RngStream stream) {
  if (k >= model.num_classes()) throw std::invalid_argument("score_gradient: class out of range");
  SmoothingConfig cfg;
  cfg.sigma = sigma;
  cfg.n_samples = n;
  ScoreBatch b = score_gradients_all(model, x, cfg, stream);
  return GradientEstimate{std::move(b.class_gradients[k]), GradientMode::approx, n};
}

namespace {

void require_gradients(const Classifier& model) {
  if (!model.has_input_gradient()) {
    throw CapabilityError("full-mode gradients need a classifier with input gradients");
  }
}

// Seed vector d p_k / d logits for p = softmax((logits + g) / tau):
// p_k (delta_kj - p_j) / tau, added into `seed` with weight w.
void add_softmax_seed(std::span<const double> p, std::size_t k, double tau, double w,
                      std::span<double> seed) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    seed[j] += w * p[k] * ((j == k ? 1.0 : 0.0) - p[j]) / tau;
  }
}

// Mean soft probabilities of a class group and the gradients of those means,
// one group per entry of `groups`.
struct SoftGroups {
  std::vector<double> means;
  std::vector<Vec> gradients;
};

SoftGroups soft_group_gradients(const Classifier& model, std::span<const double> x,
                                const std::vector<std::vector<std::size_t>>& groups,
                                const SmoothingConfig& cfg, RngStream stream) {
  const std::size_t d = x.size();
  const std::size_t k = model.num_classes();
  SoftGroups out{std::vector<double>(groups.size(), 0.0),
                 std::vector<Vec>(groups.size(), Vec(d, 0.0))};
  Vec p(k), seed(k), grad(d);

  visit_noisy_samples(model, x, cfg.sigma, cfg.n_samples, true, stream, [&](const NoisySample& s) {
    gumbel_softmax_into(s.logits, cfg.tau, s.uniforms, p);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::fill(seed.begin(), seed.end(), 0.0);
      for (std::size_t c : groups[g]) {
        out.means[g] += p[c];
        add_softmax_seed(p, c, cfg.tau, 1.0, seed);
      }
      model.input_gradient(s.point, seed, grad);
      for (std::size_t i = 0; i < d; ++i) out.gradients[g][i] += grad[i];
    }
  });

  const double n = static_cast<double>(cfg.n_samples);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.means[g] /= n;
    for (double& v : out.gradients[g]) v /= n;
  }
  return out;
}

}  // namespace

double gumbel_expectation(const Classifier& model, std::span<const double> x, std::size_t k,
                          const SmoothingConfig& cfg, RngStream stream) {
  double sum = 0.0;
  Vec p(model.num_classes());
  visit_noisy_samples(model, x, cfg.sigma, cfg.n_samples, true, stream, [&](const NoisySample& s) {
    gumbel_softmax_into(s.logits, cfg.tau, s.uniforms, p);
    sum += p[k];
  });
  return sum / static_cast<double>(cfg.n_samples);
}

GradientEstimate full_gradient(const Classifier& model, std::span<const double> x, std::size_t k,
                               const SmoothingConfig& cfg, RngStream stream) {
  require_gradients(model);
  if (k >= model.num_classes()) throw std::invalid_argument("full_gradient: class out of range");
  SoftGroups g = soft_group_gradients(model, x, {{k}}, cfg, stream);
  return GradientEstimate{std::move(g.gradients[0]), GradientMode::full, cfg.n_samples};
}

Vec finite_difference_gradient(const std::function<double(std::span<const double>)>& fn,
                               std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::domain_error("finite_difference_gradient: h must be positive");
  Vec probe(x.begin(), x.end());
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = fn(probe);
    probe[i] = x[i] - h;
    const double down = fn(probe);
    probe[i] = x[i];
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

namespace {

// d/dE of Phi^-1(E) at the clamped estimate.
double quantile_slope(double e_clamped) { return 1.0 / normal_pdf(normal_quantile(e_clamped)); }

}  // namespace

double gumbel_point_radius(const Classifier& model, std::span<const double> x, std::size_t top,
                           std::span<const std::size_t> runner_members,
                           const SmoothingConfig& cfg, RngStream stream) {
  Vec p(model.num_classes());
  double e0 = 0.0;
  double e1 = 0.0;
  visit_noisy_samples(model, x, cfg.sigma, cfg.n_samples, true, stream, [&](const NoisySample& s) {
    gumbel_softmax_into(s.logits, cfg.tau, s.uniforms, p);
    e0 += p[top];
    for (std::size_t c : runner_members) e1 += p[c];
  });
  const double n = static_cast<double>(cfg.n_samples);
  e0 = clamp_expectation(e0 / n, cfg.n_samples);
  e1 = clamp_expectation(e1 / n, cfg.n_samples);
  return 0.5 * cfg.sigma * (normal_quantile(e0) - normal_quantile(e1));
}

ProbeEvaluation evaluate_probe(const Classifier& model, std::span<const double> x,
                               const SmoothingConfig& cfg, GradientMode mode,
                               std::size_t incumbent_class, RngStream stream) {
  ProbeEvaluation out;
  const std::size_t d = x.size();
  const double n = static_cast<double>(cfg.n_samples);

  // Votes (and, in approx mode, score gradients) from the first pass.
  ScoreBatch batch = score_gradients_all(model, x, cfg, stream);
  out.outcome = certify_counts(batch.counts, cfg.sigma, cfg.alpha);
  const CertifyOutcome& oc = out.outcome;
  const bool wants_incumbent = oc.abstained || oc.predicted() != incumbent_class;
  out.radius_gradient.assign(d, 0.0);
  out.incumbent_gradient.assign(d, 0.0);

  const std::size_t top = oc.predicted();
  double e0 = 0.0;
  double e1 = 0.0;
  Vec g0(d, 0.0);
  Vec g1(d, 0.0);

  if (mode == GradientMode::full) {
    require_gradients(model);
    std::vector<std::vector<std::size_t>> groups{{top}, oc.runner_members};
    if (wants_incumbent) groups.push_back({incumbent_class});
    SoftGroups sg = soft_group_gradients(model, x, groups, cfg, stream);
    e0 = sg.means[0];
    e1 = sg.means[1];
    g0 = sg.gradients[0];
    g1 = sg.gradients[1];
    if (wants_incumbent) out.incumbent_gradient = sg.gradients[2];
  } else {
    e0 = static_cast<double>(batch.counts.counts[top]) / n;
    g0 = batch.centered_gradient(top, cfg.sigma);
    for (std::size_t c : oc.runner_members) {
      e1 += static_cast<double>(batch.counts.counts[c]) / n;
      const Vec gc = batch.centered_gradient(c, cfg.sigma);
      for (std::size_t i = 0; i < d; ++i) g1[i] += gc[i];
    }
    if (wants_incumbent) out.incumbent_gradient = batch.centered_gradient(incumbent_class, cfg.sigma);
  }

  out.e0_point = clamp_expectation(e0, cfg.n_samples);
  out.e1_point = clamp_expectation(e1, cfg.n_samples);
  out.point_radius =
      0.5 * cfg.sigma * (normal_quantile(out.e0_point) - normal_quantile(out.e1_point));
  const double s0 = quantile_slope(out.e0_point);
  const double s1 = quantile_slope(out.e1_point);
  for (std::size_t i = 0; i < d; ++i) {
    out.radius_gradient[i] = 0.5 * cfg.sigma * (s0 * g0[i] - s1 * g1[i]);
  }
  return out;
}

GradientEstimate transitive_objective_gradient(const Classifier& model, std::span<const double> x1,
                                               std::span<const double> x_probe,
                                               const SmoothingConfig& cfg, GradientMode mode,
                                               RngStream stream) {
  const Vec offset = sub(x_probe, x1);
  const double len = norm(offset);
  if (!(len > 0.0)) {
    throw DegenerateGeometry("transitive_objective_gradient: probe coincides with the instance");
  }
  const ProbeEvaluation ev = evaluate_probe(model, x_probe, cfg, mode, 0, stream);
  Vec g = ev.radius_gradient;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= offset[i] / len;
  return GradientEstimate{std::move(g), mode, cfg.n_samples};
}

}  // namespace geocert
