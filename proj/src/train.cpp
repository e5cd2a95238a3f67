#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "geocert/errors.hpp"
#include "geocert/model.hpp"
#include "geocert/rng.hpp"
#include "mlp_internal.hpp"

namespace geocert {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (!(sigma_train > 0.0)) throw ConfigError("train: sigma_train must be positive");
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("train: hidden widths must be positive");
  }
}

namespace {

struct Gradients {
  std::vector<Vec> weights;
  std::vector<Vec> bias;

  explicit Gradients(const MlpParams& p) {
    for (const DenseLayer& L : p.layers) {
      weights.emplace_back(L.weights.size(), 0.0);
      bias.emplace_back(L.bias.size(), 0.0);
    }
  }

  void zero() {
    for (Vec& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (Vec& b : bias) std::fill(b.begin(), b.end(), 0.0);
  }
};

// Accumulates d(cross-entropy)/d(params) for one example; returns the loss.
double accumulate_example(const MlpParams& p, std::span<const double> x, std::size_t label,
                          std::vector<Vec>& acts, Gradients& g) {
  detail::forward_cached(p, x, acts);
  const Vec& logits = acts.back();
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vec delta(logits.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    delta[k] = std::exp(logits[k] - peak);
    sum += delta[k];
  }
  for (double& v : delta) v /= sum;
  const double loss = -(logits[label] - peak - std::log(sum));
  delta[label] -= 1.0;

  for (std::size_t l = p.layers.size(); l-- > 0;) {
    const DenseLayer& L = p.layers[l];
    const Vec& in = acts[l];
    Vec prev(L.in, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      g.bias[l][o] += d;
      double* gw = &g.weights[l][o * L.in];
      const double* w = &L.weights[o * L.in];
      for (std::size_t i = 0; i < L.in; ++i) {
        gw[i] += d * in[i];
        prev[i] += w[i] * d;
      }
    }
    if (l > 0) {
      for (std::size_t i = 0; i < L.in; ++i) {
        if (in[i] <= 0.0) prev[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
  return loss;
}

}  // namespace

MlpParams train_noise_augmented(const Dataset& data, const TrainConfig& cfg,
                                std::vector<double>* loss_history) {
  cfg.validate();
  if (data.size() == 0) throw DataError("train: dataset is empty");
  data.validate();

  std::vector<std::size_t> dims{data.dim};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(std::max<std::size_t>(2, data.num_classes));
  const RngStream root(cfg.seed);
  MlpParams params = init_mlp(dims, root.child(0).key());

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Gradients grads(params);
  std::vector<Vec> acts;
  Vec noisy(data.dim);
  std::normal_distribution<double> noise(0.0, cfg.sigma_train);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto eng = root.child(1).child(epoch).engine();
    std::shuffle(order.begin(), order.end(), eng);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      grads.zero();
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t idx = order[b];
        for (std::size_t j = 0; j < data.dim; ++j) noisy[j] = data.inputs[idx][j] + noise(eng);
        epoch_loss += accumulate_example(params, noisy, data.labels[idx], acts, grads);
      }
      const double step = cfg.learning_rate / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < params.layers.size(); ++l) {
        DenseLayer& L = params.layers[l];
        for (std::size_t i = 0; i < L.weights.size(); ++i) L.weights[i] -= step * grads.weights[l][i];
        for (std::size_t i = 0; i < L.bias.size(); ++i) L.bias[i] -= step * grads.bias[l][i];
      }
    }
    if (loss_history) loss_history->push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return params;
}

}  // namespace geocert
