#include "geocert/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "geocert/errors.hpp"
#include "geocert/rng.hpp"
#include "mlp_internal.hpp"

namespace geocert {

void Classifier::input_gradient(std::span<const double>, std::span<const double>,
                                std::span<double>) const {
  throw CapabilityError("classifier does not provide input gradients");
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

void MlpParams::validate() const {
  if (layer_dims.size() < 2) throw std::invalid_argument("MlpParams: need input and output dims");
  if (layer_dims.back() < 2) throw std::invalid_argument("MlpParams: need at least two classes");
  if (layers.size() + 1 != layer_dims.size()) {
    throw std::invalid_argument("MlpParams: layer count does not match layer_dims");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& L = layers[l];
    if (layer_dims[l] == 0 || L.in != layer_dims[l] || L.out != layer_dims[l + 1] ||
        L.weights.size() != L.in * L.out || L.bias.size() != L.out) {
      throw std::invalid_argument("MlpParams: layer " + std::to_string(l) + " has wrong shape");
    }
  }
}

MlpParams zero_mlp(const std::vector<std::size_t>& layer_dims) {
  MlpParams p;
  p.layer_dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    DenseLayer L;
    L.in = layer_dims[l];
    L.out = layer_dims[l + 1];
    L.weights.assign(L.in * L.out, 0.0);
    L.bias.assign(L.out, 0.0);
    p.layers.push_back(std::move(L));
  }
  p.validate();
  return p;
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_dims, std::uint64_t seed) {
  MlpParams p = zero_mlp(layer_dims);
  auto eng = RngStream(seed).child(0).engine();
  for (DenseLayer& L : p.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : L.weights) w = dist(eng);
  }
  return p;
}

namespace detail {

void forward_cached(const MlpParams& p, std::span<const double> x, std::vector<Vec>& acts) {
  acts.resize(p.layers.size() + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const DenseLayer& L = p.layers[l];
    const Vec& in = acts[l];
    Vec& out = acts[l + 1];
    out.resize(L.out);
    const bool hidden = l + 1 < p.layers.size();
    for (std::size_t o = 0; o < L.out; ++o) {
      const double* w = &L.weights[o * L.in];
      double s = L.bias[o];
      for (std::size_t i = 0; i < L.in; ++i) s += w[i] * in[i];
      out[o] = hidden ? std::max(0.0, s) : s;
    }
  }
}

}  // namespace detail

namespace {

void check_input(const MlpParams& p, std::size_t n) {
  if (n != p.input_dim()) {
    throw std::invalid_argument("mlp: input has dimension " + std::to_string(n) + ", expected " +
                                std::to_string(p.input_dim()));
  }
}

}  // namespace

Vec mlp_forward(const MlpParams& params, std::span<const double> x) {
  check_input(params, x.size());
  std::vector<Vec> acts;
  detail::forward_cached(params, x, acts);
  return acts.back();
}

Vec mlp_input_gradient(const MlpParams& params, std::span<const double> x,
                       std::span<const double> seed) {
  check_input(params, x.size());
  if (seed.size() != params.num_classes()) {
    throw std::invalid_argument("mlp_input_gradient: seed has wrong length");
  }
  std::vector<Vec> acts;
  detail::forward_cached(params, x, acts);

  Vec delta(seed.begin(), seed.end());
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const DenseLayer& L = params.layers[l];
    Vec prev(L.in, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      if (delta[o] == 0.0) continue;
      const double* w = &L.weights[o * L.in];
      for (std::size_t i = 0; i < L.in; ++i) prev[i] += w[i] * delta[o];
    }
    if (l > 0) {
      // rectifier derivative of the layer below
      for (std::size_t i = 0; i < L.in; ++i) {
        if (acts[l][i] <= 0.0) prev[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

Mlp::Mlp(MlpParams params) : params_(std::move(params)) {
  params_.validate();
  widest_ = *std::max_element(params_.layer_dims.begin(), params_.layer_dims.end());
}

void Mlp::logits(std::span<const double> x, std::span<double> out) const {
  check_input(params_, x.size());
  thread_local std::vector<double> a;
  thread_local std::vector<double> b;
  a.assign(x.begin(), x.end());
  for (std::size_t l = 0; l < params_.layers.size(); ++l) {
    const DenseLayer& L = params_.layers[l];
    const bool hidden = l + 1 < params_.layers.size();
    b.resize(L.out);
    for (std::size_t o = 0; o < L.out; ++o) {
      const double* w = &L.weights[o * L.in];
      double s = L.bias[o];
      for (std::size_t i = 0; i < L.in; ++i) s += w[i] * a[i];
      b[o] = hidden ? std::max(0.0, s) : s;
    }
    std::swap(a, b);
  }
  std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(out.size()), out.begin());
}

void Mlp::input_gradient(std::span<const double> x, std::span<const double> seed,
                         std::span<double> grad) const {
  const Vec g = mlp_input_gradient(params_, x, seed);
  std::copy(g.begin(), g.end(), grad.begin());
}

double clean_accuracy(const Classifier& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  Vec out(model.num_classes());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    model.logits(data.inputs[i], out);
    hits += argmax(out) == data.labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace geocert
