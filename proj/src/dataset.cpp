#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "geocert/errors.hpp"
#include "geocert/model.hpp"
#include "geocert/rng.hpp"

namespace geocert {

void Dataset::validate() const {
  if (inputs.size() != labels.size()) {
    throw DataError("dataset '" + name + "': " + std::to_string(inputs.size()) + " inputs but " +
                    std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != dim) {
      throw DataError("dataset '" + name + "': point " + std::to_string(i) + " has wrong dimension");
    }
    for (double v : inputs[i]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("dataset '" + name + "': point " + std::to_string(i) + " leaves [0,1]^d");
      }
    }
    if (labels[i] >= num_classes) {
      throw DataError("dataset '" + name + "': label " + std::to_string(labels[i]) +
                      " out of range");
    }
  }
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "blobs") return DatasetKind::blobs;
  if (name == "wedge") return DatasetKind::wedge;
  if (name == "annulus") return DatasetKind::annulus;
  throw ConfigError("unknown dataset kind '" + std::string(name) +
                    "' (expected blobs, wedge or annulus)");
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::blobs:
      return "blobs";
    case DatasetKind::wedge:
      return "wedge";
    case DatasetKind::annulus:
      return "annulus";
  }
  return "?";
}

std::size_t wedge_label(std::span<const double> x) {
  return x[1] > 0.35 + std::abs(x[0] - 0.5) ? 1 : 0;
}

Dataset synth_dataset(DatasetKind kind, std::size_t d, std::size_t n, std::uint64_t seed) {
  if (d < 2) throw ConfigError("synth_dataset: d must be at least 2");
  if (n < 10) throw ConfigError("synth_dataset: n must be at least 10");

  Dataset out;
  out.name = std::string(to_string(kind));
  out.dim = d;
  out.num_classes = 2;
  out.inputs.reserve(n);
  out.labels.reserve(n);

  auto eng = RngStream(seed).child(static_cast<std::uint64_t>(kind)).engine();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> spread(0.0, 0.06);

  for (std::size_t i = 0; i < n; ++i) {
    Vec x(d);
    std::size_t label = 0;
    switch (kind) {
      case DatasetKind::blobs: {
        label = i % 2;
        const double center = label == 0 ? 0.25 : 0.75;
        for (double& v : x) v = std::clamp(center + spread(eng), 0.0, 1.0);
        break;
      }
      case DatasetKind::wedge: {
        for (double& v : x) v = unit(eng);
        label = wedge_label(x);
        break;
      }
      case DatasetKind::annulus: {
        for (double& v : x) v = unit(eng);
        double r2 = 0.0;
        for (std::size_t j = 0; j < 2; ++j) r2 += (x[j] - 0.5) * (x[j] - 0.5);
        const double r = std::sqrt(r2);
        label = (r >= 0.2 && r <= 0.38) ? 1 : 0;
        break;
      }
    }
    out.inputs.push_back(std::move(x));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace geocert
