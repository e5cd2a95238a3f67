#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geocert/errors.hpp"
#include "geocert/vec.hpp"

namespace geocert {

/// Base classifier f: R^d -> R^k (logits). Implementations must be safe to
/// call concurrently from several threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  [[nodiscard]] virtual std::size_t input_dim() const = 0;
  [[nodiscard]] virtual std::size_t num_classes() const = 0;
  virtual void logits(std::span<const double> x, std::span<double> out) const = 0;

  /// Whether input_gradient is implemented.
  [[nodiscard]] virtual bool has_input_gradient() const { return false; }

  /// Gradient of seed . logits(x) with respect to x. The default throws
  /// CapabilityError.
  virtual void input_gradient(std::span<const double> x, std::span<const double> seed,
                              std::span<double> grad) const;
};

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

// ---------------------------------------------------------------------------
// Multilayer perceptron with rectifier hidden units

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // row-major, out x in
  std::vector<double> bias;     // out
};

struct MlpParams {
  std::vector<std::size_t> layer_dims;  // d, hidden..., classes
  std::vector<DenseLayer> layers;

  /// Throws std::invalid_argument if shapes are inconsistent.
  void validate() const;
  [[nodiscard]] std::size_t input_dim() const { return layer_dims.front(); }
  [[nodiscard]] std::size_t num_classes() const { return layer_dims.back(); }
};

/// Glorot-uniform weights, zero biases, seeded.
MlpParams init_mlp(const std::vector<std::size_t>& layer_dims, std::uint64_t seed);

/// All-zero parameters of the given shape.
MlpParams zero_mlp(const std::vector<std::size_t>& layer_dims);

Vec mlp_forward(const MlpParams& params, std::span<const double> x);

/// Gradient of seed . mlp_forward(params, x) with respect to x.
Vec mlp_input_gradient(const MlpParams& params, std::span<const double> x,
                       std::span<const double> seed);

class Mlp final : public Classifier {
 public:
  explicit Mlp(MlpParams params);

  [[nodiscard]] std::size_t input_dim() const override { return params_.input_dim(); }
  [[nodiscard]] std::size_t num_classes() const override { return params_.num_classes(); }
  void logits(std::span<const double> x, std::span<double> out) const override;
  [[nodiscard]] bool has_input_gradient() const override { return true; }
  void input_gradient(std::span<const double> x, std::span<const double> seed,
                      std::span<double> grad) const override;

  [[nodiscard]] const MlpParams& params() const { return params_; }

 private:
  MlpParams params_;
  std::size_t widest_ = 0;
};

// ---------------------------------------------------------------------------
// Data

struct Dataset {
  std::string name;
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<Vec> inputs;
  std::vector<std::size_t> labels;

  /// Throws DataError on length mismatch, coordinates outside [0, 1] or
  /// labels >= num_classes.
  void validate() const;
  [[nodiscard]] std::size_t size() const { return inputs.size(); }
};

enum class DatasetKind { blobs, wedge, annulus };

/// Parses "blobs" / "wedge" / "annulus"; throws ConfigError otherwise.
DatasetKind parse_dataset_kind(std::string_view name);
std::string_view to_string(DatasetKind kind);

/// Deterministic two-class synthetic data in [0, 1]^d.
///
/// blobs:   two Gaussian clusters around 0.25 and 0.75 on every axis.
/// wedge:   class 1 inside the V  x1 > 0.35 + |x0 - 0.5|, so class 0 wraps a
///          concave corner at (0.5, 0.35). Extra axes carry no signal.
/// annulus: class 1 on the ring 0.2 <= |x - c| <= 0.38 around the center.
Dataset synth_dataset(DatasetKind kind, std::size_t d, std::size_t n, std::uint64_t seed);

/// Exact Bayes label of the wedge generator.
std::size_t wedge_label(std::span<const double> x);

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are scaled by 1/255.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Writes a dataset as IDX files with rows x cols images (pixels quantized
/// to bytes). Used for fixtures and for exporting synthetic data.
void save_idx(const Dataset& data, std::size_t rows, std::size_t cols,
              const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

class IdxError : public DataError {
 public:
  enum class Kind { io, bad_magic, truncated, count_mismatch };
  IdxError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  double sigma_train = 0.5;
  std::uint64_t seed = 1;
  std::vector<std::size_t> hidden = {32, 32};

  void validate() const;
};

/// Mini-batch gradient descent on the cross-entropy of f(x + n), with one
/// fresh n ~ N(0, sigma_train^2 I) per example per epoch. Per-epoch mean
/// loss is appended to `loss_history` when given.
MlpParams train_noise_augmented(const Dataset& data, const TrainConfig& cfg,
                                std::vector<double>* loss_history = nullptr);

/// Fraction of examples whose clean argmax equals the label.
double clean_accuracy(const Classifier& model, const Dataset& data);

// ---------------------------------------------------------------------------
// Checkpoints (text format, see README)

std::string checkpoint_to_string(const MlpParams& params);
MlpParams checkpoint_from_string(std::string_view text);
void save_checkpoint(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_checkpoint(const std::filesystem::path& path);

}  // namespace geocert
