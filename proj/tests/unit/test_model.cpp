#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "geocert/errors.hpp"
#include "geocert/gradient.hpp"
#include "geocert/model.hpp"

using namespace geocert;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "geocert_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("argmax breaks ties toward the lowest index") {
  const double v[] = {1.0, 3.0, 3.0, -2.0};
  CHECK(argmax(v) == 1);
}

TEST_CASE("mlp input gradient matches finite differences") {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + t % 6;
    const MlpParams p = init_mlp({d, 7, 5, 3}, 100 + t);
    Vec x(d), seed(3);
    for (double& v : x) v = g(eng);
    for (double& v : seed) v = g(eng);
    const Vec grad = mlp_input_gradient(p, x, seed);
    const Vec fd = finite_difference_gradient(
        [&](std::span<const double> y) { return dot(seed, mlp_forward(p, y)); }, x, 1e-6);
    for (std::size_t i = 0; i < d; ++i) CHECK(grad[i] == doctest::Approx(fd[i]).epsilon(1e-5));

    const Mlp m(p);
    Vec out(3), mg(d);
    m.logits(x, out);
    CHECK(out == mlp_forward(p, x));
    m.input_gradient(x, seed, mg);
    CHECK(mg == grad);
  }
}

TEST_CASE("mlp shapes are validated") {
  MlpParams p = init_mlp({3, 4, 2}, 1);
  p.layers[1].weights.pop_back();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(init_mlp({3, 4, 1}, 1), std::invalid_argument);
  CHECK(zero_mlp({2, 3, 2}).layers.size() == 2);
}

TEST_CASE("classifiers without gradients say so") {
  struct Plain : Classifier {
    std::size_t input_dim() const override { return 1; }
    std::size_t num_classes() const override { return 2; }
    void logits(std::span<const double>, std::span<double> out) const override { out[0] = out[1] = 0; }
  } plain;
  Vec x{0.0}, seed{1.0, 0.0}, out(1);
  CHECK_FALSE(plain.has_input_gradient());
  CHECK_THROWS_AS(plain.input_gradient(x, seed, out), CapabilityError);
}

TEST_CASE("synthetic datasets are valid and reproducible") {
  for (DatasetKind kind : {DatasetKind::blobs, DatasetKind::wedge, DatasetKind::annulus}) {
    const Dataset a = synth_dataset(kind, 3, 300, 9);
    const Dataset b = synth_dataset(kind, 3, 300, 9);
    CHECK_NOTHROW(a.validate());
    CHECK(a.size() == 300);
    CHECK(a.inputs == b.inputs);
    CHECK(a.labels == b.labels);
    std::size_t ones = 0;
    for (std::size_t l : a.labels) ones += l;
    CHECK(ones > 30);
    CHECK(ones < 270);
    CHECK(parse_dataset_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_dataset_kind("spiral"), ConfigError);
  CHECK_THROWS_AS(synth_dataset(DatasetKind::wedge, 1, 100, 1), ConfigError);
}

TEST_CASE("wedge labels follow the V") {
  const Vec inside{0.5, 0.8};
  const Vec apex_below{0.5, 0.3};
  const Vec side{0.1, 0.6};
  CHECK(wedge_label(inside) == 1);
  CHECK(wedge_label(apex_below) == 0);
  CHECK(wedge_label(side) == 0);
  const Dataset w = synth_dataset(DatasetKind::wedge, 2, 200, 3);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.labels[i] == wedge_label(w.inputs[i]));
}

TEST_CASE("dataset validation catches bad records") {
  Dataset d = synth_dataset(DatasetKind::blobs, 2, 20, 1);
  d.inputs[3][0] = 1.5;
  CHECK_THROWS_AS(d.validate(), DataError);
  d = synth_dataset(DatasetKind::blobs, 2, 20, 1);
  d.labels.pop_back();
  CHECK_THROWS_AS(d.validate(), DataError);
  d = synth_dataset(DatasetKind::blobs, 2, 20, 1);
  d.labels[0] = 7;
  CHECK_THROWS_AS(d.validate(), DataError);
}

TEST_CASE("training is deterministic and learns blobs") {
  const Dataset data = synth_dataset(DatasetKind::blobs, 2, 400, 2);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.sigma_train = 0.1;
  std::vector<double> loss;
  const MlpParams a = train_noise_augmented(data, cfg, &loss);
  const MlpParams b = train_noise_augmented(data, cfg);
  CHECK(checkpoint_to_string(a) == checkpoint_to_string(b));
  CHECK(loss.size() == 30);
  CHECK(loss.back() < loss.front());
  CHECK(clean_accuracy(Mlp(a), data) > 0.95);

  TrainConfig bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("checkpoints round-trip exactly") {
  const MlpParams p = init_mlp({4, 6, 3}, 77);
  const fs::path dir = scratch("ckpt");
  const fs::path path = dir / "nested" / "m.ckpt";
  save_checkpoint(p, path);
  const MlpParams q = load_checkpoint(path);
  CHECK(q.layer_dims == p.layer_dims);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    CHECK(q.layers[l].weights == p.layers[l].weights);
    CHECK(q.layers[l].bias == p.layers[l].bias);
  }
  CHECK(checkpoint_to_string(q) == checkpoint_to_string(p));
}

TEST_CASE("corrupt checkpoints are data errors") {
  const std::string good = checkpoint_to_string(init_mlp({2, 3, 2}, 1));
  CHECK_THROWS_AS(checkpoint_from_string("not a checkpoint"), DataError);
  CHECK_THROWS_AS(checkpoint_from_string(good.substr(0, good.size() / 2)), DataError);
  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find(" 1"), 2, " 9");
  CHECK_THROWS_AS(checkpoint_from_string(wrong_version), DataError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/geocert.ckpt"), DataError);
}

TEST_CASE("idx files round-trip") {
  const fs::path dir = scratch("idx");
  Dataset d = synth_dataset(DatasetKind::blobs, 6, 20, 4);
  // Quantize so the byte round trip is exact.
  for (Vec& x : d.inputs) {
    for (double& v : x) v = std::round(v * 255.0) / 255.0;
  }
  save_idx(d, 2, 3, dir / "img.idx", dir / "lab.idx");
  const Dataset e = load_idx(dir / "img.idx", dir / "lab.idx");
  CHECK(e.dim == 6);
  CHECK(e.labels == d.labels);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t k = 0; k < 6; ++k) CHECK(e.inputs[i][k] == doctest::Approx(d.inputs[i][k]));
  }
}

TEST_CASE("idx bytes are big-endian") {
  const fs::path dir = scratch("idx_bytes");
  Dataset d;
  d.name = "tiny";
  d.dim = 4;
  d.num_classes = 2;
  d.inputs = {{0.0, 1.0, 0.0, 1.0}, {1.0, 1.0, 0.0, 0.0}};
  d.labels = {1, 0};
  save_idx(d, 2, 2, dir / "i", dir / "l");
  std::ifstream is(dir / "i", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), {});
  const std::vector<unsigned char> want{0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2,
                                        0, 255, 0, 255, 255, 255, 0, 0};
  CHECK(bytes == want);
  std::ifstream ls(dir / "l", std::ios::binary);
  std::vector<unsigned char> lbytes((std::istreambuf_iterator<char>(ls)), {});
  CHECK(lbytes == std::vector<unsigned char>{0, 0, 8, 1, 0, 0, 0, 2, 1, 0});
}

TEST_CASE("idx errors are distinguished") {
  const fs::path dir = scratch("idx_err");
  const Dataset d = synth_dataset(DatasetKind::blobs, 4, 10, 4);
  save_idx(d, 2, 2, dir / "i", dir / "l");

  auto kind_of = [](const fs::path& i, const fs::path& l) {
    try {
      load_idx(i, l);
    } catch (const IdxError& e) {
      return e.kind();
    }
    FAIL("expected an IdxError");
    return IdxError::Kind::io;
  };
  CHECK(kind_of(dir / "missing", dir / "l") == IdxError::Kind::io);
  CHECK(kind_of(dir / "l", dir / "l") == IdxError::Kind::bad_magic);

  fs::copy_file(dir / "i", dir / "short");
  fs::resize_file(dir / "short", fs::file_size(dir / "i") - 3);
  CHECK(kind_of(dir / "short", dir / "l") == IdxError::Kind::truncated);

  const Dataset fewer = synth_dataset(DatasetKind::blobs, 4, 12, 4);
  save_idx(fewer, 2, 2, dir / "i12", dir / "l12");
  CHECK(kind_of(dir / "i", dir / "l12") == IdxError::Kind::count_mismatch);
}

}  // TEST_SUITE
