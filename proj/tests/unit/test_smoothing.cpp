#include <doctest.h>

#include <cmath>
#include <random>

#include "geocert/errors.hpp"
#include "geocert/geometry.hpp"
#include "geocert/oracle.hpp"
#include "geocert/smoothing.hpp"

using namespace geocert;

TEST_SUITE("smoothing") {

TEST_CASE("config validation") {
  SmoothingConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_samples = 99;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SmoothingConfig{};
  c.sigma = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SmoothingConfig{};
  c.alpha = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SmoothingConfig{};
  c.tau = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_sampling_mode("gumbel") == SamplingMode::gumbel);
  CHECK_THROWS_AS(parse_sampling_mode("soft"), ConfigError);
}

TEST_CASE("clamp_expectation keeps estimates off 0 and 1") {
  CHECK(clamp_expectation(1.0, 1000) == doctest::Approx(1.0 - 0.0005));
  CHECK(clamp_expectation(0.0, 1000) == doctest::Approx(0.0005));
  CHECK(clamp_expectation(0.3, 1000) == 0.3);
}

TEST_CASE("certify_counts on a unanimous vote") {
  const CertifyOutcome oc = certify_counts(ClassCounts::from({0, 1000}), 0.5, 0.001);
  CHECK_FALSE(oc.abstained);
  CHECK(oc.predicted() == 1);
  CHECK(oc.bounds.runner_class == kMetaClass);
  CHECK(oc.runner_members == std::vector<std::size_t>{0});
  CHECK(oc.bounds.e0_lower < 1.0);
  CHECK(oc.radius == doctest::Approx(cohen_radius(oc.bounds.e0_lower, oc.bounds.e1_upper, 0.5)));
  CHECK(std::isfinite(oc.radius));
}

TEST_CASE("certify_counts abstains on a split vote") {
  const CertifyOutcome oc = certify_counts(ClassCounts::from({510, 490}), 0.5, 0.001);
  CHECK(oc.abstained);
  CHECK(oc.radius <= 0.0);
}

TEST_CASE("certify_counts abstains when only small classes exist") {
  const CertifyOutcome oc = certify_counts(ClassCounts::from({3, 1}), 0.5, 0.001);
  CHECK(oc.abstained);
}

TEST_CASE("certify_counts picks the top two by count") {
  const CertifyOutcome oc = certify_counts(ClassCounts::from({100, 700, 3, 197}), 0.5, 0.001);
  CHECK(oc.predicted() == 1);
  CHECK(oc.bounds.runner_class == 3);
  CHECK(oc.bounds.z0 == doctest::Approx(0.7));
  CHECK(oc.bounds.z1 == doctest::Approx(0.197));
  CHECK(oc.bounds.e0_lower < 0.7);
  CHECK(oc.bounds.e1_upper > 0.197);
}

TEST_CASE("noise depends only on the stream and draw index") {
  const ConstantClassifier f(3, 2, 0);
  const Vec x{0.2, 0.4, 0.6};
  std::vector<Vec> a, b;
  visit_noisy_samples(f, x, 0.5, 600, false, RngStream(4),
                      [&](const NoisySample& s) { a.emplace_back(s.noise.begin(), s.noise.end()); });
  visit_noisy_samples(f, x, 0.5, 300, true, RngStream(4),
                      [&](const NoisySample& s) { b.emplace_back(s.noise.begin(), s.noise.end()); });
  REQUIRE(b.size() == 300);
  for (std::size_t j = 0; j < b.size(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("certify is deterministic per stream") {
  const LinearClassifier f(LinearModel{{1.0, -1.0}, 0.1});
  const Vec x{0.6, 0.4};
  SmoothingConfig cfg;
  const CertifyOutcome a = certify(f, x, cfg, RngStream(9));
  const CertifyOutcome b = certify(f, x, cfg, RngStream(9));
  const CertifyOutcome c = certify(f, x, cfg, RngStream(10));
  CHECK(a.counts.counts == b.counts.counts);
  CHECK(a.radius == b.radius);
  CHECK(a.counts.counts != c.counts.counts);
}

TEST_CASE("certify rejects dimension mismatch") {
  const ConstantClassifier f(3, 2, 0);
  const Vec x{0.5, 0.5};
  CHECK_THROWS_AS(certify(f, x, SmoothingConfig{}, RngStream(1)), std::invalid_argument);
}

TEST_CASE("vote frequencies agree with exact linear expectations") {
  std::mt19937_64 eng(31);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int outside = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + t % 8;
    LinearModel m{Vec(d), 0.0};
    for (double& w : m.w) w = g(eng);
    Vec x(d);
    for (double& v : x) v = u(eng);
    m.b = -dot(m.w, x) + 0.3 * g(eng) * norm(m.w);
    const LinearClassifier f(m);
    SmoothingConfig cfg;
    cfg.n_samples = 100000;
    const SampleSummary s = sample_expectations(f, x, cfg, RngStream(1000 + t));
    const double p = linear_expectation_exact(m, x, cfg.sigma);
    const double freq = static_cast<double>(s.counts.counts[0]) / 100000.0;
    const double se = std::sqrt(p * (1.0 - p) / 100000.0);
    if (std::abs(freq - p) > 3.0 * se) ++outside;
  }
  // 3-sigma events: expect about 0.14 of 50.
  CHECK(outside <= 2);
}

TEST_CASE("gumbel votes are Gumbel-max samples of the softmax") {
  // Logits (0, log 3): Gumbel-max picks class 1 with probability 3/4.
  struct Fixed : Classifier {
    std::size_t input_dim() const override { return 1; }
    std::size_t num_classes() const override { return 2; }
    void logits(std::span<const double>, std::span<double> out) const override {
      out[0] = 0.0;
      out[1] = std::log(3.0);
    }
  } f;
  const Vec x{0.5};
  SmoothingConfig cfg;
  cfg.mode = SamplingMode::gumbel;
  cfg.n_samples = 40000;
  const SampleSummary s = sample_expectations(f, x, cfg, RngStream(2));
  CHECK(static_cast<double>(s.counts.counts[1]) / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
  CHECK(s.soft_mean[0] + s.soft_mean[1] == doctest::Approx(1.0));
  CHECK(s.soft_mean[1] > 0.5);
}

}  // TEST_SUITE
