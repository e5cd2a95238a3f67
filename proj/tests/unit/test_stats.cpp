#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "geocert/oracle.hpp"
#include "geocert/rng.hpp"
#include "geocert/stats.hpp"

using namespace geocert;

TEST_SUITE("stats") {

TEST_CASE("normal_quantile matches high-precision values") {
  CHECK(std::abs(normal_quantile(0.5)) <= 1e-15);
  CHECK(std::abs(normal_quantile(normal_cdf(1.0)) - 1.0) < 1e-9);
  CHECK(std::abs(normal_quantile(0.975) - 1.95996398454005423552) < 1e-9);
  CHECK(std::abs(normal_cdf(1.0) - 0.841344746068542948585) < 1e-15);

  struct Row {
    double p, x;
  };
  const Row rows[] = {{1e-10, -6.36134090240405619910}, {1e-5, -4.26489079392282461023},
                      {0.02425, -1.97296105131188483760}, {0.3, -0.524400512708040815969},
                      {0.7, 0.52440051270804065631},     {0.97575, 1.97296105131188495940},
                      {0.99999, 4.26489079392384076995},  {0.99, 2.32634787404084110089}};
  for (const Row& r : rows) {
    CAPTURE(r.p);
    CHECK(std::abs(normal_quantile(r.p) - r.x) < 1e-9);
  }
}

TEST_CASE("normal_quantile is odd and increasing") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(eng);
    CHECK(std::abs(normal_quantile(p) + normal_quantile(1.0 - p)) < 1e-12 * (1.0 + std::abs(normal_quantile(p))) + 1e-12);
  }
  double prev = normal_quantile(1e-12);
  for (double p = 1e-3; p < 1.0; p += 1e-3) {
    const double q = normal_quantile(p);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("normal_quantile rejects the closed endpoints") {
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(std::nan("")), std::domain_error);
}

TEST_CASE("chi_square_quantile matches tabulated values") {
  CHECK(std::abs(chi_square_quantile(0.95, 1) - 3.841458820694124) < 1e-8);
  CHECK(std::abs(chi_square_quantile(0.999, 1) - 10.827566170662733) < 1e-8);
  CHECK(std::abs(chi_square_quantile(0.95, 2) - 5.991464547107979) < 1e-8);
  CHECK(std::abs(chi_square_quantile(0.99, 5) - 15.08627246938899) < 1e-8);
  CHECK(std::abs(chi_square_quantile(0.9995, 1) - 12.11566514639738) < 1e-8);
}

TEST_CASE("chi_square_quantile with one degree of freedom is a squared normal quantile") {
  for (double p : {0.5, 0.9, 0.99, 0.99975, 0.9999999}) {
    const double z = normal_quantile(0.5 + 0.5 * p);
    CHECK(chi_square_quantile(p, 1) == doctest::Approx(z * z).epsilon(1e-9));
  }
}

TEST_CASE("coalesce_classes merges small classes") {
  const CoalescedCounts a = coalesce_classes(ClassCounts::from({900, 50, 3, 2, 45}));
  CHECK(a.counts == std::vector<std::uint64_t>{900, 50, 45, 5});
  CHECK(a.total == 1000);
  CHECK(a.meta_members == std::vector<std::size_t>{2, 3});
  CHECK(a.source_class.back() == kMetaClass);
  CHECK(a.index_of[4] == 2);
  CHECK(a.index_of[2] == 3);

  const CoalescedCounts b = coalesce_classes(ClassCounts::from({800, 200}));
  CHECK(b.counts == std::vector<std::uint64_t>{800, 200});
  CHECK_FALSE(b.has_meta());

  const CoalescedCounts c = coalesce_classes(ClassCounts::from({990, 4, 3, 3}));
  CHECK(c.counts == std::vector<std::uint64_t>{990, 10});
}

TEST_CASE("coalesce_classes keeps N and stays within threshold of it") {
  std::mt19937_64 eng(9);
  for (int t = 0; t < 500; ++t) {
    std::uniform_int_distribution<int> k(2, 12);
    std::uniform_int_distribution<std::uint64_t> c(0, 40);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(k(eng)));
    for (auto& v : counts) v = c(eng);
    counts[0] += 1;
    const ClassCounts in = ClassCounts::from(counts);
    const CoalescedCounts out = coalesce_classes(in);
    CHECK(out.total == in.total);
    const auto sum = std::accumulate(out.counts.begin(), out.counts.end(), std::uint64_t{0});
    CHECK(sum >= in.total);
    CHECK(sum <= in.total + 5);
    for (std::uint64_t v : out.counts) CHECK(v >= 5);
  }
}

TEST_CASE("ClassCounts validates its input") {
  CHECK_THROWS_AS(ClassCounts::from({10}), std::invalid_argument);
  CHECK_THROWS_AS(ClassCounts::from({0, 0}), std::invalid_argument);
  CHECK(ClassCounts::from({3, 4}).total == 7);
}

TEST_CASE("goodman_bounds with two classes solves the score equation") {
  // Roots of (y - N p)^2 = A N p (1 - p), found independently by root search.
  struct Row {
    std::uint64_t y, n;
    double alpha, lo, hi;
  };
  const Row rows[] = {{37, 200, 0.01, 0.12040531717672774782, 0.27347413110955585141},
                      {512, 1000, 0.001, 0.4571667272006029046, 0.56654597760821805855},
                      {9, 60, 0.05, 0.074172021392588357231, 0.2799114937173786875}};
  for (const Row& r : rows) {
    const std::uint64_t counts[] = {r.y, r.n - r.y};
    const auto iv = goodman_bounds(counts, r.n, r.alpha);
    CHECK(std::abs(iv[0].lower - r.lo) < 1e-10);
    CHECK(std::abs(iv[0].upper - r.hi) < 1e-10);
    CHECK(std::abs(iv[1].lower - (1.0 - r.hi)) < 1e-10);
  }
}

TEST_CASE("goodman_bounds never reaches one for the top class") {
  const auto cc = coalesce_classes(ClassCounts::from({1000, 0}));
  const auto iv = goodman_bounds(cc, 0.001);
  CHECK(iv[0].lower < 1.0);
  CHECK(iv[0].lower > 0.98);
  for (const Interval& i : iv) {
    CHECK(i.lower >= 0.0);
    CHECK(i.upper <= 1.0);
    CHECK(i.lower <= i.upper);
  }
}

TEST_CASE("goodman_bounds demands coalesced counts") {
  const std::uint64_t counts[] = {995, 4, 1};
  CHECK_THROWS_WITH_AS(goodman_bounds(counts, 1000, 0.001),
                       doctest::Contains("coalesce"), std::invalid_argument);
}

TEST_CASE("goodman_bounds widen as alpha shrinks") {
  const std::uint64_t counts[] = {600, 300, 100};
  const auto wide = goodman_bounds(counts, 1000, 0.001);
  const auto narrow = goodman_bounds(counts, 1000, 0.1);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(wide[i].lower < narrow[i].lower);
    CHECK(wide[i].upper > narrow[i].upper);
  }
}

TEST_CASE("goodman_bounds cover [750, 250] jointly") {
  const double p[] = {0.75, 0.25};
  const double cov = multinomial_coverage_sim(p, 1000, 0.001, 100000, RngStream(17));
  CHECK(cov >= 0.999 - 3.0 * std::sqrt(0.001 * 0.999 / 100000.0));
}

TEST_CASE("gumbel_softmax basics") {
  const double e1 = std::exp(-1.0);
  const std::vector<double> equal{0.3, 0.3, 0.3, 0.3};
  const std::vector<double> u(4, e1);
  for (double v : gumbel_softmax(equal, 1.0, u)) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  const std::vector<double> logits{0.1, 2.0, -1.0};
  const std::vector<double> u3(3, e1);
  const auto sharp = gumbel_softmax(logits, 0.01, u3);
  CHECK(sharp[1] >= 0.99);

  std::mt19937_64 eng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> l(5), uu(5);
    for (auto& v : l) v = 5.0 * g(eng);
    for (auto& v : uu) v = open_unit(eng);
    const auto p = gumbel_softmax(l, 0.3 + std::abs(g(eng)), uu);
    double s = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("gumbel_softmax rejects bad temperature and uniforms") {
  const std::vector<double> l{0.0, 1.0};
  const std::vector<double> u{0.5, 0.5};
  CHECK_THROWS_AS(gumbel_softmax(l, 0.0, u), std::domain_error);
  CHECK_THROWS_AS(gumbel_softmax(l, -1.0, u), std::domain_error);
  const std::vector<double> bad{0.0, 0.5};
  CHECK_THROWS_AS(gumbel_softmax(l, 1.0, bad), std::domain_error);
}

TEST_CASE("gumbel_softmax survives huge logits") {
  const std::vector<double> l{1e4, -1e4, 0.0};
  const std::vector<double> u{0.5, 0.5, 0.5};
  const auto p = gumbel_softmax(l, 0.5, u);
  CHECK(p[0] == doctest::Approx(1.0));
  for (double v : p) CHECK(std::isfinite(v));
}

}  // TEST_SUITE
