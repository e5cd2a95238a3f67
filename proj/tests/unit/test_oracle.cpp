#include <doctest.h>

#include <cmath>

#include "geocert/geometry.hpp"
#include "geocert/oracle.hpp"
#include "geocert/stats.hpp"

using namespace geocert;

TEST_SUITE("oracle") {

TEST_CASE("linear_expectation_exact examples") {
  const LinearModel m{{1.0, 0.0}, 0.0};
  const Vec on_plane{0.0, 0.7};
  CHECK(linear_expectation_exact(m, on_plane, 0.5) == doctest::Approx(0.5));
  const Vec x{0.5, 0.0};
  CHECK(linear_expectation_exact(m, x, 0.5) == doctest::Approx(normal_cdf(1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(linear_expectation_exact(LinearModel{{0.0, 0.0}, 1.0}, x, 0.5), std::invalid_argument);
}

TEST_CASE("linear_certified_radius_exact examples") {
  const LinearModel m{{3.0, 4.0}, 0.0};
  const Vec x{1.0, 0.0};
  CHECK(linear_certified_radius_exact(m, x) == doctest::Approx(0.6));
  const Vec on_plane{4.0, -3.0};
  CHECK(linear_certified_radius_exact(m, on_plane) == doctest::Approx(0.0).scale(1e-15));
}

TEST_CASE("Cohen radius on exact linear expectations is the boundary distance") {
  const LinearModel m{{0.3, -1.1, 0.7, 0.2}, 0.25};
  for (double sigma : {0.12, 0.5, 1.0}) {
    for (double shift : {0.01, 0.2, 0.6}) {
      Vec x{0.1, 0.4, 0.3, 0.8};
      const double z = dot(m.w, x) + m.b;
      x[0] += (shift - z) / m.w[0];
      const double e0 = linear_expectation_exact(m, x, sigma);
      const double r = cohen_radius(e0, 1.0 - e0, sigma);
      CHECK(std::abs(r - linear_certified_radius_exact(m, x)) < 1e-9);
    }
  }
}

TEST_CASE("linear classifier logits and gradient") {
  const LinearClassifier f(LinearModel{{2.0, -1.0}, 0.5});
  const Vec x{0.1, 0.3};
  Vec out(2), grad(2);
  f.logits(x, out);
  CHECK(out[0] == doctest::Approx(0.2));
  CHECK(out[1] == doctest::Approx(-0.2));
  const Vec seed{1.0, 0.0};
  f.input_gradient(x, seed, grad);
  CHECK(grad[0] == doctest::Approx(1.0));
  CHECK(grad[1] == doctest::Approx(-0.5));
}

TEST_CASE("union_boundary_distance of a single ball from its center") {
  const std::vector<CertifiedBall> two{{{0.3, 0.4}, 0.25, 0}};
  const Vec c2{0.3, 0.4};
  CHECK(union_boundary_distance(c2, two, std::nullopt, 10000) == doctest::Approx(0.25).epsilon(1e-9));
  const std::vector<CertifiedBall> three{{{0.3, 0.4, 0.5}, 0.25, 0}};
  const Vec c3{0.3, 0.4, 0.5};
  CHECK(union_boundary_distance(c3, three, std::nullopt, 10000) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("union_boundary_distance on the worked configurations") {
  const std::vector<CertifiedBall> pair{{{-0.5, 0.0}, 1.0, 0}, {{0.3, 0.0}, 0.9, 0}};
  const Vec o{0.0, 0.0};
  CHECK(std::abs(union_boundary_distance(o, pair, std::nullopt, 100000) - 0.855131568824353484352) < 1e-3);

  const std::vector<CertifiedBall> face{{{0.8, 0.5}, 0.5, 0}};
  const Vec x1{0.9, 0.5};
  CHECK(std::abs(union_boundary_distance(x1, face, DomainBox{2}, 100000) - std::sqrt(0.22)) < 1e-3);
}

TEST_CASE("union_boundary_distance shrinks when balls are removed") {
  const std::vector<CertifiedBall> all{{{0.0, 0.0, 0.0}, 1.0, 0}, {{0.6, 0.0, 0.0}, 0.8, 0}, {{0.2, 0.5, 0.0}, 0.7, 0}};
  const Vec x1{0.3, 0.1, 0.0};
  const double d3 = union_boundary_distance(x1, all, std::nullopt, 30000);
  const std::vector<CertifiedBall> two(all.begin(), all.begin() + 2);
  const double d2 = union_boundary_distance(x1, two, std::nullopt, 30000);
  const std::vector<CertifiedBall> one(all.begin(), all.begin() + 1);
  const double d1 = union_boundary_distance(x1, one, std::nullopt, 30000);
  CHECK(d3 >= d2 - 1e-6);
  CHECK(d2 >= d1 - 1e-6);
  CHECK(d1 == doctest::Approx(1.0 - norm(x1)).epsilon(1e-6));
}

TEST_CASE("union_boundary_distance is deterministic and converges with resolution") {
  const std::vector<CertifiedBall> pair{{{-0.4, 0.1, 0.0}, 0.9, 0}, {{0.35, -0.1, 0.2}, 0.7, 0}};
  const Vec x1{0.0, 0.0, 0.05};
  const double a = union_boundary_distance(x1, pair, std::nullopt, 5000);
  CHECK(a == union_boundary_distance(x1, pair, std::nullopt, 5000));
  const double b = union_boundary_distance(x1, pair, std::nullopt, 200000);
  CHECK(std::abs(a - b) < 1e-4);
}

TEST_CASE("union_boundary_distance input errors") {
  const std::vector<CertifiedBall> ball4{{{0.0, 0.0, 0.0, 0.0}, 1.0, 0}};
  const Vec x4(4, 0.0);
  CHECK_THROWS_AS(union_boundary_distance(x4, ball4, std::nullopt, 1000), std::invalid_argument);
  const std::vector<CertifiedBall> ball{{{0.0, 0.0}, 0.1, 0}};
  const Vec far{0.5, 0.5};
  CHECK_THROWS_AS(union_boundary_distance(far, ball, std::nullopt, 1000), std::domain_error);
}

TEST_CASE("multinomial_coverage_sim contracts") {
  const double p[] = {0.7, 0.2, 0.1};
  const double strict = multinomial_coverage_sim(p, 1000, 0.001, 2000, RngStream(1));
  const double loose = multinomial_coverage_sim(p, 1000, 0.5, 2000, RngStream(1));
  CHECK(loose < strict);
  CHECK(strict >= 0.99);

  const double with_zero[] = {0.6, 0.4, 0.0};
  CHECK_NOTHROW(multinomial_coverage_sim(with_zero, 1000, 0.001, 1000, RngStream(2)));
  const double bad[] = {0.6, 0.6};
  CHECK_THROWS_AS(multinomial_coverage_sim(bad, 1000, 0.001, 1000, RngStream(2)), std::invalid_argument);
}

}  // TEST_SUITE
