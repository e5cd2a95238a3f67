#include "geocert/oracle_suite.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "geocert/geometry.hpp"
#include "geocert/gradient.hpp"
#include "geocert/oracle.hpp"
#include "geocert/smoothing.hpp"
#include "geocert/stats.hpp"

namespace geocert {

namespace {

OracleCheck near(std::string name, double got, double want, double tol) {
  std::ostringstream os;
  os << std::setprecision(10) << "got " << got << ", expected " << want << " +- " << tol;
  return {std::move(name), std::abs(got - want) <= tol, os.str()};
}

OracleCheck guarded(std::string name, const std::function<OracleCheck()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<OracleCheck> run_oracle_checks() {
  std::vector<OracleCheck> out;

  out.push_back(guarded("normal_quantile(0.975)", [] {
    return near("normal_quantile(0.975)", normal_quantile(0.975), 1.95996398454005423552, 1e-9);
  }));
  out.push_back(guarded("chi_square_quantile(0.999, 1)", [] {
    return near("chi_square_quantile(0.999, 1)", chi_square_quantile(0.999, 1.0),
                10.827566170662733, 1e-8);
  }));
  out.push_back(guarded("two_sphere_radius worked case", [] {
    return near("two_sphere_radius worked case", two_sphere_radius(0.5, 0.3, 1.0, 0.9).value(),
                0.855131568824353484352, 1e-12);
  }));
  out.push_back(guarded("two_sphere_radius vs union oracle", [] {
    const std::vector<CertifiedBall> balls{{{-0.5, 0.0}, 1.0, 0}, {{0.3, 0.0}, 0.9, 0}};
    const Vec x1{0.0, 0.0};
    return near("two_sphere_radius vs union oracle",
                union_boundary_distance(x1, balls, std::nullopt, 100000),
                two_sphere_radius(0.5, 0.3, 1.0, 0.9).value(), 1e-3);
  }));
  out.push_back(guarded("boundary_radius worked case", [] {
    const Vec x1{0.9, 0.5};
    const Vec x2{0.8, 0.5};
    return near("boundary_radius worked case", boundary_radius(x1, x2, 0.5, DomainBox{2}),
                std::sqrt(0.22), 1e-12);
  }));
  out.push_back(guarded("boundary_radius vs union oracle", [] {
    const std::vector<CertifiedBall> balls{{{0.8, 0.5}, 0.5, 0}};
    const Vec x1{0.9, 0.5};
    return near("boundary_radius vs union oracle",
                union_boundary_distance(x1, balls, DomainBox{2}, 100000), std::sqrt(0.22), 1e-3);
  }));
  out.push_back(guarded("intersection_ring_radius", [] {
    return near("intersection_ring_radius", intersection_ring_radius(0.8, 1.0, 0.9),
                0.854925983638349829281, 1e-12);
  }));
  out.push_back(guarded("linear model: Cohen radius on exact expectations", [] {
    const LinearModel m{{0.6, -0.8, 0.3}, 0.1};
    const Vec x{0.2, 0.4, 0.9};
    const double e0 = linear_expectation_exact(m, x, 0.5);
    const double r = cohen_radius(std::max(e0, 1.0 - e0), std::min(e0, 1.0 - e0), 0.5);
    return near("linear model: Cohen radius on exact expectations", r,
                linear_certified_radius_exact(m, x), 1e-9);
  }));
  out.push_back(guarded("linear model: certify below exact radius", [] {
    const LinearModel m{{1.0, 0.5}, -0.6};
    const LinearClassifier f(m);
    const Vec x{0.7, 0.5};
    SmoothingConfig cfg;
    cfg.sigma = 0.25;
    cfg.n_samples = 10000;
    const CertifyOutcome oc = certify(f, x, cfg, RngStream(11));
    const double exact = linear_certified_radius_exact(m, x);
    std::ostringstream os;
    os << "certified " << oc.radius << " <= exact " << exact;
    return OracleCheck{"linear model: certify below exact radius",
                       !oc.abstained && oc.radius <= exact, os.str()};
  }));
  out.push_back(guarded("Goodman coverage p=[0.7,0.2,0.1]", [] {
    const double p[] = {0.7, 0.2, 0.1};
    const double cov = multinomial_coverage_sim(p, 1000, 0.001, 10000, RngStream(5));
    std::ostringstream os;
    os << "coverage " << cov << " >= 0.9987";
    return OracleCheck{"Goodman coverage p=[0.7,0.2,0.1]", cov >= 0.9987, os.str()};
  }));
  out.push_back(guarded("score gradient on threshold model", [] {
    const ThresholdClassifier f(0.5);
    const Vec x{0.3};
    const GradientEstimate g = score_gradient(f, x, 0, 0.5, 100000, RngStream(3));
    const double want = -normal_pdf((0.5 - 0.3) / 0.5) / 0.5;
    return near("score gradient on threshold model", g.vector[0], want, 0.05 * std::abs(want));
  }));

  return out;
}

bool print_oracle_table(std::ostream& os, const std::vector<OracleCheck>& checks) {
  bool all = true;
  for (const OracleCheck& c : checks) {
    all = all && c.passed;
    os << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(52) << c.name << c.detail
       << '\n';
  }
  os << (all ? "all oracle checks passed" : "some oracle checks failed") << '\n';
  return all;
}

}  // namespace geocert
