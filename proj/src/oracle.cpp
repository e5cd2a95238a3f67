#include "geocert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "geocert/stats.hpp"

namespace geocert {

LinearClassifier::LinearClassifier(LinearModel m) : m_(std::move(m)) {
  if (m_.w.empty()) throw std::invalid_argument("LinearClassifier: empty weight vector");
}

void LinearClassifier::logits(std::span<const double> x, std::span<double> out) const {
  const double z = dot(m_.w, x) + m_.b;
  out[0] = 0.5 * z;
  out[1] = -0.5 * z;
}

void LinearClassifier::input_gradient(std::span<const double>, std::span<const double> seed,
                                      std::span<double> out) const {
  const double c = 0.5 * (seed[0] - seed[1]);
  for (std::size_t i = 0; i < m_.w.size(); ++i) out[i] = c * m_.w[i];
}

ConstantClassifier::ConstantClassifier(std::size_t dim, std::size_t classes, std::size_t cls)
    : dim_(dim), classes_(classes), cls_(cls) {
  if (classes < 2 || cls >= classes) throw std::invalid_argument("ConstantClassifier: bad class");
}

void ConstantClassifier::logits(std::span<const double>, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[cls_] = 1.0;
}

void ConstantClassifier::input_gradient(std::span<const double>, std::span<const double>,
                                        std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void ThresholdClassifier::logits(std::span<const double> x, std::span<double> out) const {
  out[0] = x[0] < t_ ? 1.0 : 0.0;
  out[1] = 1.0 - out[0];
}

namespace {

double weight_norm(const LinearModel& m) {
  const double n = norm(m.w);
  if (!(n > 0.0)) throw std::invalid_argument("linear model: zero weight vector");
  return n;
}

}  // namespace

double linear_expectation_exact(const LinearModel& m, std::span<const double> x, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("linear_expectation_exact: sigma must be positive");
  return normal_cdf((dot(m.w, x) + m.b) / (sigma * weight_norm(m)));
}

double linear_certified_radius_exact(const LinearModel& m, std::span<const double> x) {
  return std::abs(dot(m.w, x) + m.b) / weight_norm(m);
}

namespace {

struct Candidate {
  double dist;
  std::size_t ball;
  Vec dir;  // unit vector from the ball center
};

class UnionSurface {
 public:
  UnionSurface(std::span<const double> x1, std::span<const CertifiedBall> balls,
               const std::optional<DomainBox>& domain)
      : x1_(x1), balls_(balls), domain_(domain), point_(x1.size()) {}

  // Distance from x1 to center_i + r_i * dir, or +inf when the point is
  // strictly inside another ball or outside the box.
  double eval(std::size_t i, std::span<const double> dir) {
    const CertifiedBall& b = balls_[i];
    for (std::size_t k = 0; k < point_.size(); ++k) point_[k] = b.center[k] + b.radius * dir[k];
    if (domain_ && !domain_->contains(point_)) return kInf;
    for (std::size_t j = 0; j < balls_.size(); ++j) {
      if (j != i && distance(point_, balls_[j].center) < balls_[j].radius) return kInf;
    }
    return distance(point_, x1_);
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();

 private:
  std::span<const double> x1_;
  std::span<const CertifiedBall> balls_;
  const std::optional<DomainBox>& domain_;
  Vec point_;
};

// Orthonormal basis of the tangent space at unit vector u (d = 2 or 3).
std::vector<Vec> tangents(const Vec& u) {
  if (u.size() == 2) return {Vec{-u[1], u[0]}};
  Vec a = std::abs(u[0]) < 0.9 ? Vec{1.0, 0.0, 0.0} : Vec{0.0, 1.0, 0.0};
  Vec t1 = axpy(a, -dot(a, u), u);
  t1 = scaled(t1, 1.0 / norm(t1));
  Vec t2{u[1] * t1[2] - u[2] * t1[1], u[2] * t1[0] - u[0] * t1[2], u[0] * t1[1] - u[1] * t1[0]};
  return {t1, t2};
}

Vec sphere_direction(std::size_t d, std::size_t k, std::size_t m) {
  const double t = static_cast<double>(k) + 0.5;
  if (d == 2) {
    const double th = 2.0 * std::numbers::pi * t / static_cast<double>(m);
    return {std::cos(th), std::sin(th)};
  }
  const double z = 1.0 - 2.0 * t / static_cast<double>(m);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = std::numbers::pi * (3.0 - std::sqrt(5.0)) * static_cast<double>(k);
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

}  // namespace

double union_boundary_distance(std::span<const double> x1, std::span<const CertifiedBall> balls,
                               const std::optional<DomainBox>& domain, std::size_t resolution) {
  const std::size_t d = x1.size();
  if (d != 2 && d != 3) throw std::invalid_argument("union_boundary_distance: only d = 2 or 3");
  if (balls.empty()) throw std::invalid_argument("union_boundary_distance: no balls");
  if (resolution < balls.size()) throw std::invalid_argument("union_boundary_distance: resolution too small");
  bool inside = false;
  for (const CertifiedBall& b : balls) {
    if (b.center.size() != d) throw std::invalid_argument("union_boundary_distance: dimension mismatch");
    inside = inside || distance(x1, b.center) <= b.radius;
  }
  if (!inside) throw std::domain_error("union_boundary_distance: x1 lies outside the union");

  UnionSurface surface(x1, balls, domain);
  const std::size_t per_ball = resolution / balls.size();
  constexpr std::size_t kKeep = 16;
  std::vector<Candidate> best;

  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t k = 0; k < per_ball; ++k) {
      Vec dir = sphere_direction(d, k, per_ball);
      const double v = surface.eval(i, dir);
      if (!std::isfinite(v)) continue;
      if (best.size() < kKeep || v < best.back().dist) {
        Candidate c{v, i, std::move(dir)};
        best.insert(std::upper_bound(best.begin(), best.end(), c,
                                     [](const Candidate& a, const Candidate& b) {
                                       return a.dist < b.dist;
                                     }),
                    std::move(c));
        if (best.size() > kKeep) best.pop_back();
      }
    }
  }
  if (best.empty()) return UnionSurface::kInf;

  // Local pattern search on the sphere around each candidate, shrinking the
  // step from the sampling spacing down to well below the tolerance.
  const double spacing =
      d == 2 ? 2.0 * std::numbers::pi / static_cast<double>(per_ball)
             : std::sqrt(4.0 * std::numbers::pi / static_cast<double>(per_ball));
  double answer = best.front().dist;
  for (Candidate c : best) {
    double step = 2.0 * spacing;
    while (step > 1e-10) {
      bool moved = false;
      const std::vector<Vec> ts = tangents(c.dir);
      constexpr int kSpan = 4;
      const int lo = -kSpan;
      const int hi = kSpan;
      for (int a = lo; a <= hi; ++a) {
        for (int b = (d == 3 ? lo : 0); b <= (d == 3 ? hi : 0); ++b) {
          if (a == 0 && b == 0) continue;
          Vec dir = axpy(c.dir, step * a / kSpan, ts[0]);
          if (d == 3) dir = axpy(dir, step * b / kSpan, ts[1]);
          dir = scaled(dir, 1.0 / norm(dir));
          const double v = surface.eval(c.ball, dir);
          if (v < c.dist) {
            c.dist = v;
            c.dir = std::move(dir);
            moved = true;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    answer = std::min(answer, c.dist);
  }
  return answer;
}

double multinomial_coverage_sim(std::span<const double> p, std::uint64_t n, double alpha,
                                std::size_t trials, RngStream stream) {
  if (p.size() < 2) throw std::invalid_argument("multinomial_coverage_sim: need two classes");
  if (trials == 0) throw std::invalid_argument("multinomial_coverage_sim: trials must be positive");
  double total_p = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("multinomial_coverage_sim: negative probability");
    total_p += v;
  }
  if (std::abs(total_p - 1.0) > 1e-9) {
    throw std::invalid_argument("multinomial_coverage_sim: probabilities must sum to 1");
  }

  auto eng = stream.engine();
  std::size_t covered = 0;
  std::vector<std::uint64_t> counts(p.size());
  for (std::size_t t = 0; t < trials; ++t) {
    // Sequential conditional binomials.
    std::uint64_t left = n;
    double mass = 1.0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      const double q = mass > 0.0 ? std::clamp(p[j] / mass, 0.0, 1.0) : 0.0;
      std::binomial_distribution<std::uint64_t> bin(left, q);
      counts[j] = bin(eng);
      left -= counts[j];
      mass -= p[j];
    }
    counts.back() = left;

    const CoalescedCounts cc = coalesce_classes(ClassCounts::from(counts));
    if (cc.size() < 2) continue;  // no intervals can be formed; counted as not covered
    const std::vector<Interval> iv = goodman_bounds(cc, alpha);
    bool ok = true;
    for (std::size_t c = 0; c < cc.size() && ok; ++c) {
      double truth = 0.0;
      if (cc.source_class[c] == kMetaClass) {
        for (std::size_t j : cc.meta_members) truth += p[j];
      } else {
        truth = p[cc.source_class[c]];
      }
      ok = truth >= iv[c].lower && truth <= iv[c].upper;
    }
    if (ok) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(trials);
}

}  // namespace geocert
