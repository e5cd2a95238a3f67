#include "geocert/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "geocert/errors.hpp"

namespace geocert {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

void SearchConfig::validate() const {
  if (!(gamma0 > 0.0)) throw ConfigError("search: gamma0 must be positive");
  if (s_grid < 5) throw ConfigError("search: s_grid must be at least 5");
  if (!(max_step > 0.0)) throw ConfigError("search: max_step must be positive");
  if (search_n_samples < 100 || final_n_samples < 100) {
    throw ConfigError("search: sample counts must be at least 100");
  }
  if (mode == GradientMode::finite_diff) {
    throw ConfigError("search: gradient mode must be approx or full");
  }
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::cohen:
      return "cohen";
    case Method::single:
      return "single";
    case Method::double_transitive:
      return "double";
    case Method::boundary:
      return "boundary";
  }
  return "?";
}

double bb_step(const std::optional<IteratePair>& prev, const IteratePair& cur, double gamma0) {
  double gamma = gamma0;
  if (prev) {
    const Vec dx = sub(cur.point, prev->point);
    const Vec dg = sub(cur.gradient, prev->gradient);
    const double denom = dot(dg, dg);
    const double q = std::abs(dot(dx, dg)) / denom;
    if (denom >= 1e-12 && std::isfinite(q)) gamma = q;
  }
  return std::clamp(gamma, 1e-6, 1.0);
}

AscentResult bubble_ascent(ProbeObjective& objective, std::span<const double> start,
                           const AscentOptions& opts, RngStream stream) {
  AscentResult out;
  out.best_point.assign(start.begin(), start.end());
  out.best_value = opts.incumbent_value;

  Vec probe(start.begin(), start.end());
  std::optional<IteratePair> prev;
  bool prev_branch = true;
  auto jitter = stream.engine();
  std::normal_distribution<double> gauss;

  for (std::size_t it = 0; it < opts.iterations; ++it) {
    ProbeStep step = objective.evaluate(probe, it);
    out.values.push_back(step.on_class ? step.value : kNegInf);
    out.iterations_used = it + 1;
    if (step.on_class && step.value > out.best_value) {
      out.best_value = step.value;
      out.best_point = probe;
      out.improved = true;
    }
    if (it + 1 == opts.iterations) break;

    if (prev && prev_branch != step.on_class) prev.reset();
    prev_branch = step.on_class;

    Vec move;
    const double gnorm = norm(step.ascent);
    if (!(gnorm >= 1e-12) || !std::isfinite(gnorm)) {
      move.resize(probe.size());
      for (double& v : move) v = gauss(jitter);
      const double len = norm(move);
      for (double& v : move) v *= opts.gamma0 / len;
      prev.reset();
    } else {
      IteratePair cur{probe, step.ascent};
      const double gamma = bb_step(prev, cur, opts.gamma0);
      move = scaled(step.ascent, gamma);
      const double len = gamma * gnorm;
      if (len > opts.max_step) {
        for (double& v : move) v *= opts.max_step / len;
      }
      prev = std::move(cur);
    }
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] += move[i];
    if (opts.domain) opts.domain->clip(probe);
  }
  return out;
}

namespace {

class SingleObjective : public ProbeObjective {
 public:
  SingleObjective(const Classifier& model, std::span<const double> x, std::size_t cls,
                  const SmoothingConfig& smoothing, GradientMode mode, RngStream stream)
      : model_(model), x_(x), cls_(cls), smoothing_(smoothing), mode_(mode), stream_(stream) {}

  ProbeStep evaluate(std::span<const double> probe, std::size_t iteration) override {
    const ProbeEvaluation ev =
        evaluate_probe(model_, probe, smoothing_, mode_, cls_, stream_.child(iteration));
    const CertifyOutcome& oc = ev.outcome;
    ProbeStep step;
    if (oc.abstained) {
      step.ascent = ev.incumbent_gradient;
      return step;
    }
    if (oc.predicted() != cls_) {
      step.ascent = scaled(ev.radius_gradient, -1.0);
      return step;
    }
    const Vec offset = sub(probe, x_);
    const double len = norm(offset);
    step.on_class = true;
    step.value = single_transitive_radius(oc.radius, len);
    step.ascent = ev.radius_gradient;
    if (len > 0.0) {
      for (std::size_t i = 0; i < offset.size(); ++i) step.ascent[i] -= offset[i] / len;
    }
    return step;
  }

 private:
  const Classifier& model_;
  std::span<const double> x_;
  std::size_t cls_;
  SmoothingConfig smoothing_;
  GradientMode mode_;
  RngStream stream_;
};

SmoothingConfig with_samples(const SmoothingConfig& base, std::size_t n) {
  SmoothingConfig c = base;
  c.n_samples = n;
  return c;
}

}  // namespace

SingleResult single_bubble_loop(const Classifier& model, std::span<const double> x, std::size_t cls,
                                double r_cohen, const SmoothingConfig& smoothing,
                                const SearchConfig& cfg, RngStream stream) {
  SingleObjective objective(model, x, cls, with_samples(smoothing, cfg.search_n_samples), cfg.mode,
                            stream.child(0));
  AscentOptions opts;
  opts.iterations = cfg.iterations;
  opts.gamma0 = cfg.gamma0;
  opts.max_step = cfg.max_step;
  opts.domain = DomainBox{x.size()};
  opts.incumbent_value = r_cohen;
  const AscentResult res = bubble_ascent(objective, x, opts, stream.child(1));

  SingleResult out;
  out.iterations_used = res.iterations_used;
  out.x2 = res.best_point;
  out.r_single = res.best_value;
  out.moved = res.improved && distance(res.best_point, x) > 0.0;
  if (!out.moved) {
    out.x2.assign(x.begin(), x.end());
    out.r_single = r_cohen;
  }
  return out;
}

std::optional<double> double_candidate(double d2, double r2, double d3, double r3) {
  if (!(d2 > 0.0 && d3 > 0.0 && d2 < r2 && d3 < r3)) return std::nullopt;
  const double span = d2 + d3;
  if (!(std::abs(r2 - r3) < span && span < r2 + r3)) return std::nullopt;
  // Nearest point of each sphere must lie inside the other ball, so that the
  // union boundary closest to x1 is the intersection ring.
  if (std::abs((r2 - d2) - d3) > r3) return std::nullopt;
  if (std::abs(d2 - (r3 - d3)) > r2) return std::nullopt;
  return two_sphere_radius(d2, d3, r2, r3);
}

DoubleResult double_transitive_search(const ProbeCertifier& certifier, std::span<const double> x1,
                                      std::span<const double> x2, double r_prime, std::size_t cls,
                                      const SearchConfig& cfg) {
  DoubleResult out;
  out.r_double = r_prime;
  const double d2 = distance(x1, x2);
  if (!(r_prime > 0.0) || !(d2 > 0.0)) return out;
  const double r2 = r_prime + d2;
  const DomainBox box{x1.size()};

  std::size_t evaluation = 0;
  auto value_at = [&](double s, Vec* x3_out, double* r3_out) -> double {
    Vec x3 = line_point(x1, x2, r_prime, s);
    Vec clipped = x3;
    box.clip(clipped);
    if (distance(clipped, x3) > 0.0) return kNegInf;
    const ProbeCertificate pc = certifier(x3, evaluation++);
    if (pc.abstained || pc.class_label != cls) return kNegInf;
    const auto r = double_candidate(d2, r2, distance(x3, x1), pc.radius);
    if (!r) return kNegInf;
    if (x3_out) *x3_out = std::move(x3);
    if (r3_out) *r3_out = pc.radius;
    return *r;
  };

  double best = kNegInf;
  double best_s = 0.0;
  Vec best_x3;
  double best_r3 = 0.0;
  auto consider = [&](double s) {
    Vec x3;
    double r3 = 0.0;
    const double v = value_at(s, &x3, &r3);
    if (v > best) {
      best = v;
      best_s = s;
      best_x3 = std::move(x3);
      best_r3 = r3;
    }
  };

  const double h = 1.0 / static_cast<double>(cfg.s_grid);
  for (std::size_t k = 1; k <= cfg.s_grid; ++k) consider(static_cast<double>(k) * h);

  if (best > kNegInf && cfg.golden_iterations > 0) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(best_s - h, 0.5 * h);
    double hi = std::min(best_s + h, 1.0);
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = value_at(a, nullptr, nullptr);
    double fb = value_at(b, nullptr, nullptr);
    for (std::size_t it = 0; it < cfg.golden_iterations; ++it) {
      if (fa >= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - ratio * (hi - lo);
        fa = value_at(a, nullptr, nullptr);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + ratio * (hi - lo);
        fb = value_at(b, nullptr, nullptr);
      }
    }
    consider(fa >= fb ? a : b);
  }

  out.evaluations = evaluation;
  if (best > r_prime) {
    out.r_double = best;
    out.x3 = std::move(best_x3);
    out.r3 = best_r3;
  }
  return out;
}

CertificationReport certify_geometric(const Classifier& model, std::span<const double> x,
                                      std::size_t label, const SmoothingConfig& smoothing,
                                      const SearchConfig& cfg, RngStream stream) {
  const auto t0 = std::chrono::steady_clock::now();
  CertificationReport rep;
  rep.label = label;

  const SmoothingConfig final_cfg = with_samples(smoothing, cfg.final_n_samples);
  const SmoothingConfig search_cfg = with_samples(smoothing, cfg.search_n_samples);
  const CertifyOutcome base = certify(model, x, final_cfg, stream.child(0));
  rep.predicted = base.predicted();
  rep.e0_lower = base.bounds.e0_lower;
  rep.e1_upper = base.bounds.e1_upper;
  rep.abstained = base.abstained;
  if (base.abstained) {
    rep.wall_time_ms = elapsed_ms(t0);
    return rep;
  }
  const std::size_t cls = base.predicted();
  rep.r_cohen = base.radius;
  rep.r_single = rep.r_double = rep.r_boundary = base.radius;

  // Single transitivity, with the winning probe re-certified on fresh noise.
  const auto t_single = std::chrono::steady_clock::now();
  const SingleResult single =
      single_bubble_loop(model, x, cls, base.radius, smoothing, cfg, stream.child(1));
  rep.iterations_used = single.iterations_used;
  std::optional<double> r2;
  if (single.moved) {
    const CertifyOutcome again = certify(model, single.x2, final_cfg, stream.child(2));
    if (!again.abstained && again.predicted() == cls) {
      r2 = again.radius;
      rep.x2_found = single.x2;
      const double d2 = distance(single.x2, x);
      rep.r_single = std::max(rep.r_cohen, single_transitive_radius(again.radius, d2));
    }
  }
  rep.single_ms = elapsed_ms(t_single);

  if (cfg.enable_double && r2 && rep.r_single > rep.r_cohen) {
    const auto t_double = std::chrono::steady_clock::now();
    const Vec& x2 = *rep.x2_found;
    const double r_prime = rep.r_single;
    const RngStream probes = stream.child(3);
    ProbeCertifier certifier = [&](std::span<const double> p, std::size_t k) {
      const CertifyOutcome oc = certify(model, p, search_cfg, probes.child(k));
      return ProbeCertificate{oc.predicted(), oc.radius, oc.abstained};
    };
    const DoubleResult dbl = double_transitive_search(certifier, x, x2, r_prime, cls, cfg);
    if (dbl.x3) {
      const CertifyOutcome again = certify(model, *dbl.x3, final_cfg, stream.child(4));
      if (!again.abstained && again.predicted() == cls) {
        const auto r = double_candidate(distance(x2, x), *r2, distance(*dbl.x3, x), again.radius);
        if (r && *r > rep.r_single) {
          rep.r_double = *r;
          rep.x3_found = dbl.x3;
        }
      }
    }
    rep.double_ms = elapsed_ms(t_double) + rep.single_ms;
  }
  rep.r_double = std::max(rep.r_double, rep.r_single);

  if (cfg.enable_boundary && r2) {
    const double b = boundary_radius(x, *rep.x2_found, *r2, DomainBox{x.size()});
    rep.r_boundary = std::max(rep.r_single, b);
  } else {
    rep.r_boundary = rep.r_single;
  }

  rep.r_best = rep.r_cohen;
  rep.best_method = Method::cohen;
  const std::pair<double, Method> candidates[] = {{rep.r_single, Method::single},
                                                  {rep.r_double, Method::double_transitive},
                                                  {rep.r_boundary, Method::boundary}};
  for (const auto& [r, m] : candidates) {
    if (r > rep.r_best) {
      rep.r_best = r;
      rep.best_method = m;
    }
  }
  if (!(rep.r_best >= rep.r_cohen)) {
    throw InvariantViolation("certify_geometric: best radius below the Cohen radius");
  }
  rep.wall_time_ms = elapsed_ms(t0);
  return rep;
}

}  // namespace geocert
