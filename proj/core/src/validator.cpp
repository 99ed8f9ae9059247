#include "thermo/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermo/csv.hpp"
#include "thermo/error.hpp"
#include "thermo/rng.hpp"

namespace thermo {

namespace {

struct DerivativeBound {
  double refined = 0.0;    // grid minimum polished by golden-section search
  double certified = 0.0;  // grid minimum minus the Lipschitz slack
};

DerivativeBound min_derivative_on_block(const MapModel& model, std::size_t b, int grid) {
  const Interval dom = model.block(b).domain;
  if (model.kind() == MapKind::PiecewiseLinear) {
    double s = model.derivative(b, dom.mid());
    return {s, s};
  }
  const double h = dom.length() / grid;
  double best = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i <= grid; ++i) {
    double v = model.derivative(b, dom.lo + i * h);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  double a = dom.lo + std::max(0, arg - 1) * h;
  double z = dom.lo + std::min(grid, arg + 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = z - g * (z - a), x2 = a + g * (z - a);
  double f1 = model.derivative(b, x1), f2 = model.derivative(b, x2);
  for (int it = 0; it < 80 && z - a > 1e-15; ++it) {
    if (f1 < f2) {
      z = x2;
      x2 = x1;
      f2 = f1;
      x1 = z - g * (z - a);
      f1 = model.derivative(b, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (z - a);
      f2 = model.derivative(b, x2);
    }
  }
  double refined = std::min({best, f1, f2});
  return {refined, best - 0.5 * h * model.derivative_lipschitz()};
}

Check check(double margin) { return {margin > 0.0, margin}; }

double estimate_tau(const MapModel& model, double c, double gamma, const ValidatorOptions& opt,
                    std::vector<std::string>& warnings) {
  Rng rng = make_stream(opt.seed, stream_tag("validator-tau"), 0);
  const std::size_t T = std::size_t(std::max(opt.tau_horizon, 1));
  double tau = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> itinerary(T);
  int used = 0;
  for (int r = 0; r < opt.tau_orbits; ++r) {
    itinerary[0] = std::size_t(rng() % model.size());
    for (std::size_t k = 1; k < T; ++k) {
      const auto& next = model.successors(itinerary[k - 1]);
      itinerary[k] = next[rng() % next.size()];
    }
    std::size_t visits = 0;
    for (std::size_t s : itinerary) visits += model.block(s).expanding ? 0 : 1;
    if (double(visits) > gamma * double(T)) continue;
    try {
      auto orbit = orbit_from_itinerary(model, itinerary, model.block(itinerary.back()).domain.mid());
      auto times = hyperbolic_times_along(model, orbit, c);
      tau = std::min(tau, double(times.size()) / double(T));
      ++used;
    } catch (const BoundaryPointError&) {
    }
  }
  if (used == 0) {
    warnings.push_back("no sampled orbit stays below the non-expanding frequency gamma; tau set to 0");
    return 0.0;
  }
  return tau;
}

}  // namespace

HypothesisReport validate_hypotheses(const MapModel& model, const Potential& phi, double alpha,
                                     const ValidatorOptions& opt) {
  if (model.size() == 0) throw ModelError("model has no blocks");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ModelError("Holder exponent must lie in (0, 1]");
  HypothesisReport r;
  r.alpha = alpha;
  r.q = model.q();
  r.deg = model.degree();
  r.osc = phi.oscillation();
  r.m = opt.m;
  auto& warn = r.warnings;

  // (H1)
  bool h1 = model.is_markov() && model.covering_time() > 0;
  r.H1 = {h1, h1 ? double(model.covering_time()) : 0.0};
  for (const auto& d : model.markov_defects()) warn.push_back("H1: " + d);
  if (model.covering_time() == 0) warn.push_back("H1: no iterate of some block covers the circle");

  // (H2): sigma over expanding blocks, L over all blocks
  double sigma = std::numeric_limits<double>::infinity(), sigma_cert = sigma;
  double min_all = std::numeric_limits<double>::infinity(), min_all_cert = min_all;
  for (std::size_t b = 0; b < model.size(); ++b) {
    auto d = min_derivative_on_block(model, b, opt.derivative_grid);
    r.derivative_resolution = std::max(r.derivative_resolution, d.refined - d.certified);
    min_all = std::min(min_all, d.refined);
    min_all_cert = std::min(min_all_cert, d.certified);
    if (model.block(b).expanding) {
      sigma = std::min(sigma, d.refined);
      sigma_cert = std::min(sigma_cert, d.certified);
    }
  }
  if (model.p() == 0) {
    sigma = sigma_cert = 1.0;
    warn.push_back("H2: no expanding block designated");
  }
  if (!(min_all_cert > 0.0)) throw ModelError("derivative bound is not positive");
  r.sigma = sigma;
  r.L = std::max(1.0, 1.0 / min_all);
  r.H2 = {model.p() > 0 && sigma_cert > 1.0, sigma_cert - 1.0};
  const double logL = std::log(r.L);
  const double logsig = std::log(sigma);
  const double logdeg = std::log(double(r.deg));
  const double logq = r.q > 0 ? std::log(double(r.q)) : 0.0;
  if (r.q == 0) warn.push_back("q = 0: log q terms skipped");

  // (H3a)
  r.H3a = check(logdeg - logq - r.osc);

  r.gamma = opt.gamma.value_or(0.7);
  if (opt.eps0) {
    r.eps0 = *opt.eps0;
  } else {
    r.eps0 = 0.5 * (logdeg - logq - r.osc);
    if (r.eps0 <= 0.0) {
      warn.push_back("default eps0 = 0.5 (log deg - log q - osc) is not positive; clamped to 0");
      r.eps0 = 0.0;
    }
  }
  const double c_hyp = ((1.0 - r.gamma) * logsig - r.gamma * logL) / 2.0;
  const double c_exp = (logdeg - logq - r.eps0) / alpha;
  r.c_max = std::min(c_hyp, c_exp);
  if (opt.c) {
    r.c = *opt.c;
  } else if (r.c_max > 0.0) {
    r.c = 0.9 * r.c_max;
  } else {
    r.c = c_hyp > 0.0 ? 0.9 * c_hyp : 0.05;
    warn.push_back("no c > 0 satisfies both relations; c = " + format_double(r.c));
  }

  const double lhs = -(1.0 - r.gamma) * logsig + r.gamma * logL;
  r.relation_L = check(std::min(-2.0 * r.c - lhs, 2.0 * r.c));
  r.relation_expansion = check(logdeg - logq - r.c * alpha - r.eps0);
  r.relation_osc = check(logdeg - logq - r.m * logL - r.osc);
  r.log_L_bound = logL * logL <= 2.0 * r.c * r.c;
  warn.push_back("m = " + format_double(r.m) + " is a free parameter of the oscillation relation");

  r.tau = estimate_tau(model, r.c, r.gamma, opt, warn);
  if (r.L > 1.0) {
    r.tau_lemma = 2.0 * r.c / logL;
    r.tau_consistent = r.tau >= r.tau_lemma;
    if (!r.tau_consistent) {
      warn.push_back("empirical tau " + format_double(r.tau) + " below 2c/log L = " +
                     format_double(r.tau_lemma));
    }
  }

  // (H3b)
  r.H3b = check(0.5 * (r.c * r.tau - logL) * alpha - r.osc);

  // admissible theta interval
  r.theta_lo = std::pow(r.L, alpha) / (r.deg * std::exp(2.0 * phi.inf() - phi.sup()));
  r.theta_hi = std::exp(r.c * r.tau * alpha) / (r.deg * std::exp(phi.sup()));
  r.star = {r.theta_lo < r.theta_hi, std::log(r.theta_hi / r.theta_lo)};
  if (r.L == 1.0) warn.push_back("L = 1: L^alpha > 1 cannot hold strictly; theta interval uses L = 1");
  if (opt.theta) {
    r.theta = *opt.theta;
    if (!(r.theta > r.theta_lo && r.theta < r.theta_hi))
      warn.push_back("theta override lies outside the admissible interval");
  } else if (r.star.holds) {
    r.theta = std::sqrt(r.theta_lo * r.theta_hi);
  } else {
    r.theta = 0.9 * r.theta_hi;
    warn.push_back("admissible theta interval is empty; theta = 0.9 theta_hi");
  }
  return r;
}

std::vector<std::pair<std::string, std::string>> HypothesisReport::rows() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  auto d = [](double v) { return format_double(v); };
  std::vector<std::pair<std::string, std::string>> out{
      {"sigma", d(sigma)},
      {"L", d(L)},
      {"derivative_resolution", d(derivative_resolution)},
      {"q", std::to_string(q)},
      {"deg", std::to_string(deg)},
      {"alpha", d(alpha)},
      {"osc", d(osc)},
      {"c", d(c)},
      {"c_max", d(c_max)},
      {"gamma", d(gamma)},
      {"tau", d(tau)},
      {"tau_lemma", d(tau_lemma)},
      {"tau_consistent", b(tau_consistent)},
      {"eps0", d(eps0)},
      {"m", d(m)},
      {"holds_H1", b(H1.holds)},
      {"margin_H1", d(H1.margin)},
      {"holds_H2", b(H2.holds)},
      {"margin_H2", d(H2.margin)},
      {"holds_H3a", b(H3a.holds)},
      {"margin_H3a", d(H3a.margin)},
      {"holds_H3b", b(H3b.holds)},
      {"margin_H3b", d(H3b.margin)},
      {"holds_relation_L", b(relation_L.holds)},
      {"margin_relation_L", d(relation_L.margin)},
      {"holds_relation_expansion", b(relation_expansion.holds)},
      {"margin_relation_expansion", d(relation_expansion.margin)},
      {"holds_relation_osc", b(relation_osc.holds)},
      {"margin_relation_osc", d(relation_osc.margin)},
      {"log_L_bound", b(log_L_bound)},
      {"holds_star", b(star.holds)},
      {"margin_star", d(star.margin)},
      {"theta_lo", d(theta_lo)},
      {"theta_hi", d(theta_hi)},
      {"theta", d(theta)},
  };
  for (const auto& w : warnings) out.emplace_back("warning", w);
  return out;
}

}  // namespace thermo
