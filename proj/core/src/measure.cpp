#include "thermo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thermo/error.hpp"

namespace thermo {

CylinderMeasure::CylinderMeasure(const CylinderTree& tree, int level, std::vector<double> weights,
                                 MeasureKind kind, double pressure)
    : tree_(&tree), level_(level), kind_(kind), pressure_(pressure) {
  if (weights.size() != tree.count(level)) throw DimensionError("weights do not match the level");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DimensionError("measure weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DimensionError("measure has zero total mass");
  for (auto& w : weights) w /= total;
  by_level_.resize(std::size_t(level));
  by_level_.back() = std::move(weights);
  for (int k = level - 1; k >= 1; --k) {
    const auto& fine = by_level_[std::size_t(k)];
    auto& coarse = by_level_[std::size_t(k - 1)];
    coarse.assign(tree.count(k), 0.0);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      double s = 0.0;
      for (std::size_t c = tree.child_begin(k, i); c < tree.child_end(k, i); ++c) s += fine[c];
      coarse[i] = s;
    }
  }
  const auto& w = by_level_.back();
  cdf_.resize(w.size());
  std::partial_sum(w.begin(), w.end(), cdf_.begin());
  for (auto& x : cdf_) x /= cdf_.back();
}

CylinderMeasure conformal_measure(const CylinderTree& tree, const SpectralData& s) {
  return CylinderMeasure(tree, s.level, s.nu, MeasureKind::Conformal, std::log(s.lambda));
}

CylinderMeasure equilibrium_measure(const CylinderTree& tree, const SpectralData& s) {
  std::vector<double> w(s.h.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = s.h[i] * s.nu[i];
  return CylinderMeasure(tree, s.level, std::move(w), MeasureKind::Equilibrium, std::log(s.lambda));
}

JacobianResult jacobian_check(const CylinderMeasure& nu, const Potential& phi,
                              const SpectralData& s, int level) {
  if (level < 2 || level > nu.level()) throw DimensionError("jacobian check needs 2 <= level <= measure level");
  const CylinderTree& tree = nu.tree();
  JacobianResult r;
  for (std::size_t a = 0; a < tree.count(level); ++a) {
    Interval iv = tree.interval(level, a);
    double lhs = nu.weight(level - 1, tree.shift(level, a));
    double rhs = s.lambda * std::exp(-phi(iv.mid())) * nu.weight(level, a);
    double rel = std::abs(lhs / rhs - 1.0);
    if (rel > r.max_rel_error) {
      r.max_rel_error = rel;
      r.worst_index = a;
    }
    r.osc_exp_phi = std::max(r.osc_exp_phi, std::exp(phi.sup_on(iv)) - std::exp(phi.inf_on(iv)));
  }
  return r;
}

double gibbs_ratio(const CylinderMeasure& nu, const Potential& phi, const SpectralData& s,
                   int level, std::size_t index, double y) {
  const CylinderTree& tree = nu.tree();
  const MapModel& model = tree.model();
  auto w = tree.word(level, index);
  double sum = 0.0;
  for (int j = 0; j < level; ++j) {
    sum += phi(y);
    y = wrap(model.lift(w[j], y));
  }
  double P = std::log(s.lambda);
  return nu.weight(level, index) / std::exp(-P * level + sum);
}

std::vector<GibbsRow> gibbs_sweep(const CylinderMeasure& nu, const Potential& phi,
                                  const SpectralData& s, int n_lo, int n_hi, double c) {
  const CylinderTree& tree = nu.tree();
  std::vector<GibbsRow> rows;
  double K = 0.0;
  for (int n = n_lo; n <= n_hi; ++n) {
    GibbsRow row;
    row.level = n;
    row.min_ratio = std::numeric_limits<double>::infinity();
    row.max_ratio = 0.0;
    auto status = hyperbolic_cylinders(tree, n, c);
    for (std::size_t i = 0; i < status.size(); ++i) {
      if (status[i] == HyperbolicStatus::No) continue;
      ++row.hyperbolic;
      if (status[i] == HyperbolicStatus::Approximate) ++row.approximate;
      Interval iv = tree.interval(n, i);
      for (double y : {iv.lo, iv.mid(), iv.hi}) {
        double g = gibbs_ratio(nu, phi, s, n, i, y);
        row.min_ratio = std::min(row.min_ratio, g);
        row.max_ratio = std::max(row.max_ratio, g);
      }
    }
    row.spread = row.hyperbolic ? row.max_ratio / row.min_ratio : 0.0;
    K = std::max(K, row.spread);
    row.K = K;
    rows.push_back(row);
  }
  return rows;
}

WeakGibbsTrace weak_gibbs_Kn(const MapModel& model, const Potential& phi, double P, double K,
                             std::span<const double> orbit, double c) {
  WeakGibbsTrace t;
  t.hyperbolic_times = hyperbolic_times_along(model, orbit, c);
  const int T = int(orbit.size());
  const double rate = P + phi.sup_abs();
  t.K_n.resize(std::size_t(T));
  std::size_t next = 0;
  int prev = 0;
  for (int n = 1; n <= T; ++n) {
    while (next < t.hyperbolic_times.size() && t.hyperbolic_times[next] <= n) {
      prev = t.hyperbolic_times[next];
      ++next;
    }
    // past the last observed hyperbolic time the gap is truncated at the horizon
    int upcoming = next < t.hyperbolic_times.size() ? t.hyperbolic_times[next] : T + 1;
    t.K_n[std::size_t(n - 1)] = K * std::exp(rate * double(upcoming - prev));
  }
  t.max_log_rate = 0.0;
  for (int n = std::max(1, T / 2); n <= T; ++n) {
    t.max_log_rate = std::max(t.max_log_rate, std::log(t.K_n[std::size_t(n - 1)]) / n);
  }
  return t;
}

std::size_t sample_cylinder(const CylinderMeasure& m, Rng& rng) {
  double u = uniform01(rng);
  auto cdf = m.cdf();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = std::size_t(it - cdf.begin());
  return std::min(i, cdf.size() - 1);
}

double sample_point(const CylinderMeasure& m, Rng& rng) {
  std::size_t i = sample_cylinder(m, rng);
  const CylinderTree& tree = m.tree();
  return tree.lo(m.level(), i) + uniform01(rng) * tree.diameter(m.level(), i);
}

double integrate(const CylinderMeasure& m, const Observable& g) {
  const CylinderTree& tree = m.tree();
  auto w = m.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += g(tree.interval(m.level(), i).mid()) * w[i];
  return s;
}

double integrate(const CylinderMeasure& m, const Observable& g, int quad) {
  const CylinderTree& tree = m.tree();
  auto w = m.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double lo = tree.lo(m.level(), i), d = tree.diameter(m.level(), i), a = 0.0;
    for (int k = 0; k < quad; ++k) a += g(lo + d * (k + 0.5) / quad);
    s += a / quad * w[i];
  }
  return s;
}

}  // namespace thermo
