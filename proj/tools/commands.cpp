#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>

#include "thermo/thermo.hpp"

#ifndef THERMO_VERSION
#define THERMO_VERSION "unknown"
#endif

namespace thermo::cli {

namespace fs = std::filesystem;

void Context::verdict(std::string criterion, double value, double threshold, bool pass) {
  verdicts.push_back({std::move(criterion), value, threshold, pass});
}

void Context::emit(const std::string& name, const CsvTable& table) {
  table.write(rc.out / name);
  artifacts.push_back(name);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "validate", "cylinders", "spectrum", "correlations", "lasota-yorke", "gibbs",
      "hitting",  "returns",   "clt",      "fluctuations", "report"};
  return names;
}

namespace {

struct Bench {
  std::unique_ptr<CylinderTree> tree;
  TransferMatrix m;
  SpectralData s;
  std::unique_ptr<CylinderMeasure> nu, mu;

  Bench(const MapModel& model, const Potential& phi, int level) {
    tree = std::make_unique<CylinderTree>(model);
    tree->build_to(level);
    m = assemble(*tree, phi, level);
    s = leading_spectrum(m);
    nu = std::make_unique<CylinderMeasure>(conformal_measure(*tree, s));
    mu = std::make_unique<CylinderMeasure>(equilibrium_measure(*tree, s));
  }
};

std::string word_of(const CylinderTree& tree, int n, std::size_t i) {
  return tree.cylinder(n, i).word_string();
}

// seeded choice of k distinct entries, returned in increasing order
std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t k, std::uint64_t seed,
                                std::string_view tag) {
  Rng rng = make_stream(seed, stream_tag(tag), pool.size());
  for (std::size_t i = 0; i < pool.size() && i < k; ++i)
    std::swap(pool[i], pool[i + std::size_t(rng() % (pool.size() - i))]);
  pool.resize(std::min(k, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

double entropy_ref(const Bench& b, const Potential& phi) {
  return pressure(b.s) - integrate(*b.mu, Observable::from_potential(phi), 8);
}

std::vector<int> n_values(const RunConfig& rc, std::vector<int> fallback) {
  std::vector<int> v = rc.n_list.empty() ? std::move(fallback) : rc.n_list;
  v.erase(std::remove_if(v.begin(), v.end(), [](int n) { return n < 1; }), v.end());
  return v;
}

int cmd_validate(Context& ctx, const MapModel& model, const Potential& phi) {
  auto r = validate_hypotheses(model, phi, phi.alpha(), ctx.rc.validator);
  CsvTable t({"key", "value"});
  for (const auto& [k, v] : r.rows()) t.add_row({k, v});
  ctx.emit("validate.csv", t);
  ctx.verdict("H1", r.H1.margin, 0.0, r.H1.holds);
  ctx.verdict("H2", r.H2.margin, 0.0, r.H2.holds);
  ctx.verdict("H3a", r.H3a.margin, 0.0, r.H3a.holds);
  ctx.verdict("H3b", r.H3b.margin, 0.0, r.H3b.holds);
  ctx.verdict("theta_interval", r.star.margin, 0.0, r.star.holds);
  return 0;
}

int cmd_cylinders(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  auto rep = validate_hypotheses(model, phi, phi.alpha(), rc.validator);
  CylinderTree tree(model);
  const int n = rc.level;
  tree.build_to(n);
  auto B = classify_B(tree, n, rep.gamma);
  std::vector<char> inB(tree.count(n), 0);
  for (auto i : B.members) inB[i] = 1;
  auto hyp = hyperbolic_cylinders(tree, n, rep.c);
  std::vector<char> srf(tree.count(n), 0);
  for (auto i : short_return_free(tree, n, rc.zeta)) srf[i] = 1;
  CsvTable t({"index", "word", "lo", "hi", "diameter", "in_B", "hyperbolic", "short_return_free"});
  double total = 0.0;
  for (std::size_t i = 0; i < tree.count(n); ++i) {
    const char* h = hyp[i] == HyperbolicStatus::Certified     ? "certified"
                    : hyp[i] == HyperbolicStatus::Approximate ? "approximate"
                                                              : "no";
    t.add_row({i, word_of(tree, n, i), tree.lo(n, i), tree.hi(n, i), tree.diameter(n, i), bool(inB[i]), h,
               bool(srf[i])});
    total += tree.diameter(n, i);
  }
  ctx.emit("cylinders_L" + std::to_string(n) + ".csv", t);

  CsvTable d({"level", "count", "count_B", "max_diameter", "mean_diameter", "max_diameter_good",
              "mean_diameter_good", "max_diameter_B", "bound", "bound_holds"});
  bool all = true;
  for (const auto& r : diameter_stats(tree, std::min(rc.level_lo, n), n, rep.gamma, rep.c, rep.tau)) {
    d.add_row({r.level, r.count, r.count_bad, r.max_all, r.mean_all, r.max_good, r.mean_good, r.max_bad,
               r.bound, r.bound_holds});
    all = all && r.bound_holds;
  }
  ctx.emit("diameters.csv", d);
  double card = double(model.size()) * std::pow(double(model.degree()), n);
  ctx.verdict("partition_length", std::abs(total - 1.0), 1e-9, std::abs(total - 1.0) <= 1e-9);
  ctx.verdict("cardinality_bound", double(tree.count(n)), card, double(tree.count(n)) <= card);
  ctx.verdict("diameter_bound", all ? 1.0 : 0.0, 1.0, all);
  return 0;
}

int cmd_spectrum(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  CylinderTree tree(model);
  CsvTable t({"level", "dim", "lambda", "lambda_lo", "lambda_hi", "pressure", "gap_xi", "gap_method",
              "residual_right", "residual_left", "iterations"});
  std::vector<double> lambdas;
  SpectralData top;
  double gap_top = 0.0;
  for (int n = std::min(rc.level_lo, rc.level); n <= rc.level; ++n) {
    tree.build_to(n);
    auto m = assemble(tree, phi, n);
    auto s = leading_spectrum(m);
    auto g = spectral_gap(m, s, 1e-9, 1024);
    t.add_row({n, m.dim, s.lambda, s.lambda_lo, s.lambda_hi, pressure(s), g.xi, g.method, s.residual_right,
               s.residual_left, s.iterations});
    lambdas.push_back(s.lambda);
    if (n == rc.level) {
      top = s;
      gap_top = g.xi;
    }
  }
  ctx.emit("spectrum.csv", t);
  CsvTable w({"index", "word", "nu", "mu", "h"});
  const int n = rc.level;
  for (std::size_t i = 0; i < top.h.size(); ++i)
    w.add_row({i, word_of(tree, n, i), top.nu[i], top.h[i] * top.nu[i], top.h[i]});
  ctx.emit("measure.csv", w);
  double lo = model.degree() * std::exp(phi.inf()), hi = model.degree() * std::exp(phi.sup());
  bool bracket = top.lambda >= lo * (1 - 1e-12) && top.lambda <= hi * (1 + 1e-12);
  ctx.verdict("lambda_bracket", top.lambda, hi, bracket);
  ctx.verdict("gap_below_one", gap_top, 1.0, gap_top < 1.0);
  if (lambdas.size() >= 5) {
    std::vector<double> diffs;
    for (std::size_t k = 0; k + 2 < lambdas.size(); k += 2) diffs.push_back(std::abs(lambdas[k + 2] - lambdas[k]));
    bool shrinking = true;
    for (std::size_t k = 1; k < diffs.size(); ++k) shrinking = shrinking && diffs[k] <= diffs[k - 1] + 1e-13;
    ctx.verdict("resolution_consistency", diffs.back(), diffs.front(), shrinking);
  }
  return 0;
}

int cmd_correlations(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  Bench b(model, phi, rc.level);
  auto obs = build_observable(rc, phi, *b.tree);
  auto vals = sample_cell_average(*b.tree, rc.level, obs, 8);
  auto corr = operator_correlation(b.m, b.s, vals, vals, 40);
  auto gap = spectral_gap(b.m, b.s, 1e-9, 1024);
  CsvTable t({"n", "C_n"});
  for (std::size_t k = 0; k < corr.n.size(); ++k) t.add_row({corr.n[k], corr.c[k]});
  ctx.emit("correlations.csv", t);
  CsvTable s({"C", "xi_fit", "r2", "exact_independence", "gap_xi"});
  s.add_row({corr.C, corr.xi_fit, corr.r2, corr.exact_independence, gap.xi});
  ctx.emit("correlations_summary.csv", s);
  bool ok = corr.exact_independence || corr.xi_fit <= gap.xi + 0.05;
  ctx.verdict("decay_within_gap", corr.xi_fit, gap.xi + 0.05, ok);
  return 0;
}

int cmd_lasota_yorke(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  auto rep = validate_hypotheses(model, phi, phi.alpha(), rc.validator);
  Bench b(model, phi, rc.level);
  const int N = rc.level;
  auto vw = variation_weights(*b.tree, phi, N - 1);
  std::vector<std::vector<double>> g;
  g.push_back(std::vector<double>(b.m.dim, 1.0));
  g.push_back(sample_midpoints(*b.tree, N, Observable::function([](double x) { return std::cos(kTwoPi * x); })));
  const int k = std::min(3, N - 1);
  for (std::size_t q = 0; q < b.tree->count(k); ++q) {
    std::vector<double> ind(b.m.dim, 0.0);
    auto [lo, hi] = b.tree->descendants(k, q, N);
    for (std::size_t i = lo; i < hi; ++i) ind[i] = 1.0;
    g.push_back(std::move(ind));
  }
  auto fit = lasota_yorke_check(b.m, b.s, *b.tree, vw, rep.theta, g, 1, rc.ly_n_hi);
  CsvTable t({"sample", "n", "var_g", "var_iterate", "l1_norm", "ratio", "envelope", "holds"});
  for (const auto& r : fit.rows)
    t.add_row({r.sample, r.n, r.var_g, r.var_iterate, r.l1_norm, r.ratio, r.envelope, r.holds});
  ctx.emit("lasota_yorke.csv", t);
  CsvTable s({"theta", "D1", "xi1", "D2", "r2", "points"});
  s.add_row({rep.theta, fit.D1, fit.xi1, fit.D2, fit.r2, fit.points});
  ctx.emit("lasota_yorke_fit.csv", s);
  ctx.verdict("xi1_below_one", fit.xi1, 1.0, fit.pass);
  return 0;
}

int cmd_gibbs(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  auto rep = validate_hypotheses(model, phi, phi.alpha(), rc.validator);
  Bench b(model, phi, rc.level);
  const int lo = std::min(rc.level_lo, rc.level);
  auto rows = gibbs_sweep(*b.nu, phi, b.s, lo, rc.level, rep.c);
  CsvTable t({"level", "hyperbolic", "approximate", "min_ratio", "max_ratio", "spread", "K"});
  for (const auto& r : rows) t.add_row({r.level, r.hyperbolic, r.approximate, r.min_ratio, r.max_ratio, r.spread, r.K});
  ctx.emit("gibbs.csv", t);

  CsvTable j({"level", "max_rel_error", "osc_exp_phi", "worst_index"});
  CsvTable d({"level", "max_nu", "nu_B"});
  std::vector<double> xs, ys;
  for (int n = std::max(2, lo); n <= rc.level; ++n) {
    auto jc = jacobian_check(*b.nu, phi, b.s, n);
    j.add_row({n, jc.max_rel_error, jc.osc_exp_phi, jc.worst_index});
    auto w = b.nu->level_weights(n);
    double mx = *std::max_element(w.begin(), w.end());
    auto B = classify_B(*b.tree, n, rep.gamma, b.nu.get());
    d.add_row({n, mx, B.measure});
    xs.push_back(n);
    ys.push_back(std::log(mx));
  }
  ctx.emit("jacobian.csv", j);
  ctx.emit("nu_decay.csv", d);

  // weak Gibbs constants and hyperbolic-time ratios along mu-typical orbits
  OrbitSampler sampler(*b.mu);
  const int T = 64;
  const std::size_t orbits = std::size_t(std::min<long>(rc.samples, 1000));
  std::vector<int> above(T + 1, 0);
  std::vector<double> ratios;
  const double K = rows.empty() ? 1.0 : std::max(rows.back().K, 1.0);
  for (std::size_t i = 0; i < orbits; ++i) {
    Rng rng = make_stream(rc.seed, stream_tag("weak-gibbs"), i);
    std::vector<std::uint32_t> states;
    sampler.run(sampler.draw_state(rng), T, rng, states);
    auto x = sampler.points(states, rng);
    auto tr = weak_gibbs_Kn(model, phi, pressure(b.s), K, x, rep.c);
    for (int n = 1; n <= T; ++n)
      if (tr.K_n[std::size_t(n - 1)] >= std::pow(double(n), rc.a)) ++above[std::size_t(n)];
    if (tr.hyperbolic_times.size() >= 21) ratios.push_back(double(tr.hyperbolic_times[20]) / tr.hyperbolic_times[19]);
  }
  CsvTable k({"n", "fraction_K_n_above_n_pow_a"});
  for (int n = 1; n <= T; ++n) k.add_row({n, double(above[std::size_t(n)]) / double(orbits)});
  ctx.emit("weak_gibbs.csv", k);

  if (rows.size() >= 2) {
    double ratio = rows.back().K / rows[std::min<std::size_t>(rows.size() - 1, 4)].K;
    ctx.verdict("K_stability", ratio, 1.5, ratio < 1.5);
  }
  if (xs.size() >= 3) {
    auto lf = linear_fit(xs, ys);
    ctx.verdict("nu_decay_rate", -lf.slope, 0.0, -lf.slope > 0.0 && lf.r2 > 0.99);
  }
  double f20 = double(above[20]) / double(orbits);
  ctx.verdict("weak_gibbs_fraction_n20", f20, 0.05, f20 < 0.05);
  if (!ratios.empty()) {
    double med = median(ratios);
    ctx.verdict("non_lacunary_median_ratio", med, 1.2, med < 1.2);
  }
  return 0;
}

int cmd_hitting(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  const int n = rc.n;
  Bench b(model, phi, std::max(rc.level, n + 2));
  OrbitSampler sampler(*b.mu);
  auto targets = choose(short_return_free(*b.tree, n, rc.zeta), std::size_t(rc.cylinders), rc.seed, "hitting-targets");
  CsvTable h({"target", "word", "mu", "kac_product", "kac_se", "kac_pass", "censored", "ks", "ks_lo", "ks_hi"});
  CsvTable sv({"target", "t", "G", "exp_minus_t"});
  std::vector<double> ks;
  bool kac_all = true;
  for (std::size_t q : targets) {
    auto ret = run_hitting(sampler, n, q, std::size_t(rc.samples), rc.t_max, StartLaw::Conditioned, rc.seed);
    KacResult kac;
    try {
      kac = kac_check(ret);
    } catch (const CensoringError& e) {
      kac.pass = false;
      kac.product = std::nan("");
      std::fprintf(stderr, "warning: %s\n", e.what());
    }
    auto hit = run_hitting(sampler, n, q, std::size_t(rc.samples), rc.t_max, StartLaw::Measure, rc.seed);
    auto law = hitting_law(hit, 0.05, rc.bootstrap, rc.seed);
    h.add_row({q, word_of(*b.tree, n, q), hit.mu_target, kac.product, kac.se, kac.pass, hit.censored, law.ks,
               law.ci.lo, law.ci.hi});
    for (std::size_t k = 0; k < law.t.size(); ++k) sv.add_row({q, law.t[k], law.G[k], law.reference[k]});
    ks.push_back(law.ks);
    kac_all = kac_all && kac.pass;
  }
  ctx.emit("hitting.csv", h);
  ctx.emit("survival.csv", sv);

  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(0.1 * k);
  CsvTable p({"target", "t", "probability", "se", "margin"});
  bool pac_all = true;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t q : targets) {
    std::size_t E[] = {q};
    auto r = pac_bound_check(sampler, n, E, grid, std::size_t(rc.samples), rc.seed);
    for (std::size_t k = 0; k < r.t.size(); ++k) p.add_row({q, r.t[k], r.p[k], r.se[k], r.margin[k]});
    pac_all = pac_all && r.pass;
    worst = std::min(worst, r.worst_margin);
  }
  ctx.emit("pac.csv", p);
  ctx.verdict("kac_all_targets", double(targets.size()), double(targets.size()), kac_all && !targets.empty());
  ctx.verdict("pac_bound", worst, 0.0, pac_all);
  if (!ks.empty()) ctx.verdict("median_ks", median(ks), 0.05, median(ks) <= 0.05);
  return 0;
}

int cmd_returns(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  auto ns = n_values(rc, {rc.n - 4, rc.n - 2, rc.n});
  if (ns.empty()) throw ConfigError("no valid return-time levels");
  const int n_max = *std::max_element(ns.begin(), ns.end());
  Bench b(model, phi, std::max(rc.level, n_max + 2));
  OrbitSampler sampler(*b.mu);
  const double h = entropy_ref(b, phi);
  auto ow = ornstein_weiss(sampler, ns, std::size_t(rc.samples), h, rc.cap_factor, rc.seed);
  CsvTable t({"n", "mean_log_R_over_n", "se", "censored", "h_ref"});
  for (const auto& r : ow.rows) t.add_row({r.n, r.mean, r.se, r.censored, h});
  ctx.emit("returns.csv", t);
  CsvTable g({"n", "t_n", "p_return", "p_hitting", "gap", "se", "hypothesis_ok"});
  std::vector<double> gaps;
  double last_se = 0.0;
  for (int n : ns) {
    auto r = hitting_vs_return_gap(sampler, n, std::exp(n * h), std::size_t(rc.samples), rc.seed);
    g.add_row({r.n, r.t_n, r.p_return, r.p_hitting, r.gap, r.se, r.hypothesis_ok});
    gaps.push_back(r.gap);
    last_se = r.se;
  }
  ctx.emit("gap.csv", g);
  double diff = std::abs(ow.rows.back().mean - h);
  ctx.verdict("ornstein_weiss_last_n", diff, 0.03, diff < 0.03);
  // a trend cannot be resolved once the gap is within Monte Carlo noise
  bool trend = strictly_decreasing(gaps) || gaps.back() <= 3.0 * last_se;
  ctx.verdict("gap_decreasing", gaps.back(), 0.05, trend && gaps.back() < 0.05);
  return 0;
}

int cmd_clt(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  Bench b(model, phi, rc.level);
  auto obs = build_observable(rc, phi, *b.tree);
  auto vals = sample_cell_average(*b.tree, rc.level, obs, 8);
  auto var = asymptotic_variance(b.m, b.s, vals, rc.lag_max);
  OrbitSampler sampler(*b.mu);
  const double mean = integrate(*b.mu, obs, 8);
  cross_check_variance(var, sampler, obs, mean, 1000, std::size_t(std::min<long>(rc.samples, 2000)), rc.seed);
  CsvTable v({"lag", "term"});
  for (std::size_t j = 0; j < var.terms.size(); ++j) v.add_row({j, var.terms[j]});
  ctx.emit("variance.csv", v);
  CsvTable s({"mean", "sigma2", "truncation", "sigma2_batch", "sigma2_batch_se", "disagree"});
  s.add_row({mean, var.sigma2, var.truncation, var.sigma2_mc, var.sigma2_mc_se, var.disagree});
  ctx.emit("variance_summary.csv", s);
  const auto& ns = rc.clt_lengths;
  CsvTable t({"n", "samples", "ks"});
  std::vector<double> ks;
  for (int n : ns) {
    auto r = clt_check(sampler, obs, mean, var.sigma2, n, std::size_t(rc.samples), rc.seed);
    t.add_row({n, rc.samples, r.ks});
    ks.push_back(r.ks);
  }
  ctx.emit("clt.csv", t);
  ctx.verdict("variance_methods_agree", var.sigma2_mc, var.sigma2, !var.disagree);
  if (ks.size() > 1) {
    // 95% Kolmogorov critical value: below it the trend is Monte Carlo noise
    const double noise = 1.36 / std::sqrt(double(rc.samples));
    ctx.verdict("ks_decreasing", ks.back(), ks.front(), strictly_decreasing(ks) || ks.back() <= noise);
  }
  ctx.verdict("ks_last_n", ks.back(), 0.02, ks.back() <= 0.02);
  return 0;
}

int cmd_fluctuations(Context& ctx, const MapModel& model, const Potential& phi) {
  const auto& rc = ctx.rc;
  auto ns = n_values(rc, {rc.n});
  const int n_max = *std::max_element(ns.begin(), ns.end());
  Bench b(model, phi, std::max(rc.level, n_max + 2));
  OrbitSampler sampler(*b.mu);
  const double h = entropy_ref(b, phi);
  auto vals = sample_cell_average(*b.tree, b.m.level, Observable::from_potential(phi), 8);
  const double sigma2 = asymptotic_variance(b.m, b.s, vals, rc.lag_max).sigma2;
  const double sigma = std::sqrt(std::max(sigma2, 0.0));
  CsvTable t({"n", "samples", "h_ref", "sigma_ref", "cap", "censored", "ks", "ks_lo", "ks_hi"});
  std::vector<double> ks;
  FluctuationResult last;
  for (int n : ns) {
    long cap = long(std::ceil(20.0 * std::exp(n * h + 4.0 * sigma * std::sqrt(double(n)))));
    auto f = fluctuation_stat(sampler, n, std::size_t(rc.samples), h, sigma, cap, rc.seed, rc.bootstrap);
    t.add_row({n, rc.samples, h, sigma, cap, f.returns.censored, f.ks, f.ci.lo, f.ci.hi});
    ks.push_back(f.ks);
    last = std::move(f);
  }
  ctx.emit("fluctuations.csv", t);
  CsvTable hist({"bin_lo", "bin_hi", "count", "density", "normal_density"});
  const int bins = 40;
  std::vector<long> count(bins, 0);
  for (double z : last.z) {
    int k = int(std::floor((z + 4.0) / 8.0 * bins));
    if (k >= 0 && k < bins) ++count[std::size_t(k)];
  }
  for (int k = 0; k < bins; ++k) {
    double a = -4.0 + 8.0 * k / bins, c = a + 8.0 / bins;
    double ref = (normal_cdf(c) - normal_cdf(a)) / (c - a);
    hist.add_row({a, c, count[std::size_t(k)], double(count[std::size_t(k)]) / (double(last.z.size()) * (c - a)), ref});
  }
  ctx.emit("fluctuations_hist.csv", hist);
  ctx.verdict("ks_last_n", ks.back(), 0.1, ks.back() <= 0.1);
  if (ks.size() > 1) {
    // 95% Kolmogorov critical value: below it the trend is Monte Carlo noise
    const double noise = 1.36 / std::sqrt(double(rc.samples));
    ctx.verdict("ks_decreasing", ks.back(), ks.front(), strictly_decreasing(ks) || ks.back() <= noise);
  }
  return 0;
}

const std::map<std::string, std::string>& topics() {
  static const std::map<std::string, std::string> t{
      {"validate", "standing hypotheses"},
      {"cylinders", "cylinder geometry"},
      {"spectrum", "spectral gap"},
      {"correlations", "exponential decay of correlations"},
      {"lasota-yorke", "Lasota-Yorke inequality"},
      {"gibbs", "Gibbs property and conformality"},
      {"hitting", "exponential hitting-time law"},
      {"returns", "entropy from return times"},
      {"clt", "central limit theorem"},
      {"fluctuations", "log-normal return-time fluctuations"},
  };
  return t;
}

int cmd_report(Context& ctx) {
  const fs::path dir = ctx.rc.out;
  std::vector<std::string> warnings;
  CsvTable all({"command", "topic", "criterion", "value", "threshold", "pass"});
  std::string body;
  std::size_t found = 0;
  for (const auto& name : subcommands()) {
    if (name == "report") continue;
    fs::path p = dir / (name + "_verdict.csv");
    if (!fs::exists(p)) {
      warnings.push_back("missing artifact: " + p.filename().string());
      continue;
    }
    ++found;
    auto rows = read_csv(p);
    body += "\n## " + name + ": " + topics().at(name) + "\n\n| criterion | value | threshold | verdict |\n|---|---|---|---|\n";
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() < 4) continue;
      bool pass = rows[r][3] == "true";
      body += "| " + rows[r][0] + " | " + rows[r][1] + " | " + rows[r][2] + " | " + (pass ? "PASS" : "FAIL") + " |\n";
      all.add_row({name, topics().at(name), rows[r][0], rows[r][1], rows[r][2], pass});
      auto num = [](const std::string& x) {
        try {
          return std::stod(x);
        } catch (const std::exception&) {
          return std::nan("");
        }
      };
      ctx.verdicts.push_back({name + "." + rows[r][0], num(rows[r][1]), num(rows[r][2]), pass});
    }
  }
  std::string doc = "# thermo report\n\nArtifacts found: " + std::to_string(found) + "\n";
  if (!warnings.empty()) {
    doc += "\n## warnings\n\n";
    for (const auto& w : warnings) doc += "- " + w + "\n";
  }
  doc += body;
  fs::create_directories(dir);
  std::ofstream(dir / "report.md", std::ios::binary) << doc;
  all.write(dir / "report_verdict.csv");
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

}  // namespace

int run_subcommand(Context& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  if (ctx.command == "report") {
    rc = cmd_report(ctx);
  } else {
    MapModel model = build_model(ctx.settings);
    Potential phi = build_potential(ctx.settings);
    const std::string& c = ctx.command;
    if (c == "validate") rc = cmd_validate(ctx, model, phi);
    else if (c == "cylinders") rc = cmd_cylinders(ctx, model, phi);
    else if (c == "spectrum") rc = cmd_spectrum(ctx, model, phi);
    else if (c == "correlations") rc = cmd_correlations(ctx, model, phi);
    else if (c == "lasota-yorke") rc = cmd_lasota_yorke(ctx, model, phi);
    else if (c == "gibbs") rc = cmd_gibbs(ctx, model, phi);
    else if (c == "hitting") rc = cmd_hitting(ctx, model, phi);
    else if (c == "returns") rc = cmd_returns(ctx, model, phi);
    else if (c == "clt") rc = cmd_clt(ctx, model, phi);
    else if (c == "fluctuations") rc = cmd_fluctuations(ctx, model, phi);
    else throw ConfigError("unknown subcommand " + c);

    CsvTable v({"criterion", "value", "threshold", "pass"});
    for (const auto& x : ctx.verdicts) v.add_row({x.criterion, x.value, x.threshold, x.pass});
    ctx.emit(ctx.command + "_verdict.csv", v);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Settings manifest = ctx.settings;
  manifest.put("run.command", ctx.command);
  manifest.put("run.version", THERMO_VERSION);
  manifest.put("run.threads", std::to_string(thread_count()));
  manifest.put("run.wall_seconds", format_double(secs));
  std::string files;
  for (const auto& a : ctx.artifacts) files += (files.empty() ? "" : ",") + a;
  manifest.put("run.artifacts", files);
  manifest.write(ctx.rc.out / (ctx.command + "_manifest.ini"));

  bool failed = std::any_of(ctx.verdicts.begin(), ctx.verdicts.end(), [](const Verdict& v) { return !v.pass; });
  for (const auto& v : ctx.verdicts)
    std::printf("%s %s value=%s threshold=%s\n", v.pass ? "PASS" : "FAIL", v.criterion.c_str(),
                format_double(v.value).c_str(), format_double(v.threshold).c_str());
  if (rc == 0 && ctx.strict && failed) return 3;
  return rc;
}

}  // namespace thermo::cli
