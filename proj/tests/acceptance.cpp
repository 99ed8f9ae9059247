// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--cli PATH] [--only N] [--scratch DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "thermo/thermo.hpp"

using namespace thermo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

struct Fixture {
  std::unique_ptr<CylinderTree> tree;
  TransferMatrix m;
  SpectralData s;
  std::unique_ptr<CylinderMeasure> nu, mu;

  Fixture(const MapModel& model, const Potential& phi, int level) {
    tree = std::make_unique<CylinderTree>(model);
    tree->build_to(level);
    m = assemble(*tree, phi, level);
    s = leading_spectrum(m);
    nu = std::make_unique<CylinderMeasure>(conformal_measure(*tree, s));
    mu = std::make_unique<CylinderMeasure>(equilibrium_measure(*tree, s));
  }
};

MapModel deformed() {
  SmoothSpec sp;
  sp.degree = 2;
  sp.epsilon = 0.2;
  sp.partition_depth = 2;
  return MapModel::smooth_deformation(sp, {1, 2});
}

Potential cos_potential(double a) { return Potential::fourier(0.0, {a}); }

Observable cos_observable() {
  return Observable::function([](double x) { return std::cos(kTwoPi * x); }, kTwoPi, 2.0);
}

// distinct indices drawn with a seeded stream
std::vector<std::size_t> pick(const std::vector<std::size_t>& pool, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> v = pool;
  Rng rng = make_stream(seed, stream_tag("acceptance-pick"), pool.size());
  for (std::size_t i = 0; i < v.size() && i < k; ++i) {
    std::size_t j = i + std::size_t(rng() % (v.size() - i));
    std::swap(v[i], v[j]);
  }
  v.resize(std::min(k, v.size()));
  std::sort(v.begin(), v.end());
  return v;
}

bool decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(f, v[i]);
  return s;
}

Outcome c1_exact_spectrum() {
  auto t0 = std::chrono::steady_clock::now();
  double worst_l = 0, worst_h = 0, worst_nu = 0, worst_p = 0;
  auto model = MapModel::doubling();
  auto phi = Potential::constant(0.0);
  CylinderTree tree(model);
  for (int n = 4; n <= 12; ++n) {
    tree.build_to(n);
    auto m = assemble(tree, phi, n);
    auto s = leading_spectrum(m);
    worst_l = std::max(worst_l, std::abs(s.lambda - 2.0));
    worst_p = std::max(worst_p, std::abs(pressure(s) - std::log(2.0)));
    double mean = std::accumulate(s.h.begin(), s.h.end(), 0.0) / double(s.h.size());
    for (double h : s.h) worst_h = std::max(worst_h, std::abs(h / mean - 1.0));
    double u = 1.0 / double(s.nu.size());
    for (double v : s.nu) worst_nu = std::max(worst_nu, std::abs(v / u - 1.0));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = worst_l <= 1e-10 && worst_h <= 1e-10 && worst_nu <= 1e-10 && worst_p <= 1e-10 && secs < 1.0;
  return {ok, "max|lambda-2|=" + fmt("%.2e", worst_l) + " h_rel=" + fmt("%.2e", worst_h) +
                  " nu_rel=" + fmt("%.2e", worst_nu) + " time=" + fmt("%.3fs", secs)};
}

Outcome c2_scaling() {
  auto model = deformed();
  auto phi = cos_potential(0.1);
  Fixture a(model, phi, 8), b(model, phi.shifted(0.3), 8);
  double dl = std::abs(b.s.lambda / a.s.lambda / std::exp(0.3) - 1.0);
  double dh = 0, dn = 0;
  for (std::size_t i = 0; i < a.s.h.size(); ++i) {
    dh = std::max(dh, std::abs(b.s.h[i] / a.s.h[i] - 1.0));
    dn = std::max(dn, std::abs(b.s.nu[i] / a.s.nu[i] - 1.0));
  }
  auto ea = dense_eigenvalues(a.m), eb = dense_eigenvalues(b.m);
  double dr = 0;
  for (std::size_t k = 1; k < 6; ++k)
    dr = std::max(dr, std::abs(std::abs(eb[k]) / std::abs(eb[0]) - std::abs(ea[k]) / std::abs(ea[0])));
  bool ok = dl <= 1e-12 && dh <= 1e-12 && dn <= 1e-12 && dr <= 1e-12;
  return {ok, "lambda_rel=" + fmt("%.2e", dl) + " h_rel=" + fmt("%.2e", dh) + " nu_rel=" +
                  fmt("%.2e", dn) + " ratio_diff=" + fmt("%.2e", dr)};
}

Outcome c3_nilpotent() {
  Fixture f(MapModel::doubling(), Potential::constant(0.0), 3);
  auto g = dense_gap(f.m, f.s);
  return {g.xi <= 1e-10, "|lambda_2|/lambda=" + fmt("%.2e", g.xi) + " (" + g.method + ")"};
}

Outcome c4_conformality() {
  auto t0 = std::chrono::steady_clock::now();
  auto phi = cos_potential(0.1);
  std::vector<double> err;
  bool bound = true;
  for (int n = 8; n <= 12; ++n) {
    Fixture f(MapModel::doubling(), phi, n);
    auto j = jacobian_check(*f.nu, phi, f.s, n);
    err.push_back(j.max_rel_error);
    bound = bound && j.max_rel_error <= j.osc_exp_phi;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = bound && decreasing(err) && secs < 10.0;
  return {ok, "errors=" + join(err, "%.3e") + " within_osc=" + (bound ? "yes" : "no") +
                  " time=" + fmt("%.2fs", secs)};
}

Outcome c5_gibbs(double c) {
  Fixture f(deformed(), Potential::constant(0.0), 12);
  auto rows = gibbs_sweep(*f.nu, Potential::constant(0.0), f.s, 4, 12, c);
  double k8 = rows[4].K, k12 = rows[8].K;
  return {k12 / k8 < 1.5, "c=" + fmt("%.4f", c) + " K(8)=" + fmt("%.4f", k8) + " K(12)=" +
                              fmt("%.4f", k12) + " ratio=" + fmt("%.4f", k12 / k8) +
                              " hyperbolic(12)=" + std::to_string(rows[8].hyperbolic)};
}

Outcome c6_nu_decay() {
  std::string detail;
  bool ok = true;
  auto one = [&](const char* name, const MapModel& model, const Potential& phi) {
    Fixture f(model, phi, 12);
    std::vector<double> xs, ys;
    for (int n = 4; n <= 12; ++n) {
      auto w = f.nu->level_weights(n);
      xs.push_back(n);
      ys.push_back(std::log(*std::max_element(w.begin(), w.end())));
    }
    auto lf = linear_fit(xs, ys);
    ok = ok && -lf.slope > 0.0 && lf.r2 > 0.99;
    detail += std::string(detail.empty() ? "" : " ") + name + ": gamma1=" + fmt("%.4f", -lf.slope) +
              " R2=" + fmt("%.6f", lf.r2);
  };
  one("linear", MapModel::doubling(), cos_potential(0.1));
  one("smooth", deformed(), Potential::constant(0.0));
  return {ok, detail};
}

Outcome c7_lasota_yorke(double theta) {
  auto t0 = std::chrono::steady_clock::now();
  auto phi = cos_potential(0.1);
  Fixture f(deformed(), phi, 12);
  auto vw = variation_weights(*f.tree, phi, 11);
  std::vector<std::vector<double>> g;
  g.push_back(std::vector<double>(f.m.dim, 1.0));
  g.push_back(sample_midpoints(*f.tree, 12, cos_observable()));
  for (std::size_t q = 0; q < f.tree->count(3); ++q) {
    std::vector<double> ind(f.m.dim, 0.0);
    auto [b, e] = f.tree->descendants(3, q, 12);
    for (std::size_t i = b; i < e; ++i) ind[i] = 1.0;
    g.push_back(std::move(ind));
  }
  auto fit = lasota_yorke_check(f.m, f.s, *f.tree, vw, theta, g, 1, 6);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {fit.pass && secs < 30.0, "theta=" + fmt("%.4f", theta) + " xi1=" + fmt("%.4f", fit.xi1) +
                                       " D1=" + fmt("%.3g", fit.D1) + " D2=" + fmt("%.3g", fit.D2) +
                                       " time=" + fmt("%.2fs", secs)};
}

Outcome c8_kac() {
  auto t0 = std::chrono::steady_clock::now();
  Fixture f(deformed(), cos_potential(0.1), 12);
  OrbitSampler sampler(*f.mu);
  auto pool = short_return_free(*f.tree, 8, 0.2);
  auto targets = pick(pool, 10, 2024);
  int passed = 0;
  double worst = 0.0;
  for (std::size_t q : targets) {
    auto e = run_hitting(sampler, 8, q, 100000, 10.0, StartLaw::Conditioned, 11);
    auto k = kac_check(e);
    passed += k.pass ? 1 : 0;
    worst = std::max(worst, std::abs(k.product - 1.0) / k.se);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {passed == int(targets.size()) && secs < 60.0,
          std::to_string(passed) + "/" + std::to_string(targets.size()) +
              " cylinders, worst |product-1|/se=" + fmt("%.2f", worst) + " time=" + fmt("%.1fs", secs)};
}

Outcome c9_pac() {
  Fixture f(deformed(), cos_potential(0.1), 10);
  OrbitSampler sampler(*f.mu);
  std::vector<std::size_t> all(f.tree->count(6));
  std::iota(all.begin(), all.end(), 0);
  auto targets = pick(all, 20, 99);
  std::vector<double> grid;
  for (int k = 1; k <= 50; ++k) grid.push_back(0.1 * k);
  bool ok = true;
  double worst = 1e300;
  for (std::size_t q : targets) {
    std::size_t E[] = {q};
    auto r = pac_bound_check(sampler, 6, E, grid, 20000, 5);
    ok = ok && r.pass;
    worst = std::min(worst, r.worst_margin);
  }
  return {ok, "20 cylinders x 50 grid points, worst margin=" + fmt("%.4f", worst)};
}

Outcome c10_hitting_law() {
  auto t0 = std::chrono::steady_clock::now();
  Fixture f(deformed(), cos_potential(0.1), 12);
  OrbitSampler sampler(*f.mu);
  std::vector<double> med;
  for (int n : {6, 8, 10}) {
    auto targets = pick(short_return_free(*f.tree, n, 0.2), 9, 7 + std::uint64_t(n));
    std::vector<double> ks;
    for (std::size_t q : targets) {
      auto e = run_hitting(sampler, n, q, 100000, 10.0, StartLaw::Measure, 17);
      ks.push_back(hitting_law(e, 0.05, 0).ks);
    }
    med.push_back(median(ks));
  }
  const double threshold = 0.05;
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = decreasing(med) && med.back() <= threshold && secs < 300.0;
  return {ok, "median KS n=6,8,10: " + join(med) + " threshold=" + fmt("%.2f", threshold) +
                  " time=" + fmt("%.1fs", secs)};
}

Outcome c11_clt() {
  auto t0 = std::chrono::steady_clock::now();
  Fixture f(MapModel::doubling(), Potential::constant(0.0), 12);
  OrbitSampler sampler(*f.mu);
  auto Phi = cos_observable();
  auto vals = sample_cell_average(*f.tree, 12, Phi, 8);
  auto v = asymptotic_variance(f.m, f.s, vals, 200);
  auto r = clt_check(sampler, Phi, 0.0, 0.5, 2000, 10000, 3);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = r.ks <= 0.02 && std::abs(v.sigma2 / 0.5 - 1.0) <= 0.02 && secs < 120.0;
  return {ok, "KS=" + fmt("%.4f", r.ks) + " green_kubo=" + fmt("%.5f", v.sigma2) +
                  " time=" + fmt("%.1fs", secs)};
}

double entropy_ref(const Fixture& f, const Potential& phi) {
  return pressure(f.s) - integrate(*f.mu, Observable::from_potential(phi), 8);
}

Outcome c12_fluctuations() {
  auto t0 = std::chrono::steady_clock::now();
  auto phi = cos_potential(0.3);
  Fixture f(MapModel::doubling(), phi, 16);
  OrbitSampler sampler(*f.mu);
  double h = entropy_ref(f, phi);
  auto vals = sample_cell_average(*f.tree, 16, Observable::from_potential(phi), 8);
  double sigma = std::sqrt(asymptotic_variance(f.m, f.s, vals, 200).sigma2);
  std::vector<double> ks;
  for (int n : {8, 11, 14}) {
    long cap = long(std::ceil(20.0 * std::exp(n * h + 4.0 * sigma * std::sqrt(double(n)))));
    ks.push_back(fluctuation_stat(sampler, n, 10000, h, sigma, cap, 7, 0).ks);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = decreasing(ks) && ks.back() <= 0.1 && secs < 600.0;
  return {ok, "h_ref=" + fmt("%.5f", h) + " sigma=" + fmt("%.5f", sigma) + " KS n=8,11,14: " +
                  join(ks) + " time=" + fmt("%.1fs", secs)};
}

Outcome c13_gap() {
  Fixture f(MapModel::doubling(), Potential::constant(0.0), 12);
  OrbitSampler sampler(*f.mu);
  double h = entropy_ref(f, Potential::constant(0.0));
  std::vector<double> gaps;
  for (int n : {6, 8, 10}) gaps.push_back(hitting_vs_return_gap(sampler, n, std::exp(n * h), 100000, 13).gap);
  bool ok = decreasing(gaps) && gaps.back() < 0.05;
  return {ok, "gap n=6,8,10: " + join(gaps)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome c14_determinism(const std::string& cli, const fs::path& scratch) {
  if (cli.empty()) return {false, "command line tool path not given"};
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  const fs::path cfg = scratch / "suite.ini";
  {
    std::ofstream o(cfg);
    o << "[model]\nkind = smooth\ndegree = 2\nepsilon = 0.2\nsine = 1\ndepth = 2\nnon_expanding = 1,2\n"
      << "[potential]\nkind = fourier\na0 = 0\ncos = 0.3\nalpha = 1\n"
      << "[resolution]\nlevel = 10\nlevel_lo = 4\nlevel_hi = 10\n"
      << "[sampling]\nseed = 7\nsamples = 2000\nn = 8\n";
  }
  const char* cmds[] = {"validate", "cylinders", "spectrum", "correlations", "lasota-yorke",
                        "gibbs", "hitting", "returns", "clt", "fluctuations"};
  std::vector<fs::path> outs{scratch / "run1", scratch / "run2"};
  for (std::size_t r = 0; r < outs.size(); ++r) {
    for (const char* c : cmds) {
      std::string env = r == 0 ? "THERMO_THREADS=1 " : "THERMO_THREADS=4 ";
      std::string line = env + "\"" + cli + "\" " + c + " --config \"" + cfg.string() + "\" --out \"" +
                         outs[r].string() + "\" > /dev/null 2>&1";
      int rc = std::system(line.c_str());
      if (rc != 0) return {false, std::string("subcommand ") + c + " exited with " + std::to_string(rc)};
    }
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(outs[0])) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    fs::path other = outs[1] / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other))
      return {false, "differs: " + e.path().filename().string()};
  }
  return {files > 0, std::to_string(files) + " CSV files byte-identical across runs (1 vs 4 threads)"};
}

Outcome c15_ornstein_weiss() {
  Fixture f(MapModel::doubling(), Potential::constant(0.0), 16);
  OrbitSampler sampler(*f.mu);
  int ns[] = {14};
  auto r = ornstein_weiss(sampler, ns, 10000, std::log(2.0), 40.0, 21);
  double mean = r.rows[0].mean;
  return {std::abs(mean - std::log(2.0)) < 0.03,
          "mean (1/14) log R_14=" + fmt("%.5f", mean) + " se=" + fmt("%.5f", r.rows[0].se) +
              " |diff|=" + fmt("%.4f", std::abs(mean - std::log(2.0)))};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  int only = 0;
  fs::path scratch = fs::temp_directory_path() / "thermo_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string k = argv[i];
    if (k == "--cli") cli = argv[i + 1];
    else if (k == "--only") only = std::atoi(argv[i + 1]);
    else if (k == "--scratch") scratch = argv[i + 1];
  }

  // constants of the deformed model come from the validator
  ValidatorOptions vo;
  auto report = validate_hypotheses(deformed(), cos_potential(0.1), 1.0, vo);
  auto report0 = validate_hypotheses(deformed(), Potential::constant(0.0), 1.0, vo);

  struct Item {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Item> items{
      {"exact spectrum fixture", c1_exact_spectrum},
      {"scaling covariance", c2_scaling},
      {"nilpotent second eigenvalue", c3_nilpotent},
      {"conformality", c4_conformality},
      {"Gibbs constant stability", [&] { return c5_gibbs(report0.c); }},
      {"nu(Q_n) exponential decay", c6_nu_decay},
      {"Lasota-Yorke contraction", [&] { return c7_lasota_yorke(report.theta); }},
      {"Kac formula", c8_kac},
      {"Pac bound", c9_pac},
      {"exponential hitting law", c10_hitting_law},
      {"central limit theorem", c11_clt},
      {"log-normal return fluctuations", c12_fluctuations},
      {"hitting vs return gap", c13_gap},
      {"determinism", [&] { return c14_determinism(cli, scratch); }},
      {"Ornstein-Weiss entropy", c15_ornstein_weiss},
  };
  int failed = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (only && int(i + 1) != only) continue;
    Outcome o;
    try {
      o = items[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %-32s %s\n", o.pass ? "PASS" : "FAIL", i + 1, items[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
