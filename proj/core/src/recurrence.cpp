#include "thermo/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermo/error.hpp"
#include "thermo/parallel.hpp"

namespace thermo {

std::optional<long> hitting_time(const MapModel& model, double x, Interval target, long cap) {
  x = wrap(x);
  for (long k = 1; k <= cap; ++k) {
    x = eval_map(model, x);
    if (target.contains(x)) return k;
  }
  return std::nullopt;
}

std::optional<long> return_time_Rn(CylinderTree& tree, double x, int n, long cap) {
  Cylinder q = tree.cylinder_of(x, n);
  return hitting_time(tree.model(), x, q.interval, cap);
}

namespace {

std::uint64_t mix_tag(std::string_view name, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(stream_tag(name) ^ splitmix64(a * 0x9e3779b97f4a7c15ULL + b));
}

}  // namespace

HittingExperiment run_hitting(const OrbitSampler& sampler, int level, std::size_t target,
                              std::size_t samples, double t_max, StartLaw start,
                              std::uint64_t seed) {
  HittingExperiment e;
  e.level = level;
  e.target = target;
  e.samples = samples;
  e.t_max = t_max;
  e.start = start;
  e.mu_target = sampler.measure().weight(level, target);
  if (!(e.mu_target > 0.0)) throw DimensionError("target cylinder has zero measure");
  e.cap = long(std::ceil(t_max / e.mu_target));
  e.tau.assign(samples, 0);
  const auto anc = sampler.ancestor_map(level);
  const std::uint64_t tag =
      mix_tag(start == StartLaw::Measure ? "hitting" : "return", std::uint64_t(level), target);
  parallel_for(samples, [&](std::size_t b, std::size_t end) {
    for (std::size_t i = b; i < end; ++i) {
      Rng rng = make_stream(seed, tag, i);
      std::size_t s = start == StartLaw::Measure ? sampler.draw_state(rng)
                                                 : sampler.draw_state_in(level, target, rng);
      for (long k = 1; k <= e.cap; ++k) {
        s = sampler.step(s, rng);
        if (anc[s] == target) {
          e.tau[i] = k;
          break;
        }
      }
    }
  }, 256);
  for (long t : e.tau) e.censored += t == 0 ? 1 : 0;
  return e;
}

KacResult kac_check(const HittingExperiment& e) {
  KacResult r;
  r.censored_fraction = double(e.censored) / double(e.samples);
  if (r.censored_fraction > 0.01) {
    throw CensoringError("censored fraction " + std::to_string(r.censored_fraction) +
                         " exceeds 1%; raise t_max");
  }
  double tail_mean = 0.0;
  if (e.censored > 0) {
    // memoryless completion with the rate implied by the survival at the cap
    double rate = -std::log(r.censored_fraction) / double(e.cap);
    tail_mean = double(e.cap) + 1.0 / rate;
  }
  std::vector<double> v(e.samples);
  for (std::size_t i = 0; i < e.samples; ++i)
    v[i] = (e.tau[i] == 0 ? tail_mean : double(e.tau[i])) * e.mu_target;
  auto ms = mean_se(v);
  r.product = ms.mean;
  r.se = ms.se;
  r.pass = std::abs(r.product - 1.0) < 3.0 * r.se;
  return r;
}

SurvivalCurve hitting_law(const HittingExperiment& e, double dt, int bootstrap, std::uint64_t seed) {
  SurvivalCurve c;
  const int K = int(std::floor(e.t_max / dt + 1e-9)) + 1;
  for (int k = 0; k < K; ++k) {
    c.t.push_back(k * dt);
    c.reference.push_back(std::exp(-k * dt));
  }
  // bucket[i] = number of grid points t_k with tau_i > t_k / mu(Q)
  std::vector<int> bucket(e.samples);
  for (std::size_t i = 0; i < e.samples; ++i) {
    if (e.tau[i] == 0) {
      bucket[i] = K;
      continue;
    }
    double scaled = double(e.tau[i]) * e.mu_target;
    int b = 0;
    while (b < K && scaled > c.t[std::size_t(b)]) ++b;
    bucket[i] = b;
  }
  auto curve_ks = [&](const std::vector<double>& hist, std::vector<double>* G) {
    double n = 0.0;
    for (double h : hist) n += h;
    double above = n;  // count with bucket > k
    double ks = 0.0;
    for (int k = 0; k < K; ++k) {
      above -= hist[std::size_t(k)];
      double g = above / n;
      if (G) G->push_back(g);
      ks = std::max(ks, std::abs(g - c.reference[std::size_t(k)]));
    }
    return ks;
  };
  std::vector<double> hist(std::size_t(K) + 1, 0.0);
  for (int b : bucket) hist[std::size_t(b)] += 1.0;
  c.ks = curve_ks(hist, &c.G);
  if (bootstrap > 1 && e.samples > 0) {
    Rng rng(splitmix64(seed ^ mix_tag("hitting-bootstrap", e.level, e.target)));
    std::vector<double> vals;
    for (int r = 0; r < bootstrap; ++r) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (std::size_t i = 0; i < e.samples; ++i) hist[std::size_t(bucket[rng() % e.samples])] += 1.0;
      vals.push_back(curve_ks(hist, nullptr));
    }
    c.ci.lo = quantile(vals, 0.025);
    c.ci.hi = quantile(vals, 0.975);
  }
  return c;
}

PacResult pac_bound_check(const OrbitSampler& sampler, int level, std::span<const std::size_t> E,
                          std::span<const double> t_grid, std::size_t samples, std::uint64_t seed) {
  PacResult r;
  const CylinderTree& tree = sampler.tree();
  std::vector<char> member(tree.count(level), 0);
  std::uint64_t h = 0;
  for (std::size_t q : E) {
    member[q] = 1;
    r.mu_E += sampler.measure().weight(level, q);
    h = splitmix64(h ^ q);
  }
  if (!(r.mu_E > 0.0)) throw DimensionError("set has zero measure");
  double t_top = 0.0;
  for (double t : t_grid) t_top = std::max(t_top, t);
  const long cap = long(std::floor(t_top / r.mu_E));
  const auto anc = sampler.ancestor_map(level);
  std::vector<long> tau(samples, 0);
  const std::uint64_t tag = mix_tag("pac", std::uint64_t(level), h);
  parallel_for(samples, [&](std::size_t b, std::size_t end) {
    for (std::size_t i = b; i < end; ++i) {
      Rng rng = make_stream(seed, tag, i);
      std::size_t s = sampler.draw_state(rng);
      for (long k = 1; k <= cap; ++k) {
        s = sampler.step(s, rng);
        if (member[anc[s]]) {
          tau[i] = k;
          break;
        }
      }
    }
  }, 256);
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    double lim = t / r.mu_E;
    std::size_t hit = 0;
    for (long k : tau) hit += (k > 0 && double(k) <= lim) ? 1 : 0;
    double p = double(hit) / double(samples);
    double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / double(samples)) / double(samples));
    double margin = t + r.mu_E - p;
    r.t.push_back(t);
    r.p.push_back(p);
    r.se.push_back(se);
    r.margin.push_back(margin);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -3.0 * se) r.pass = false;
  }
  return r;
}

ReturnSamples sample_returns(const OrbitSampler& sampler, int n, std::size_t samples, long cap,
                             std::uint64_t seed) {
  ReturnSamples r;
  r.n = n;
  r.cap = cap;
  r.R.assign(samples, 0);
  const auto anc = sampler.ancestor_map(n);
  const std::uint64_t tag = mix_tag("returns", std::uint64_t(n));
  parallel_for(samples, [&](std::size_t b, std::size_t end) {
    for (std::size_t i = b; i < end; ++i) {
      Rng rng = make_stream(seed, tag, i);
      std::size_t s = sampler.draw_state(rng);
      const std::uint32_t q = anc[s];
      for (long k = 1; k <= cap; ++k) {
        s = sampler.step(s, rng);
        if (anc[s] == q) {
          r.R[i] = k;
          break;
        }
      }
    }
  }, 64);
  for (long v : r.R) r.censored += v == 0 ? 1 : 0;
  return r;
}

OrnsteinWeissResult ornstein_weiss(const OrbitSampler& sampler, std::span<const int> n_range,
                                   std::size_t samples, double h_ref, double cap_factor,
                                   std::uint64_t seed) {
  OrnsteinWeissResult out;
  out.h_ref = h_ref;
  std::vector<double> xs, ys;
  for (int n : n_range) {
    long cap = long(std::ceil(cap_factor * std::exp(n * h_ref)));
    auto rs = sample_returns(sampler, n, samples, cap, seed);
    std::vector<double> v(samples);
    for (std::size_t i = 0; i < samples; ++i)
      v[i] = std::log(double(rs.R[i] == 0 ? cap : rs.R[i])) / n;
    auto ms = mean_se(v);
    out.rows.push_back({n, ms.mean, ms.se, rs.censored});
    xs.push_back(1.0 / n);
    ys.push_back(ms.mean);
  }
  out.bias_fit = linear_fit(xs, ys);
  return out;
}

VarianceResult asymptotic_variance(const TransferMatrix& m, const SpectralData& s,
                                   std::span<const double> phi_vals, int lag_max,
                                   double noise_floor) {
  if (phi_vals.size() != m.dim) throw DimensionError("observable must be sampled at the matrix level");
  VarianceResult r;
  r.sigma2_mc = std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (std::size_t i = 0; i < m.dim; ++i) mean += phi_vals[i] * s.h[i] * s.nu[i];
  std::vector<double> hat(m.dim), u(m.dim), w(m.dim);
  for (std::size_t i = 0; i < m.dim; ++i) {
    hat[i] = phi_vals[i] - mean;
    u[i] = hat[i] * s.h[i];
  }
  int quiet = 0;
  for (int j = 0; j <= lag_max; ++j) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i) t += u[i] * hat[i] * s.nu[i];
    r.terms.push_back(t);
    r.sigma2 += j == 0 ? t : 2.0 * t;
    r.truncation = j;
    double floor = noise_floor * std::max(std::abs(r.terms[0]), 1e-300);
    quiet = std::abs(t) < floor ? quiet + 1 : 0;
    if (j > 0 && quiet >= 3) break;
    apply_into(m, u, w);
    for (std::size_t i = 0; i < m.dim; ++i) u[i] = w[i] / s.lambda;
  }
  return r;
}

MeanSe batch_means_variance(const OrbitSampler& sampler, const Observable& phi, double mean_phi,
                            int batch_length, std::size_t batches, std::uint64_t seed) {
  std::vector<double> v(batches);
  const std::uint64_t tag = mix_tag("batch-variance", std::uint64_t(batch_length));
  parallel_for(batches, [&](std::size_t b, std::size_t end) {
    std::vector<std::uint32_t> states;
    for (std::size_t i = b; i < end; ++i) {
      Rng rng = make_stream(seed, tag, i);
      sampler.run(sampler.draw_state(rng), std::size_t(batch_length), rng, states);
      auto x = sampler.points(states, rng);
      double sum = 0.0;
      for (double p : x) sum += phi(p) - mean_phi;
      v[i] = sum * sum / batch_length;
    }
  }, 16);
  return mean_se(v);
}

void cross_check_variance(VarianceResult& v, const OrbitSampler& sampler, const Observable& phi,
                          double mean_phi, int batch_length, std::size_t batches,
                          std::uint64_t seed) {
  auto ms = batch_means_variance(sampler, phi, mean_phi, batch_length, batches, seed);
  v.sigma2_mc = ms.mean;
  v.sigma2_mc_se = ms.se;
  double ref = std::max(std::abs(v.sigma2), 1e-300);
  v.disagree = std::abs(v.sigma2_mc - v.sigma2) > 0.2 * ref;
}

CltResult clt_check(const OrbitSampler& sampler, const Observable& phi, double mean_phi,
                    double sigma2, int n, std::size_t samples, std::uint64_t seed) {
  if (!(sigma2 > 1e-10)) {
    throw SigmaZeroError("asymptotic variance is numerically zero (coboundary or constant observable)");
  }
  CltResult r;
  r.sigma = std::sqrt(sigma2);
  r.z.assign(samples, 0.0);
  const double scale = r.sigma * std::sqrt(double(n));
  const std::uint64_t tag = mix_tag("clt", std::uint64_t(n));
  parallel_for(samples, [&](std::size_t b, std::size_t end) {
    std::vector<std::uint32_t> states;
    for (std::size_t i = b; i < end; ++i) {
      Rng rng = make_stream(seed, tag, i);
      sampler.run(sampler.draw_state(rng), std::size_t(n), rng, states);
      auto x = sampler.points(states, rng);
      double sum = 0.0;
      for (double p : x) sum += phi(p) - mean_phi;
      r.z[i] = sum / scale;
    }
  }, 64);
  r.ks = ks_normal(r.z);
  return r;
}

FluctuationResult fluctuation_stat(const OrbitSampler& sampler, int n, std::size_t samples,
                                   double h_ref, double sigma_ref, long cap, std::uint64_t seed,
                                   int bootstrap) {
  if (!(sigma_ref > 1e-8)) {
    throw SigmaZeroError("fluctuation statistic needs a potential with positive asymptotic variance");
  }
  FluctuationResult f;
  f.returns = sample_returns(sampler, n, samples, cap, seed);
  const double scale = sigma_ref * std::sqrt(double(n));
  f.z.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    long R = f.returns.R[i] == 0 ? cap : f.returns.R[i];
    f.z[i] = (std::log(double(R)) - n * h_ref) / scale;
  }
  f.ks = ks_normal(f.z);
  if (bootstrap > 1) {
    f.ci = bootstrap_ci(f.z, [](std::span<const double> d) {
      return ks_normal(std::vector<double>(d.begin(), d.end()));
    }, bootstrap, seed ^ mix_tag("fluctuation-bootstrap", std::uint64_t(n)));
  }
  return f;
}

GapRow hitting_vs_return_gap(const OrbitSampler& sampler, int n, double t_n, std::size_t samples,
                             std::uint64_t seed) {
  GapRow g;
  g.n = n;
  g.t_n = t_n;
  g.hypothesis_ok = t_n > double(n) * std::log(double(n) + 1.0);
  const long horizon = long(std::floor(t_n));
  const auto anc = sampler.ancestor_map(n);
  std::vector<double> ret(samples), hit(samples);
  const std::uint64_t tag = mix_tag("gap", std::uint64_t(n));
  parallel_for(samples, [&](std::size_t b, std::size_t end) {
    for (std::size_t i = b; i < end; ++i) {
      Rng rng = make_stream(seed, tag, i);
      std::size_t s = sampler.draw_state(rng);
      std::size_t y = sampler.draw_state(rng);
      const std::uint32_t q = anc[s];
      // common innovations: the chains coalesce once the initial words are shifted out
      const Rng innovations(rng());
      Rng a = innovations, b = innovations;
      bool returned = false;
      for (long k = 1; k <= horizon && !returned; ++k) {
        s = sampler.step(s, a);
        returned = anc[s] == q;
      }
      bool hitq = false;
      for (long k = 1; k <= horizon && !hitq; ++k) {
        y = sampler.step(y, b);
        hitq = anc[y] == q;
      }
      ret[i] = returned ? 0.0 : 1.0;
      hit[i] = hitq ? 0.0 : 1.0;
    }
  }, 256);
  std::vector<double> d(samples);
  for (std::size_t i = 0; i < samples; ++i) d[i] = ret[i] - hit[i];
  g.p_return = mean_se(ret).mean;
  g.p_hitting = mean_se(hit).mean;
  auto md = mean_se(d);
  g.gap = std::abs(md.mean);
  g.se = md.se;
  return g;
}

}  // namespace thermo
