#include "thermo/transfer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "thermo/error.hpp"
#include "thermo/parallel.hpp"
#include "thermo/stats.hpp"

namespace thermo {

std::vector<double> TransferMatrix::dense() const {
  std::vector<double> d(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d[i * dim + col[k]] += val[k];
  return d;
}

TransferMatrix assemble(CylinderTree& tree, const Potential& phi, int n,
                        WeightConvention convention) {
  if (n < 1) throw DimensionError("transfer matrix level must be >= 1");
  tree.build_to(n);
  const MapModel& model = tree.model();
  TransferMatrix m;
  m.level = n;
  m.dim = tree.count(n);
  m.convention = convention;
  auto columns = [&](std::size_t i) {
    return n == 1 ? tree.shift_preimages(1, i) : tree.shift_preimages(n, tree.parent(n, i));
  };
  m.row_ptr.assign(m.dim + 1, 0);
  for (std::size_t i = 0; i < m.dim; ++i) m.row_ptr[i + 1] = m.row_ptr[i] + columns(i).size();
  m.col.resize(m.row_ptr.back());
  m.val.resize(m.row_ptr.back());

  parallel_for(m.dim, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double lo = tree.lo(n, i);
      const double len = tree.diameter(n, i);
      std::size_t k = m.row_ptr[i];
      for (std::size_t j : columns(i)) {
        const std::size_t b = tree.first_symbol(n, j);
        auto al = model.lift_into_image(b, lo);
        if (!al) throw NotInImageError("cylinder is not in the image of its preimage branch");
        double e = 0.0;
        switch (convention) {
          case WeightConvention::Midpoint:
            e = phi(model.solve_lift(b, *al + 0.5 * len));
            break;
          case WeightConvention::Sup:
            e = phi.sup_on({model.solve_lift(b, *al), model.solve_lift(b, *al + len)});
            break;
          case WeightConvention::Inf:
            e = phi.inf_on({model.solve_lift(b, *al), model.solve_lift(b, *al + len)});
            break;
        }
        m.col[k] = std::uint32_t(j);
        m.val[k] = std::exp(e);
        ++k;
      }
    }
  }, 1024);

  // transpose by counting sort
  m.t_ptr.assign(m.dim + 1, 0);
  for (auto c : m.col) ++m.t_ptr[c + 1];
  std::partial_sum(m.t_ptr.begin(), m.t_ptr.end(), m.t_ptr.begin());
  m.t_col.resize(m.col.size());
  m.t_val.resize(m.val.size());
  std::vector<std::size_t> fill(m.t_ptr.begin(), m.t_ptr.end() - 1);
  for (std::size_t i = 0; i < m.dim; ++i) {
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      std::size_t pos = fill[m.col[k]]++;
      m.t_col[pos] = std::uint32_t(i);
      m.t_val[pos] = m.val[k];
    }
  }
  auto [mn, mx] = std::minmax_element(m.val.begin(), m.val.end());
  m.min_entry = *mn;
  m.max_entry = *mx;
  return m;
}

namespace {

void csr_apply(std::size_t dim, const std::vector<std::size_t>& ptr,
               const std::vector<std::uint32_t>& col, const std::vector<double>& val,
               std::span<const double> g, std::span<double> out) {
  if (g.size() != dim || out.size() != dim) throw DimensionError("vector length does not match matrix");
  parallel_for(dim, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * g[col[k]];
      out[i] = s;
    }
  }, 1 << 15);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void apply_into(const TransferMatrix& m, std::span<const double> g, std::span<double> out) {
  csr_apply(m.dim, m.row_ptr, m.col, m.val, g, out);
}

void apply_transpose_into(const TransferMatrix& m, std::span<const double> g, std::span<double> out) {
  csr_apply(m.dim, m.t_ptr, m.t_col, m.t_val, g, out);
}

std::vector<double> apply(const TransferMatrix& m, std::span<const double> g) {
  std::vector<double> out(m.dim);
  apply_into(m, g, out);
  return out;
}

std::vector<double> apply_transpose(const TransferMatrix& m, std::span<const double> g) {
  std::vector<double> out(m.dim);
  apply_transpose_into(m, g, out);
  return out;
}

namespace {

struct PowerResult {
  std::vector<double> v;
  double lo = 0.0, hi = 0.0;
  int iterations = 0;
  bool converged = false;
};

PowerResult power_iterate(const TransferMatrix& m, bool transpose, const SpectralOptions& opt) {
  PowerResult r;
  r.v.assign(m.dim, 1.0);
  std::vector<double> w(m.dim);
  for (int it = 1; it <= opt.max_iter; ++it) {
    if (transpose) apply_transpose_into(m, r.v, w); else apply_into(m, r.v, w);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double mx = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i) {
      double q = w[i] / r.v[i];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      mx = std::max(mx, w[i]);
    }
    for (std::size_t i = 0; i < m.dim; ++i) r.v[i] = w[i] / mx;
    r.lo = lo;
    r.hi = hi;
    r.iterations = it;
    if (hi - lo <= opt.tol * hi) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace

SpectralData leading_spectrum(const TransferMatrix& m, const SpectralOptions& opt) {
  if (m.dim == 0) throw DimensionError("empty transfer matrix");
  SpectralData s;
  s.level = m.level;
  PowerResult right = power_iterate(m, false, opt);
  PowerResult left = power_iterate(m, true, opt);
  s.iterations = std::max(right.iterations, left.iterations);
  s.lambda_lo = std::max(right.lo, left.lo);
  s.lambda_hi = std::min(right.hi, left.hi);
  s.h = std::move(right.v);
  s.nu = std::move(left.v);

  double nsum = std::accumulate(s.nu.begin(), s.nu.end(), 0.0);
  for (auto& x : s.nu) x /= nsum;
  double hn = dot(s.h, s.nu);
  for (auto& x : s.h) x /= hn;

  std::vector<double> mh = thermo::apply(m, s.h);
  s.lambda = dot(s.nu, mh);  // nu^T M h with nu^T h = 1
  s.lambda = std::clamp(s.lambda, s.lambda_lo, s.lambda_hi);
  double hmax = 0.0, res = 0.0;
  for (std::size_t i = 0; i < m.dim; ++i) {
    hmax = std::max(hmax, std::abs(s.h[i]));
    res = std::max(res, std::abs(mh[i] - s.lambda * s.h[i]));
  }
  s.residual_right = res / (s.lambda * hmax);
  std::vector<double> mn = apply_transpose(m, s.nu);
  double nmax = 0.0;
  res = 0.0;
  for (std::size_t i = 0; i < m.dim; ++i) {
    nmax = std::max(nmax, std::abs(s.nu[i]));
    res = std::max(res, std::abs(mn[i] - s.lambda * s.nu[i]));
  }
  s.residual_left = res / (s.lambda * nmax);
  s.converged = right.converged && left.converged && s.residual_right < 1e-10 &&
                s.residual_left < 1e-10;
  double hmin = *std::min_element(s.h.begin(), s.h.end());
  if (hmin < 1e-300) s.warnings.push_back("matrix looks reducible: h has vanishing entries");
  if (!s.converged) {
    throw ConvergenceError("power iteration did not converge after " +
                           std::to_string(s.iterations) + " iterations (residual " +
                           std::to_string(std::max(s.residual_right, s.residual_left)) + ")");
  }
  return s;
}

double pressure(const SpectralData& s) { return std::log(s.lambda); }

namespace {

Eigen::MatrixXd to_eigen(const TransferMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(Eigen::Index(m.dim), Eigen::Index(m.dim));
  for (std::size_t i = 0; i < m.dim; ++i)
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d(Eigen::Index(i), Eigen::Index(m.col[k])) += m.val[k];
  return d;
}

}  // namespace

std::vector<std::complex<double>> dense_eigenvalues(const TransferMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), false);
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(),
            [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  return ev;
}

GapResult dense_gap(const TransferMatrix& m, const SpectralData& s) {
  GapResult g;
  g.method = "dense";
  g.converged = true;
  const auto n = Eigen::Index(m.dim);
  Eigen::MatrixXd r = to_eigen(m) / s.lambda;
  Eigen::Map<const Eigen::VectorXd> h(s.h.data(), n);
  Eigen::Map<const Eigen::VectorXd> nu(s.nu.data(), n);
  r -= h * nu.transpose();
  if (m.dim <= 512) {
    // R^k = 0 for some k means the whole remainder spectrum is {0}
    Eigen::MatrixXd p = r;
    std::size_t k = 1;
    while (k < m.dim) {
      p = p * p;
      k *= 2;
    }
    if (m.dim == 1 || p.cwiseAbs().maxCoeff() < 1e-12) {
      g.method = "nilpotent";
      g.xi = 0.0;
      return g;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(r, false);
  double best = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
  g.xi = best;
  return g;
}

GapResult spectral_gap(const TransferMatrix& m, const SpectralData& s, double tol,
                       std::size_t dense_limit) {
  GapResult g;
  g.method = "deflated";
  const std::size_t n = m.dim;
  if (n == 1) {
    g.xi = 0.0;
    g.method = "nilpotent";
    g.converged = true;
    return g;
  }
  std::vector<double> v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = double(i + 1) * 0.6180339887498949;
    v[i] = (t - std::floor(t)) - 0.5 + 0.25 * std::sin(double(i) * 1.3);
  }
  auto project = [&](std::vector<double>& x) {
    double a = dot(s.nu, x);
    for (std::size_t i = 0; i < n; ++i) x[i] -= a * s.h[i];
    double nr = std::sqrt(dot(x, x));
    return nr;
  };
  double nr = project(v);
  for (auto& x : v) x /= nr;
  const int window = 24;
  const int max_iter = 20000;
  std::vector<double> logs;
  std::vector<double> estimates;
  for (int it = 1; it <= max_iter; ++it) {
    apply_into(m, v, w);
    for (auto& x : w) x /= s.lambda;
    double f = project(w);
    g.iterations = it;
    if (!(f > 1e-13)) {
      g.xi = 0.0;
      g.method = "nilpotent";
      g.converged = true;
      return g;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / f;
    logs.push_back(std::log(f));
    if (int(logs.size()) >= window && int(logs.size()) % window == 0) {
      double sum = 0.0;
      for (int k = 0; k < window; ++k) sum += logs[logs.size() - 1 - k];
      estimates.push_back(std::exp(sum / window));
      if (estimates.size() >= 4) {
        auto last = estimates.end() - 3;
        auto [mn, mx] = std::minmax_element(last, estimates.end());
        g.window_spread = *mx - *mn;
        g.xi = estimates.back();
        if (g.window_spread <= tol * std::max(1.0, g.xi)) {
          g.converged = true;
          return g;
        }
      }
    }
  }
  if (!estimates.empty()) g.xi = estimates.back();
  if (n <= dense_limit) return dense_gap(m, s);
  return g;
}

VariationWeights variation_weights(const CylinderTree& tree, const Potential& phi, int levels,
                                   bool use_bound) {
  VariationWeights vw;
  vw.levels = levels;
  vw.sup_phi = phi.sup();
  vw.degree = tree.model().degree();
  vw.w.resize(std::size_t(levels) + 1);
  for (int k = 1; k <= levels; ++k) {
    auto& wk = vw.w[std::size_t(k)];
    wk.resize(tree.count(k));
    parallel_for(wk.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        auto sb = sup_birkhoff_on_cylinder(tree, phi, k, i);
        wk[i] = std::exp(use_bound ? sb.bound : sb.raw);
      }
    }, 1024);
  }
  return vw;
}

VariationValue theta_variation(const CylinderTree& tree, const VariationWeights& vw,
                               const Observable& g, double theta, int n_trunc, double c_tau_alpha,
                               double sup_abs_g) {
  if (n_trunc > vw.levels) throw DimensionError("variation weights do not reach the truncation level");
  VariationValue out;
  double th = 1.0;
  for (int k = 1; k <= n_trunc; ++k) {
    th *= theta;
    double s = 0.0;
    const auto& wk = vw.w[std::size_t(k)];
    for (std::size_t i = 0; i < wk.size(); ++i) {
      double o = essential_oscillation(g, tree.interval(k, i));
      if (o != 0.0) s += wk[i] * o;
    }
    out.value += th * s;
  }
  double r = theta * vw.degree * std::exp(vw.sup_phi - c_tau_alpha);
  if (r >= 1.0) {
    out.tail_diverges = true;
    out.tail_bound = std::numeric_limits<double>::infinity();
  } else {
    out.tail_bound = 2.0 * sup_abs_g * std::pow(r, n_trunc + 1) / (1.0 - r);
  }
  return out;
}

VariationValue theta_variation(const CylinderTree& tree, const VariationWeights& vw,
                               std::span<const double> g, int level_n, double theta, int n_trunc) {
  if (g.size() != tree.count(level_n)) throw DimensionError("vector does not match the level");
  int top = std::min(n_trunc, level_n - 1);
  if (top > vw.levels) throw DimensionError("variation weights do not reach the truncation level");
  VariationValue out;
  if (top < 1) return out;
  std::vector<double> mn(g.begin(), g.end()), mx(g.begin(), g.end());
  std::vector<double> per_level(std::size_t(top) + 1, 0.0);
  for (int k = level_n - 1; k >= 1; --k) {
    std::vector<double> a(tree.count(k)), b(tree.count(k));
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::size_t c0 = tree.child_begin(k, i), c1 = tree.child_end(k, i);
      double lo = mn[c0], hi = mx[c0];
      for (std::size_t c = c0 + 1; c < c1; ++c) {
        lo = std::min(lo, mn[c]);
        hi = std::max(hi, mx[c]);
      }
      a[i] = lo;
      b[i] = hi;
    }
    mn = std::move(a);
    mx = std::move(b);
    if (k <= top) {
      const auto& wk = vw.w[std::size_t(k)];
      double s = 0.0;
      for (std::size_t i = 0; i < mn.size(); ++i) s += wk[i] * (mx[i] - mn[i]);
      per_level[std::size_t(k)] = s;
    }
  }
  double th = 1.0;
  for (int k = 1; k <= top; ++k) {
    th *= theta;
    out.value += th * per_level[std::size_t(k)];
  }
  return out;
}

LasotaYorkeFit lasota_yorke_check(const TransferMatrix& m, const SpectralData& s,
                                  const CylinderTree& tree, const VariationWeights& vw,
                                  double theta, const std::vector<std::vector<double>>& g_samples,
                                  int n_lo, int n_hi) {
  LasotaYorkeFit fit;
  const int N = m.level;
  const int trunc = std::min(vw.levels, N - 1);
  std::vector<double> w(m.dim);
  for (std::size_t si = 0; si < g_samples.size(); ++si) {
    const auto& g = g_samples[si];
    double var_g = theta_variation(tree, vw, g, N, theta, trunc).value;
    double l1 = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i) l1 += std::abs(g[i]) * s.nu[i];
    std::vector<double> v(g);
    for (int n = 1; n <= n_hi; ++n) {
      apply_into(m, v, w);
      for (std::size_t i = 0; i < m.dim; ++i) v[i] = w[i] / s.lambda;
      if (n < n_lo) continue;
      LasotaYorkeRow row;
      row.sample = si;
      row.n = n;
      row.var_g = var_g;
      row.l1_norm = l1;
      row.var_iterate = theta_variation(tree, vw, v, N, theta, trunc).value;
      row.ratio = var_g > 0.0 ? row.var_iterate / var_g : std::numeric_limits<double>::quiet_NaN();
      fit.rows.push_back(row);
    }
  }
  // D2 absorbs what the iterates settle to; xi1 is fitted on what remains
  for (const auto& r : fit.rows)
    if (r.n == n_hi && r.l1_norm > 0.0) fit.D2 = std::max(fit.D2, r.var_iterate / r.l1_norm);
  std::vector<double> xs, ys;
  std::vector<double> envelope(std::size_t(n_hi) + 1, 0.0);
  for (const auto& r : fit.rows) {
    if (!(r.var_g > 0.0)) continue;
    double resid = (r.var_iterate - fit.D2 * r.l1_norm) / r.var_g;
    envelope[std::size_t(r.n)] = std::max(envelope[std::size_t(r.n)], resid);
  }
  for (int n = n_lo; n <= n_hi; ++n) {
    if (envelope[std::size_t(n)] > 0.0) {
      xs.push_back(n);
      ys.push_back(std::log(envelope[std::size_t(n)]));
    }
  }
  fit.points = int(xs.size());
  if (xs.size() >= 2) {
    auto lf = linear_fit(xs, ys);
    fit.xi1 = std::exp(lf.slope);
    fit.r2 = lf.r2;
    for (std::size_t k = 0; k < xs.size(); ++k)
      fit.D1 = std::max(fit.D1, std::exp(ys[k]) / std::pow(fit.xi1, xs[k]));
  } else if (xs.size() == 1) {
    fit.xi1 = 0.0;
    fit.D1 = std::exp(ys[0]);
  }
  for (auto& r : fit.rows) {
    double env1 = fit.xi1 > 0.0 ? fit.D1 * std::pow(fit.xi1, r.n) * r.var_g : 0.0;
    if (xs.size() == 1 && r.n == int(xs[0])) env1 = fit.D1 * r.var_g;
    r.envelope = env1 + fit.D2 * r.l1_norm;
    r.holds = r.var_iterate <= r.envelope * (1.0 + 1e-9) + 1e-14;
  }
  fit.pass = fit.xi1 < 1.0;
  return fit;
}

CorrelationResult operator_correlation(const TransferMatrix& m, const SpectralData& s,
                                       std::span<const double> phi_vals,
                                       std::span<const double> psi_vals, int n_max,
                                       double zero_floor) {
  if (phi_vals.size() != m.dim || psi_vals.size() != m.dim) {
    throw DimensionError("observables must be sampled at the matrix level");
  }
  CorrelationResult out;
  std::vector<double> u(m.dim), w(m.dim);
  double mean = 0.0;
  for (std::size_t i = 0; i < m.dim; ++i) {
    u[i] = phi_vals[i] * s.h[i];
    mean += u[i] * s.nu[i];
  }
  double scale = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double c = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i) c += (u[i] - s.h[i] * mean) * psi_vals[i] * s.nu[i];
    out.n.push_back(n);
    out.c.push_back(c);
    if (n == 0) scale = std::max(1.0, std::abs(c));
    if (n < n_max) {
      apply_into(m, u, w);
      for (std::size_t i = 0; i < m.dim; ++i) u[i] = w[i] / s.lambda;
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 1; k < out.c.size(); ++k) {
    if (std::abs(out.c[k]) > zero_floor * scale) {
      xs.push_back(out.n[k]);
      ys.push_back(std::log(std::abs(out.c[k])));
    }
  }
  if (xs.empty()) {
    out.exact_independence = true;
    return out;
  }
  // correlations that drop to zero abruptly (not by reaching the floor) decay faster
  // than any exponential
  const bool cut = xs.back() < out.n.back() && ys.back() > std::log(1e3 * zero_floor * scale);
  if (xs.size() == 1 || cut) {
    out.C = std::exp(*std::max_element(ys.begin(), ys.end()));
    out.xi_fit = 0.0;
    return out;
  }
  auto lf = linear_fit(xs, ys);
  out.xi_fit = std::exp(lf.slope);
  out.C = std::exp(lf.intercept);
  out.r2 = lf.r2;
  return out;
}

std::vector<double> sample_midpoints(const CylinderTree& tree, int n, const Observable& g) {
  std::vector<double> v(tree.count(n));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(tree.interval(n, i).mid());
  return v;
}

std::vector<double> sample_cell_average(const CylinderTree& tree, int n, const Observable& g,
                                        int quad) {
  std::vector<double> v(tree.count(n));
  for (std::size_t i = 0; i < v.size(); ++i) {
    double lo = tree.lo(n, i), d = tree.diameter(n, i), s = 0.0;
    for (int k = 0; k < quad; ++k) s += g(lo + d * (k + 0.5) / quad);
    v[i] = s / quad;
  }
  return v;
}

}  // namespace thermo
