#include "thermo/stats.hpp"

#include <algorithm>
#include <cmath>

#include "thermo/error.hpp"
#include "thermo/rng.hpp"

namespace thermo {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("linear_fit: size mismatch");
  LinearFit f;
  f.n = x.size();
  if (f.n < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(f.n);
  my /= double(f.n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  r.n = v.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / double(r.n);
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.sd = r.n > 1 ? std::sqrt(ss / double(r.n - 1)) : 0.0;
  r.se = r.sd / std::sqrt(double(r.n));
  return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  double pos = p * double(v.size() - 1);
  std::size_t i = std::size_t(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  double t = pos - double(i);
  return v[i] * (1.0 - t) + v[i + 1] * t;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double ks_distance(std::vector<double> z, const std::function<double(double)>& cdf) {
  if (z.empty()) return 1.0;
  std::sort(z.begin(), z.end());
  const double n = double(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double F = cdf(z[i]);
    d = std::max(d, std::max(double(i + 1) / n - F, F - double(i) / n));
  }
  return d;
}

double ks_normal(std::vector<double> z) { return ks_distance(std::move(z), normal_cdf); }

BootstrapCi bootstrap_ci(std::span<const double> data,
                         const std::function<double(std::span<const double>)>& stat,
                         int resamples, std::uint64_t seed, double level) {
  BootstrapCi ci;
  if (data.empty() || resamples < 2) return ci;
  Rng rng(splitmix64(seed));
  std::vector<double> buf(data.size());
  std::vector<double> vals;
  vals.reserve(std::size_t(resamples));
  for (int b = 0; b < resamples; ++b) {
    for (auto& x : buf) x = data[std::size_t(rng() % data.size())];
    vals.push_back(stat(buf));
  }
  double a = 0.5 * (1.0 - level);
  ci.lo = quantile(vals, a);
  ci.hi = quantile(vals, 1.0 - a);
  return ci;
}

}  // namespace thermo
