#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace thermo {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> v);

double normal_cdf(double z);
double quantile(std::vector<double> v, double p);
double median(std::vector<double> v);

/// Kolmogorov-Smirnov distance between the empirical law of `z` and N(0, 1).
double ks_normal(std::vector<double> z);

/// Kolmogorov-Smirnov distance to an arbitrary continuous CDF.
double ks_distance(std::vector<double> z, const std::function<double(double)>& cdf);

/// Percentile bootstrap interval of a statistic; resampling is seeded and serial.
struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
};
BootstrapCi bootstrap_ci(std::span<const double> data,
                         const std::function<double(std::span<const double>)>& stat,
                         int resamples, std::uint64_t seed, double level = 0.95);

}  // namespace thermo
