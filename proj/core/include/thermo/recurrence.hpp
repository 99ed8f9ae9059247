#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "thermo/orbit.hpp"
#include "thermo/stats.hpp"

namespace thermo {

/// First k in 1..cap with f^k(x) in target, by forward iteration.
std::optional<long> hitting_time(const MapModel& model, double x, Interval target, long cap);

/// R_n(x): hitting time of the level-n cylinder containing x.
std::optional<long> return_time_Rn(CylinderTree& tree, double x, int n, long cap);

/// Start law of a hitting experiment: mu itself, or mu conditioned on the target
/// (the latter turns hitting times into return times).
enum class StartLaw { Measure, Conditioned };

struct HittingExperiment {
  int level = 0;
  std::size_t target = 0;
  double mu_target = 0.0;
  std::size_t samples = 0;
  double t_max = 10.0;
  long cap = 0;
  StartLaw start = StartLaw::Measure;
  std::vector<long> tau;  // 0 marks a censored sample
  std::size_t censored = 0;
};

/// Symbolic hitting times of the level-n cylinder `target`, capped at ceil(t_max / mu(Q)).
HittingExperiment run_hitting(const OrbitSampler& sampler, int level, std::size_t target,
                              std::size_t samples, double t_max, StartLaw start,
                              std::uint64_t seed);

struct KacResult {
  double product = 0.0;  // E[tau] * mu(Q)
  double se = 0.0;
  double censored_fraction = 0.0;
  bool pass = false;
};

/// |E tau * mu(Q) - 1| < 3 se, censored samples completed with the fitted exponential tail.
KacResult kac_check(const HittingExperiment& e);

struct SurvivalCurve {
  std::vector<double> t;
  std::vector<double> G;
  std::vector<double> reference;
  double ks = 0.0;
  BootstrapCi ci;
};

/// Empirical P(tau > t / mu(Q)) on t = 0, dt, ..., t_max and its distance to exp(-t).
SurvivalCurve hitting_law(const HittingExperiment& e, double dt = 0.05, int bootstrap = 200,
                          std::uint64_t seed = 1);

struct PacResult {
  double mu_E = 0.0;
  std::vector<double> t, p, se, margin;
  double worst_margin = 0.0;  // min over t of t + mu(E) - p
  bool pass = true;           // margin >= -3 se everywhere
};

/// mu(tau_E <= t / mu(E)) <= t + mu(E) for E a union of level-n cylinders.
PacResult pac_bound_check(const OrbitSampler& sampler, int level, std::span<const std::size_t> E,
                          std::span<const double> t_grid, std::size_t samples, std::uint64_t seed);

struct ReturnSamples {
  int n = 0;
  std::vector<long> R;  // 0 marks a censored sample
  std::size_t censored = 0;
  long cap = 0;
};

/// R_n for mu-distributed starting states.
ReturnSamples sample_returns(const OrbitSampler& sampler, int n, std::size_t samples, long cap,
                             std::uint64_t seed);

struct OrnsteinWeissRow {
  int n = 0;
  double mean = 0.0;  // mean of (1/n) log R_n
  double se = 0.0;
  std::size_t censored = 0;
};

struct OrnsteinWeissResult {
  std::vector<OrnsteinWeissRow> rows;
  LinearFit bias_fit;  // mean ~ h + b / n
  double h_ref = 0.0;
};

OrnsteinWeissResult ornstein_weiss(const OrbitSampler& sampler, std::span<const int> n_range,
                                   std::size_t samples, double h_ref, double cap_factor,
                                   std::uint64_t seed);

struct VarianceResult {
  double sigma2 = 0.0;        // Green-Kubo from operator correlations
  std::vector<double> terms;  // term[j] = int Phi_hat (Phi_hat o f^j) dmu
  int truncation = 0;
  double sigma2_mc = 0.0;     // batch-means estimate (NaN when not run)
  double sigma2_mc_se = 0.0;
  bool disagree = false;      // methods differ by more than 20%
};

/// Green-Kubo variance of an observable sampled at the matrix level.
VarianceResult asymptotic_variance(const TransferMatrix& m, const SpectralData& s,
                                   std::span<const double> phi_vals, int lag_max,
                                   double noise_floor = 1e-14);

/// Variance of S_n Phi / sqrt(n) over independent orbit batches of length n.
MeanSe batch_means_variance(const OrbitSampler& sampler, const Observable& phi, double mean_phi,
                            int batch_length, std::size_t batches, std::uint64_t seed);

/// Adds the batch-means cross-check to a Green-Kubo result.
void cross_check_variance(VarianceResult& v, const OrbitSampler& sampler, const Observable& phi,
                          double mean_phi, int batch_length, std::size_t batches,
                          std::uint64_t seed);

struct CltResult {
  double ks = 0.0;
  double sigma = 0.0;
  std::vector<double> z;
};

/// (sigma sqrt n)^{-1} (S_n Phi - n int Phi dmu) for mu-distributed starts; throws
/// SigmaZeroError when sigma^2 is numerically zero.
CltResult clt_check(const OrbitSampler& sampler, const Observable& phi, double mean_phi,
                    double sigma2, int n, std::size_t samples, std::uint64_t seed);

struct FluctuationResult {
  double ks = 0.0;
  BootstrapCi ci;
  std::vector<double> z;
  ReturnSamples returns;
};

/// (log R_n - n h) / (sigma sqrt n) against N(0,1).
FluctuationResult fluctuation_stat(const OrbitSampler& sampler, int n, std::size_t samples,
                                   double h_ref, double sigma_ref, long cap, std::uint64_t seed,
                                   int bootstrap = 200);

struct GapRow {
  int n = 0;
  double t_n = 0.0;
  double p_return = 0.0;   // mu(R_n > t_n)
  double p_hitting = 0.0;  // sum_Q mu(Q) mu(tau_Q > t_n)
  double gap = 0.0;
  double se = 0.0;
  bool hypothesis_ok = true;  // t_n / n large
};

/// mu(R_n > t_n) against the hitting probability of Q_n(x) from an independent
/// mu-distributed start; the two chains share their innovations to reduce variance.
GapRow hitting_vs_return_gap(const OrbitSampler& sampler, int n, double t_n, std::size_t samples,
                             std::uint64_t seed);

}  // namespace thermo
