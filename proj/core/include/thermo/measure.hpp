#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "thermo/cylinders.hpp"
#include "thermo/potential.hpp"
#include "thermo/rng.hpp"
#include "thermo/transfer.hpp"

namespace thermo {

enum class MeasureKind { Conformal, Equilibrium };

/// Cylinder weights of nu or mu at a working level, with the coarser levels
/// obtained by summing children.
class CylinderMeasure {
 public:
  CylinderMeasure(const CylinderTree& tree, int level, std::vector<double> weights,
                  MeasureKind kind, double pressure);

  [[nodiscard]] int level() const { return level_; }
  [[nodiscard]] MeasureKind kind() const { return kind_; }
  [[nodiscard]] double pressure() const { return pressure_; }
  [[nodiscard]] std::span<const double> weights() const { return by_level_.back(); }
  /// Weight of cylinder i at level n <= level().
  [[nodiscard]] double weight(int n, std::size_t i) const { return by_level_[std::size_t(n - 1)][i]; }
  [[nodiscard]] std::span<const double> level_weights(int n) const { return by_level_[std::size_t(n - 1)]; }
  /// Cumulative weights at the working level (for sampling).
  [[nodiscard]] std::span<const double> cdf() const { return cdf_; }
  [[nodiscard]] const CylinderTree& tree() const { return *tree_; }

 private:
  const CylinderTree* tree_;
  int level_;
  MeasureKind kind_;
  double pressure_;
  std::vector<std::vector<double>> by_level_;
  std::vector<double> cdf_;
};

CylinderMeasure conformal_measure(const CylinderTree& tree, const SpectralData& s);
CylinderMeasure equilibrium_measure(const CylinderTree& tree, const SpectralData& s);

struct JacobianResult {
  double max_rel_error = 0.0;
  double osc_exp_phi = 0.0;  // max over level-n cylinders of sup e^phi - inf e^phi
  std::size_t worst_index = 0;
};

/// Compares nu(f(A)) with lambda e^{-phi(mid A)} nu(A) over the level-n cylinders A.
JacobianResult jacobian_check(const CylinderMeasure& nu, const Potential& phi,
                              const SpectralData& s, int level);

/// nu(Q_n) / exp(-P n + S_n phi(y)) for y in the closure of the cylinder.
double gibbs_ratio(const CylinderMeasure& nu, const Potential& phi, const SpectralData& s,
                   int level, std::size_t index, double y);

struct GibbsRow {
  int level = 0;
  std::size_t hyperbolic = 0;
  std::size_t approximate = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;  // max_ratio / min_ratio
  double K = 0.0;       // running max of the spread from the first level on
};

/// Gibbs ratios over hyperbolic cylinders (midpoint and both endpoints) per level.
std::vector<GibbsRow> gibbs_sweep(const CylinderMeasure& nu, const Potential& phi,
                                  const SpectralData& s, int n_lo, int n_hi, double c);

struct WeakGibbsTrace {
  std::vector<int> hyperbolic_times;
  std::vector<double> K_n;         // index n-1 holds K_n(x)
  double max_log_rate = 0.0;       // max_n (1/n) log K_n over the second half of the trace
};

/// K_n(x) = K exp[(P + sup|phi|)(n_{i+1} - n_i)] between consecutive hyperbolic times
/// along a given orbit x_0..x_{n_max-1}.
WeakGibbsTrace weak_gibbs_Kn(const MapModel& model, const Potential& phi, double P, double K,
                             std::span<const double> orbit, double c);

/// Cylinder drawn by weight, then a uniform point inside it.
double sample_point(const CylinderMeasure& m, Rng& rng);
std::size_t sample_cylinder(const CylinderMeasure& m, Rng& rng);

/// Midpoint quadrature of g against the measure at its working level.
double integrate(const CylinderMeasure& m, const Observable& g);
/// Quadrature with `quad` equispaced points per cylinder.
double integrate(const CylinderMeasure& m, const Observable& g, int quad);

}  // namespace thermo
