#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "thermo/cylinders.hpp"
#include "thermo/potential.hpp"

namespace thermo {

enum class WeightConvention { Midpoint, Sup, Inf };

/// Piecewise-constant discretization of the transfer operator on level-n cylinders.
///
/// Row i (cylinder u) holds the columns j whose shifted word is u without its last
/// symbol; the entry is exp(phi) at the preimage of u's representative under the
/// branch of j's first symbol.  Stored in CSR form together with its transpose.
struct TransferMatrix {
  int level = 0;
  std::size_t dim = 0;
  WeightConvention convention = WeightConvention::Midpoint;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;
  std::vector<std::size_t> t_ptr;
  std::vector<std::uint32_t> t_col;
  std::vector<double> t_val;
  double min_entry = 0.0;
  double max_entry = 0.0;

  [[nodiscard]] std::size_t nonzeros() const { return val.size(); }
  /// Row-major dense copy (small dimensions only).
  [[nodiscard]] std::vector<double> dense() const;
};

TransferMatrix assemble(CylinderTree& tree, const Potential& phi, int n,
                        WeightConvention convention = WeightConvention::Midpoint);

std::vector<double> apply(const TransferMatrix& m, std::span<const double> g);
std::vector<double> apply_transpose(const TransferMatrix& m, std::span<const double> g);
void apply_into(const TransferMatrix& m, std::span<const double> g, std::span<double> out);
void apply_transpose_into(const TransferMatrix& m, std::span<const double> g, std::span<double> out);

struct SpectralOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

struct SpectralData {
  int level = 0;
  double lambda = 0.0;
  double lambda_lo = 0.0;  // Collatz-Wielandt bracket
  double lambda_hi = 0.0;
  std::vector<double> h;   // right eigenvector, sum h*nu = 1
  std::vector<double> nu;  // left eigenvector, sum nu = 1
  double gap_xi = std::numeric_limits<double>::quiet_NaN();  // |lambda_2| / lambda
  int iterations = 0;
  double residual_right = 0.0;
  double residual_left = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Power iteration for (lambda, h) and (lambda, nu); throws ConvergenceError.
SpectralData leading_spectrum(const TransferMatrix& m, const SpectralOptions& opt = {});

double pressure(const SpectralData& s);

struct GapResult {
  double xi = 0.0;            // |lambda_2| / lambda
  std::string method;         // "deflated", "nilpotent", "dense"
  int iterations = 0;
  bool converged = false;
  double window_spread = 0.0; // spread of the last windowed contraction ratios
};

/// Second-eigenvalue estimate by deflated power iteration, with a dense fallback
/// when the iteration does not settle and dim <= dense_limit.
GapResult spectral_gap(const TransferMatrix& m, const SpectralData& s, double tol = 1e-9,
                       std::size_t dense_limit = 4096);

/// Dense second eigenvalue of m: checks nilpotency of m - lambda h nu^T by exact
/// powers first, otherwise a full nonsymmetric eigensolve.
GapResult dense_gap(const TransferMatrix& m, const SpectralData& s);

/// All eigenvalues of m (dense), sorted by decreasing modulus.
std::vector<std::complex<double>> dense_eigenvalues(const TransferMatrix& m);

/// Weights exp(S_k phi(Q_k)) for k = 1..levels, from the certified Birkhoff bounds.
struct VariationWeights {
  int levels = 0;
  std::vector<std::vector<double>> w;  // w[k][i], k >= 1
  double sup_phi = 0.0;
  int degree = 0;
};

VariationWeights variation_weights(const CylinderTree& tree, const Potential& phi, int levels,
                                   bool use_bound = true);

struct VariationValue {
  double value = 0.0;        // truncated sum
  double tail_bound = 0.0;   // bound on the omitted terms
  bool tail_diverges = false;
};

/// var_theta of an observable, truncated at n_trunc levels.
VariationValue theta_variation(const CylinderTree& tree, const VariationWeights& vw,
                               const Observable& g, double theta, int n_trunc, double c_tau_alpha,
                               double sup_abs_g);

/// var_theta of a function constant on the level-N cylinders (exact: no tail).
VariationValue theta_variation(const CylinderTree& tree, const VariationWeights& vw,
                               std::span<const double> g_level_n, int level_n, double theta,
                               int n_trunc);

struct LasotaYorkeRow {
  std::size_t sample = 0;
  int n = 0;
  double var_g = 0.0;
  double var_iterate = 0.0;
  double l1_norm = 0.0;
  double ratio = 0.0;     // var_iterate / var_g (NaN for var_g = 0)
  double envelope = 0.0;  // D1 xi1^n var_g + D2 |g|_1
  bool holds = true;
};

struct LasotaYorkeFit {
  double D1 = 0.0;
  double xi1 = 0.0;
  double D2 = 0.0;
  double r2 = std::numeric_limits<double>::quiet_NaN();
  int points = 0;
  bool pass = false;
  std::vector<LasotaYorkeRow> rows;
};

/// Fits var(lambda^-n M^n g) <= D1 xi1^n var(g) + D2 |g|_{L1(nu)} over the samples.
LasotaYorkeFit lasota_yorke_check(const TransferMatrix& m, const SpectralData& s,
                                  const CylinderTree& tree, const VariationWeights& vw,
                                  double theta, const std::vector<std::vector<double>>& g_samples,
                                  int n_lo, int n_hi);

struct CorrelationResult {
  std::vector<int> n;
  std::vector<double> c;
  double C = 0.0;
  double xi_fit = 0.0;
  double r2 = std::numeric_limits<double>::quiet_NaN();
  bool exact_independence = false;
};

/// C_n = int (lambda^-n L^n(Phi h) - h int Phi h dnu) Psi dnu for n = 0..n_max.
CorrelationResult operator_correlation(const TransferMatrix& m, const SpectralData& s,
                                       std::span<const double> phi_vals,
                                       std::span<const double> psi_vals, int n_max,
                                       double zero_floor = 1e-13);

/// Values of an observable at the midpoints of the level-n cylinders.
std::vector<double> sample_midpoints(const CylinderTree& tree, int n, const Observable& g);

/// Values averaged over `quad` equispaced interior points per level-n cylinder.
std::vector<double> sample_cell_average(const CylinderTree& tree, int n, const Observable& g,
                                        int quad = 4);

}  // namespace thermo
