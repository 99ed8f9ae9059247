#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thermo/dynamics.hpp"
#include "thermo/potential.hpp"

namespace thermo {

struct ValidatorOptions {
  std::optional<double> c;
  std::optional<double> gamma;
  std::optional<double> eps0;
  std::optional<double> theta;
  double m = 1.0;            // multiplier of log L in the oscillation relation
  int derivative_grid = 2048;
  int tau_horizon = 64;
  int tau_orbits = 512;
  std::uint64_t seed = 1;
};

struct Check {
  bool holds = false;
  double margin = 0.0;  // positive when the inequality holds
};

struct HypothesisReport {
  double sigma = 0.0;
  double L = 1.0;
  double derivative_resolution = 0.0;  // certified minus refined derivative bound
  std::size_t q = 0;
  int deg = 0;
  double alpha = 1.0;
  double osc = 0.0;
  double c = 0.0;
  double c_max = 0.0;
  double gamma = 0.7;
  double tau = 0.0;
  double tau_lemma = 0.0;  // 2c / log L, or 0 when L = 1
  bool tau_consistent = true;
  double eps0 = 0.0;
  double m = 1.0;

  Check H1, H2, H3a, H3b;
  Check relation_L;          // sigma^{-(1-gamma)} L^gamma < e^{-2c} < 1
  Check relation_expansion;  // log q + c alpha + eps0 < log deg
  Check relation_osc;        // osc < log deg - log q - m log L
  bool log_L_bound = true;   // (log L)^2 <= 2 c^2

  Check star;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double theta = 0.0;

  std::vector<std::string> warnings;

  /// Flat key/value listing in a fixed order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> rows() const;
};

/// Computes the constants of the model/potential pair and checks every hypothesis.
/// Violations are reported through the Check fields; only malformed models throw.
HypothesisReport validate_hypotheses(const MapModel& model, const Potential& phi, double alpha,
                                     const ValidatorOptions& opt = {});

}  // namespace thermo
