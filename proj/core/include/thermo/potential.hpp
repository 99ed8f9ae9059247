#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "thermo/circle.hpp"
#include "thermo/dynamics.hpp"

namespace thermo {

class CylinderTree;

enum class PotentialKind { Constant, Fourier, Bump };

/// An alpha-Holder potential on the circle with certified bounds.
///
/// Fourier: a0 + sum_k cos[k-1] cos(2 pi k x) + sin[k-1] sin(2 pi k x).
/// Bump: height * max(0, 1 - d(x, center)/width)^alpha.
class Potential {
 public:
  static Potential constant(double value);
  static Potential fourier(double a0, std::vector<double> cos_coeffs,
                           std::vector<double> sin_coeffs = {}, double alpha = 1.0);
  static Potential bump(double height, double center, double width, double alpha);

  double operator()(double x) const;

  [[nodiscard]] PotentialKind kind() const { return kind_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double holder_const() const { return holder_; }
  [[nodiscard]] double sup() const { return sup_; }
  [[nodiscard]] double inf() const { return inf_; }
  [[nodiscard]] double oscillation() const { return sup_ - inf_; }
  [[nodiscard]] double sup_abs() const { return std::max(std::abs(sup_), std::abs(inf_)); }
  [[nodiscard]] bool is_constant() const { return kind_ == PotentialKind::Constant; }

  /// Upper/lower bounds of phi over an arc (clamped by the global bounds).
  [[nodiscard]] double sup_on(Interval iv) const;
  [[nodiscard]] double inf_on(Interval iv) const;

  /// phi + c with identical Holder data.
  [[nodiscard]] Potential shifted(double c) const;
  [[nodiscard]] std::string describe() const;

  [[nodiscard]] double a0() const { return a0_; }
  [[nodiscard]] const std::vector<double>& cos_coeffs() const { return cos_; }
  [[nodiscard]] const std::vector<double>& sin_coeffs() const { return sin_; }

 private:
  Potential() = default;
  void certify();

  PotentialKind kind_ = PotentialKind::Constant;
  double a0_ = 0.0;
  std::vector<double> cos_, sin_;
  double height_ = 0.0, center_ = 0.0, width_ = 1.0;
  double alpha_ = 1.0;
  double lip_ = 0.0;   // Lipschitz constant (Fourier)
  double lip2_ = 0.0;  // bound on |phi''| (Fourier)
  double holder_ = 0.0;
  double sup_ = 0.0, inf_ = 0.0;
};

/// Bounded observable: a function with optional modulus data, or an indicator of arcs.
class Observable {
 public:
  static Observable function(std::function<double(double)> g,
                             double lipschitz = std::numeric_limits<double>::infinity(),
                             double range = std::numeric_limits<double>::infinity());
  static Observable indicator(std::vector<Interval> arcs);
  static Observable constant(double value);
  static Observable from_potential(const Potential& phi);

  double operator()(double x) const;
  [[nodiscard]] bool is_indicator() const { return indicator_; }
  [[nodiscard]] const std::vector<Interval>& arcs() const { return arcs_; }
  [[nodiscard]] double lipschitz() const { return lip_; }
  [[nodiscard]] double range() const { return range_; }

 private:
  Observable() = default;
  std::function<double(double)> g_;
  bool indicator_ = false;
  std::vector<Interval> arcs_;
  double lip_ = std::numeric_limits<double>::infinity();
  double range_ = std::numeric_limits<double>::infinity();
};

/// S_n phi(x) = sum_{j<n} phi(f^j x).
double birkhoff_sum(const MapModel& model, const Potential& phi, double x, int n);

struct BirkhoffSup {
  double raw = 0.0;    // max of S_n phi over the sample points
  double bound = 0.0;  // raw + Holder correction along the image cylinders
};

/// Upper bound for sup over the level-n cylinder `index` of S_n phi.
BirkhoffSup sup_birkhoff_on_cylinder(const CylinderTree& tree, const Potential& phi, int level,
                                     std::size_t index, int samples = 8);

/// Lower bound counterpart (inf S_n phi).
BirkhoffSup inf_birkhoff_on_cylinder(const CylinderTree& tree, const Potential& phi, int level,
                                     std::size_t index, int samples = 8);

/// Oscillation of g over an arc: exact for indicators, sampled plus modulus correction otherwise.
double essential_oscillation(const Observable& g, Interval cyl, int quad = 16);

}  // namespace thermo
