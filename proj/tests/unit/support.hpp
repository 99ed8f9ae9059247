#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "thermo/thermo.hpp"

namespace thermo::test {

inline MapModel deformed(int depth = 2) {
  SmoothSpec sp;
  sp.degree = 2;
  sp.epsilon = 0.2;
  sp.partition_depth = depth;
  return depth == 2 ? MapModel::smooth_deformation(sp, {1, 2}) : MapModel::smooth_deformation(sp);
}

inline double f_deformed(double x) { return wrap(2.0 * x + 0.2 * std::sin(kTwoPi * x)); }

inline Observable cos_obs(int k = 1) {
  return Observable::function([k](double x) { return std::cos(kTwoPi * k * x); }, kTwoPi * k, 2.0);
}

/// Everything derived from one transfer matrix.
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

// Hand-rolled generators for the property tests.
struct Gen {
  Rng rng;
  explicit Gen(std::uint64_t seed) : rng(make_stream(seed, stream_tag("unit-gen"), 0)) {}

  double unit() { return uniform01(rng); }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) { return lo + int(rng() % std::uint64_t(hi - lo + 1)); }
  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = range(lo, hi);
    return v;
  }

  /// Random trigonometric potential with |coefficients| <= amp.
  Potential fourier(int modes, double amp) {
    std::vector<double> c(static_cast<std::size_t>(modes)), s(static_cast<std::size_t>(modes));
    for (int k = 0; k < modes; ++k) {
      c[std::size_t(k)] = range(-amp, amp) / (k + 1);
      s[std::size_t(k)] = range(-amp, amp) / (k + 1);
    }
    return Potential::fourier(range(-1.0, 1.0), c, s);
  }

  /// Random two- or three-branch piecewise-linear full-branch Markov map.
  MapModel linear_map() {
    int k = integer(2, 3);
    std::vector<double> cuts{0.0};
    for (int i = 1; i < k; ++i) cuts.push_back(range(0.2, 0.8));
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 1; i < cuts.size(); ++i)
      if (cuts[i] - cuts[i - 1] < 0.1) cuts[i] = cuts[i - 1] + 0.1;
    cuts.push_back(1.0);
    if (cuts[cuts.size() - 1] - cuts[cuts.size() - 2] < 0.05) return MapModel::doubling();
    LinearSpec sp;
    sp.endpoints = cuts;
    for (int i = 0; i < k; ++i) {
      sp.image_starts.push_back(0.0);
      sp.slopes.push_back(1.0 / (cuts[std::size_t(i) + 1] - cuts[std::size_t(i)]));
    }
    return MapModel::piecewise_linear(sp);
  }
};

}  // namespace thermo::test
