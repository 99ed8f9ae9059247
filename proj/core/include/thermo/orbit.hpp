#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "thermo/measure.hpp"
#include "thermo/rng.hpp"

namespace thermo {

/// Stationary symbolic orbits of an equilibrium measure given at level N.
///
/// The state is the level-N cylinder of the current point.  One step moves to the
/// cylinder of the image point: a child of the shifted word chosen with probability
/// mu(child) / mu(parent).  The discrete mu = h nu is exactly shift-invariant, so the
/// chain is stationary from a mu-distributed start.
class OrbitSampler {
 public:
  explicit OrbitSampler(const CylinderMeasure& mu);

  [[nodiscard]] int level() const { return level_; }
  [[nodiscard]] const CylinderTree& tree() const { return mu_->tree(); }
  [[nodiscard]] const CylinderMeasure& measure() const { return *mu_; }

  std::size_t draw_state(Rng& rng) const;
  /// State drawn from mu conditioned on the level-n cylinder q.
  std::size_t draw_state_in(int n, std::size_t q, Rng& rng) const;
  std::size_t step(std::size_t state, Rng& rng) const;

  /// Level-N index -> index of its level-n ancestor.
  [[nodiscard]] std::vector<std::uint32_t> ancestor_map(int n) const;

  /// states[0] = start, states[k+1] = step(states[k]); len states in total.
  void run(std::size_t start, std::size_t len, Rng& rng, std::vector<std::uint32_t>& states) const;

  /// Orbit points x_0..x_{len-1} with x_k in states[k]: a uniform point of the last
  /// cylinder pulled back through the inverse branches.
  std::vector<double> points(std::span<const std::uint32_t> states, Rng& rng) const;

 private:
  const CylinderMeasure* mu_;
  int level_;
  std::vector<double> cum_;  // per level-N cylinder: cumulative share among its siblings
};

}  // namespace thermo
