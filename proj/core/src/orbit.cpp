#include "thermo/orbit.hpp"

#include <algorithm>

#include "thermo/error.hpp"

namespace thermo {

OrbitSampler::OrbitSampler(const CylinderMeasure& mu) : mu_(&mu), level_(mu.level()) {
  if (level_ < 2) throw DimensionError("orbit sampler needs a measure at level >= 2");
  const CylinderTree& t = mu.tree();
  const int N = level_;
  auto w = mu.weights();
  cum_.assign(w.size(), 0.0);
  for (std::size_t p = 0; p < t.count(N - 1); ++p) {
    std::size_t b = t.child_begin(N - 1, p), e = t.child_end(N - 1, p);
    double total = 0.0;
    for (std::size_t c = b; c < e; ++c) total += w[c];
    double acc = 0.0;
    for (std::size_t c = b; c < e; ++c) {
      acc += w[c];
      cum_[c] = total > 0.0 ? acc / total : double(c - b + 1) / double(e - b);
    }
    if (e > b) cum_[e - 1] = 1.0;
  }
}

std::size_t OrbitSampler::draw_state(Rng& rng) const { return sample_cylinder(*mu_, rng); }

std::size_t OrbitSampler::draw_state_in(int n, std::size_t q, Rng& rng) const {
  auto [b, e] = tree().descendants(n, q, level_);
  auto cdf = mu_->cdf();
  double base = b == 0 ? 0.0 : cdf[b - 1];
  double top = cdf[e - 1];
  double u = base + uniform01(rng) * (top - base);
  auto it = std::upper_bound(cdf.begin() + std::ptrdiff_t(b), cdf.begin() + std::ptrdiff_t(e), u);
  std::size_t i = std::size_t(it - cdf.begin());
  return std::min(i, e - 1);
}

std::size_t OrbitSampler::step(std::size_t state, Rng& rng) const {
  const CylinderTree& t = tree();
  std::size_t s = t.shift(level_, state);
  std::size_t b = t.child_begin(level_ - 1, s), e = t.child_end(level_ - 1, s);
  double u = uniform01(rng);
  for (std::size_t c = b; c + 1 < e; ++c)
    if (u < cum_[c]) return c;
  return e - 1;
}

std::vector<std::uint32_t> OrbitSampler::ancestor_map(int n) const {
  const CylinderTree& t = tree();
  std::vector<std::uint32_t> a(t.count(level_));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::uint32_t(i);
  for (int k = level_; k > n; --k)
    for (auto& x : a) x = std::uint32_t(t.parent(k, x));
  return a;
}

void OrbitSampler::run(std::size_t start, std::size_t len, Rng& rng,
                       std::vector<std::uint32_t>& states) const {
  states.resize(len);
  if (len == 0) return;
  states[0] = std::uint32_t(start);
  for (std::size_t k = 1; k < len; ++k) states[k] = std::uint32_t(step(states[k - 1], rng));
}

std::vector<double> OrbitSampler::points(std::span<const std::uint32_t> states, Rng& rng) const {
  const CylinderTree& t = tree();
  const MapModel& model = t.model();
  std::vector<double> x(states.size());
  if (states.empty()) return x;
  std::size_t last = states.back();
  x.back() = t.lo(level_, last) + uniform01(rng) * t.diameter(level_, last);
  for (std::size_t k = states.size() - 1; k-- > 0;) {
    x[k] = inverse_branch(model, t.first_symbol(level_, states[k]), x[k + 1]);
  }
  return x;
}

}  // namespace thermo
