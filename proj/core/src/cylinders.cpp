#include "thermo/cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thermo/error.hpp"
#include "thermo/measure.hpp"

namespace thermo {

std::string Cylinder::word_string() const {
  std::string s;
  for (auto c : word) {
    if (c < 26) {
      s.push_back(char('A' + c));
    } else {
      s += "[" + std::to_string(int(c)) + "]";
    }
  }
  return s;
}

CylinderTree::CylinderTree(MapModel model, std::size_t max_count)
    : model_(std::move(model)), max_count_(max_count) {
  if (!model_.is_markov()) {
    throw ModelError("partition is not Markov: " + model_.markov_defects().front());
  }
  if (model_.size() > 255) throw ModelError("at most 255 partition blocks are supported");
  build_level_one();
}

const CylinderTree::Level& CylinderTree::L(int n) const {
  if (n < 1 || n > depth()) throw DimensionError("level " + std::to_string(n) + " not built");
  return levels_[std::size_t(n - 1)];
}

void CylinderTree::build_level_one() {
  Level lv;
  const std::size_t m = model_.size();
  for (std::size_t i = 0; i < m; ++i) {
    lv.lo.push_back(model_.block(i).domain.lo);
    lv.hi.push_back(model_.block(i).domain.hi);
    lv.words.push_back(std::uint8_t(i));
  }
  lv.parent.assign(m, 0);
  lv.shift.assign(m, 0);
  levels_.push_back(std::move(lv));
  index_shift(1);
}

void CylinderTree::index_shift(int n) {
  Level& lv = levels_[std::size_t(n - 1)];
  lv.preimage_offsets.clear();
  lv.preimages.clear();
  if (n == 1) {
    lv.preimage_offsets.push_back(0);
    for (std::size_t p = 0; p < model_.size(); ++p) {
      for (std::size_t b : model_.predecessors(p)) lv.preimages.push_back(b);
      lv.preimage_offsets.push_back(lv.preimages.size());
    }
    return;
  }
  const std::size_t prev = levels_[std::size_t(n - 2)].lo.size();
  std::vector<std::size_t> counts(prev + 1, 0);
  for (auto s : lv.shift) ++counts[s + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  lv.preimage_offsets = counts;
  lv.preimages.assign(lv.shift.size(), 0);
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < lv.shift.size(); ++i) lv.preimages[fill[lv.shift[i]]++] = i;
}

void CylinderTree::build_next() {
  const int n = depth();
  const Level& cur = levels_.back();
  const std::size_t count = cur.lo.size();

  // sigma(u.s) is the child of sigma(u) ending in s
  auto shifted_children = [&](std::size_t i) -> std::pair<std::size_t, std::size_t> {
    if (n == 1) return {0, 0};
    const Level& up = levels_[std::size_t(n - 2)];
    std::size_t p = cur.shift[i];
    return {up.child[p], up.child[p + 1]};
  };
  std::size_t total = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (n == 1) {
      total += model_.successors(i).size();
    } else {
      auto [b, e] = shifted_children(i);
      total += e - b;
    }
  }
  if (total > max_count_) {
    throw ResourceError("level " + std::to_string(n + 1) + " would hold " + std::to_string(total) +
                        " cylinders (limit " + std::to_string(max_count_) + ")");
  }

  Level nx;
  nx.lo.reserve(total);
  nx.hi.reserve(total);
  nx.parent.reserve(total);
  nx.shift.reserve(total);
  nx.words.reserve(total * std::size_t(n + 1));
  Level& curm = levels_.back();
  curm.child.assign(count + 1, 0);

  struct Child {
    double lo, hi;
    std::size_t sigma;
    std::uint8_t last;
  };
  std::vector<Child> kids;
  for (std::size_t i = 0; i < count; ++i) {
    curm.child[i] = nx.lo.size();
    const std::size_t b0 = cur.words[i * std::size_t(n)];
    kids.clear();
    auto add = [&](std::size_t sigma_level, std::size_t sigma, std::uint8_t last) {
      const Level& sl = levels_[sigma_level - 1];
      double a = sl.lo[sigma];
      double b = sl.hi[sigma];
      auto al = model_.lift_into_image(b0, a);
      if (!al) throw ModelError("Markov image mismatch while refining");
      double bl = *al + (b - a);
      kids.push_back({model_.solve_lift(b0, *al), model_.solve_lift(b0, bl), sigma, last});
    };
    if (n == 1) {
      for (std::size_t s : model_.successors(i)) add(1, s, std::uint8_t(s));
    } else {
      auto [b, e] = shifted_children(i);
      for (std::size_t c = b; c < e; ++c) {
        add(std::size_t(n), c, levels_[std::size_t(n - 1)].words[c * std::size_t(n) + (n - 1)]);
      }
    }
    std::sort(kids.begin(), kids.end(), [](const Child& x, const Child& y) { return x.lo < y.lo; });
    // make the children tile the parent exactly
    kids.front().lo = cur.lo[i];
    kids.back().hi = cur.hi[i];
    for (std::size_t k = 0; k + 1 < kids.size(); ++k) kids[k].hi = kids[k + 1].lo;
    for (const auto& k : kids) {
      nx.lo.push_back(k.lo);
      nx.hi.push_back(k.hi);
      nx.parent.push_back(std::uint32_t(i));
      nx.shift.push_back(std::uint32_t(k.sigma));
      nx.words.insert(nx.words.end(), cur.words.begin() + std::ptrdiff_t(i * std::size_t(n)),
                      cur.words.begin() + std::ptrdiff_t((i + 1) * std::size_t(n)));
      nx.words.push_back(k.last);
    }
  }
  curm.child[count] = nx.lo.size();
  levels_.push_back(std::move(nx));
  index_shift(n + 1);
}

void CylinderTree::build_to(int n) {
  while (depth() < n) build_next();
}

std::vector<Cylinder> CylinderTree::refine(int n) {
  build_to(n);
  std::vector<Cylinder> out;
  out.reserve(count(n));
  for (std::size_t i = 0; i < count(n); ++i) out.push_back(cylinder(n, i));
  return out;
}

std::size_t CylinderTree::ancestor(int n, std::size_t i, int m) const {
  for (int k = n; k > m; --k) i = parent(k, i);
  return i;
}

std::pair<std::size_t, std::size_t> CylinderTree::descendants(int n, std::size_t i, int m) const {
  std::size_t b = i, e = i + 1;
  for (int k = n; k < m; ++k) {
    const auto& ch = L(k).child;
    b = ch[b];
    e = ch[e];
  }
  return {b, e};
}

std::size_t CylinderTree::image(int n, std::size_t i, int j) const {
  for (int k = 0; k < j; ++k) i = shift(n - k, i);
  return i;
}

std::span<const std::size_t> CylinderTree::shift_preimages(int n, std::size_t p) const {
  const Level& lv = L(n);
  return {lv.preimages.data() + lv.preimage_offsets[p],
          lv.preimage_offsets[p + 1] - lv.preimage_offsets[p]};
}

std::size_t CylinderTree::locate(int n, double x) const {
  const auto& lo = L(n).lo;
  x = wrap(x);
  auto it = std::upper_bound(lo.begin(), lo.end(), x);
  return std::size_t(it - lo.begin()) - 1;
}

Cylinder CylinderTree::cylinder(int n, std::size_t i) const {
  Cylinder c;
  c.level = n;
  c.index = i;
  c.interval = interval(n, i);
  auto w = word(n, i);
  c.word.assign(w.begin(), w.end());
  if (n >= 2) c.parent = parent(n, i);
  return c;
}

Cylinder CylinderTree::cylinder_of(double x, int n) {
  if (!std::isfinite(x)) throw BoundaryPointError("point is not finite");
  build_to(n);
  return cylinder(n, locate(n, x));
}

int CylinderTree::non_expanding_visits(int n, std::size_t i) const {
  int v = 0;
  for (auto s : word(n, i)) v += model_.block(s).expanding ? 0 : 1;
  return v;
}

BSet classify_B(const CylinderTree& tree, int n, double gamma, const CylinderMeasure* measure) {
  BSet out;
  out.level = n;
  out.gamma = gamma;
  for (std::size_t i = 0; i < tree.count(n); ++i) {
    if (double(tree.non_expanding_visits(n, i)) > gamma * n) {
      out.members.push_back(i);
      if (measure) out.measure += measure->weight(n, i);
    }
  }
  return out;
}

std::vector<HyperbolicStatus> hyperbolic_cylinders(const CylinderTree& tree, int n, double c,
                                                   int samples) {
  const MapModel& model = tree.model();
  // worst log|Df^{-1}| over each cylinder of levels 1..n
  std::vector<std::vector<double>> worst(std::size_t(n) + 1);
  for (int k = 1; k <= n; ++k) {
    worst[k].resize(tree.count(k));
    for (std::size_t i = 0; i < tree.count(k); ++i) {
      double d = model.min_derivative(tree.first_symbol(k, i), tree.interval(k, i), 33);
      worst[k][i] = d > 0.0 ? -std::log(d) : std::numeric_limits<double>::infinity();
    }
  }
  std::vector<HyperbolicStatus> out(tree.count(n), HyperbolicStatus::No);
  std::vector<double> a(static_cast<std::size_t>(n));
  samples = std::max(samples, 2);
  for (std::size_t i = 0; i < tree.count(n); ++i) {
    std::size_t idx = i;
    for (int j = 0; j < n; ++j) {
      a[j] = worst[n - j][idx] + c;
      if (j + 1 < n) idx = tree.shift(n - j, idx);
    }
    auto suffix_ok = [&]() {
      double s = 0.0;
      for (int j = n - 1; j >= 0; --j) {
        s += a[j];
        if (!(s < 0.0)) return false;
      }
      return true;
    };
    if (suffix_ok()) {
      out[i] = HyperbolicStatus::Certified;
      continue;
    }
    auto w = tree.word(n, i);
    bool all = true;
    for (int s = 0; s < samples && all; ++s) {
      double x = tree.lo(n, i) + tree.diameter(n, i) * s / (samples - 1);
      for (int j = 0; j < n; ++j) {
        a[j] = -std::log(model.derivative(w[j], x)) + c;
        x = wrap(model.lift(w[j], x));
      }
      all = suffix_ok();
    }
    if (all) out[i] = HyperbolicStatus::Approximate;
  }
  return out;
}

bool has_short_return(const CylinderTree& tree, int n, std::size_t i, int lag_max) {
  auto w = tree.word(n, i);
  for (int j = 1; j <= std::min(lag_max, n - 1); ++j) {
    bool overlap = true;
    for (int k = 0; k + j < n && overlap; ++k) overlap = w[k + j] == w[k];
    if (overlap) return true;
  }
  return false;
}

std::vector<std::size_t> short_return_free(const CylinderTree& tree, int n, double zeta) {
  int lag_max = int(std::floor(zeta * n));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < tree.count(n); ++i)
    if (!has_short_return(tree, n, i, lag_max)) out.push_back(i);
  return out;
}

std::vector<DiameterRow> diameter_stats(const CylinderTree& tree, int n_lo, int n_hi, double gamma,
                                        double c, double tau) {
  std::vector<DiameterRow> rows;
  double q_diam = tree.model().max_block_length();
  for (int n = n_lo; n <= n_hi; ++n) {
    DiameterRow r;
    r.level = n;
    r.count = tree.count(n);
    double sum_all = 0.0, sum_good = 0.0;
    std::size_t good = 0;
    r.bound = std::exp(-c * tau * n) * q_diam;
    for (std::size_t i = 0; i < r.count; ++i) {
      double d = tree.diameter(n, i);
      sum_all += d;
      r.max_all = std::max(r.max_all, d);
      bool bad = double(tree.non_expanding_visits(n, i)) > gamma * n;
      if (bad) {
        ++r.count_bad;
        r.max_bad = std::max(r.max_bad, d);
      } else {
        ++good;
        sum_good += d;
        r.max_good = std::max(r.max_good, d);
        double own = tree.diameter(1, tree.ancestor(n, i, 1));
        if (d > std::exp(-c * tau * n) * own * (1.0 + 1e-12)) r.bound_holds = false;
      }
    }
    r.mean_all = r.count ? sum_all / double(r.count) : 0.0;
    r.mean_good = good ? sum_good / double(good) : 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace thermo
