#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermo/circle.hpp"
#include "thermo/dynamics.hpp"

namespace thermo {

/// A level-n cylinder: the set of points whose first n itinerary symbols are `word`.
struct Cylinder {
  int level = 0;
  std::size_t index = 0;
  Interval interval;
  std::vector<std::uint8_t> word;
  std::optional<std::size_t> parent;  // index at level-1 (drop last symbol)

  [[nodiscard]] std::string word_string() const;
};

/// Refined partitions Q^(1), Q^(2), ... stored level by level.
///
/// Cylinders of each level are ordered by position on the circle, so the
/// descendants of any cylinder form a contiguous index range at every deeper level.
class CylinderTree {
 public:
  explicit CylinderTree(MapModel model, std::size_t max_count = std::size_t(1) << 24);

  [[nodiscard]] const MapModel& model() const { return model_; }
  [[nodiscard]] int depth() const { return int(levels_.size()); }

  /// Builds levels up to n; throws ResourceError past the memory guard.
  void build_to(int n);
  /// The level-n cylinders (builds missing levels).
  std::vector<Cylinder> refine(int n);

  [[nodiscard]] std::size_t count(int n) const { return L(n).lo.size(); }
  [[nodiscard]] double lo(int n, std::size_t i) const { return L(n).lo[i]; }
  [[nodiscard]] double hi(int n, std::size_t i) const { return L(n).hi[i]; }
  [[nodiscard]] Interval interval(int n, std::size_t i) const { return {L(n).lo[i], L(n).hi[i]}; }
  [[nodiscard]] double diameter(int n, std::size_t i) const { return L(n).hi[i] - L(n).lo[i]; }
  [[nodiscard]] std::span<const std::uint8_t> word(int n, std::size_t i) const {
    return {L(n).words.data() + i * std::size_t(n), std::size_t(n)};
  }
  [[nodiscard]] std::uint8_t first_symbol(int n, std::size_t i) const { return word(n, i)[0]; }
  [[nodiscard]] std::uint8_t last_symbol(int n, std::size_t i) const { return word(n, i)[n - 1]; }
  /// Level n-1 index obtained by dropping the last symbol (n >= 2).
  [[nodiscard]] std::size_t parent(int n, std::size_t i) const { return L(n).parent[i]; }
  /// Level n-1 index of the shifted word, i.e. f(Q_w) (n >= 2).
  [[nodiscard]] std::size_t shift(int n, std::size_t i) const { return L(n).shift[i]; }
  /// Children of cylinder i at level n+1 form [child_begin, child_end).
  [[nodiscard]] std::size_t child_begin(int n, std::size_t i) const { return L(n).child[i]; }
  [[nodiscard]] std::size_t child_end(int n, std::size_t i) const { return L(n).child[i + 1]; }

  /// Index at level m <= n of the ancestor of (n, i).
  [[nodiscard]] std::size_t ancestor(int n, std::size_t i, int m) const;
  /// Descendants of (n, i) at level m >= n.
  [[nodiscard]] std::pair<std::size_t, std::size_t> descendants(int n, std::size_t i, int m) const;
  /// Index at level n-j of sigma^j(w), the cylinder f^j(Q_w).
  [[nodiscard]] std::size_t image(int n, std::size_t i, int j) const;
  /// Level-n indices whose shifted word is the level-(n-1) cylinder p (n >= 2),
  /// or whose first symbol precedes block p (n = 1).
  [[nodiscard]] std::span<const std::size_t> shift_preimages(int n, std::size_t p) const;

  /// Index of the level-n cylinder containing x (left-closed convention).
  [[nodiscard]] std::size_t locate(int n, double x) const;
  [[nodiscard]] Cylinder cylinder(int n, std::size_t i) const;
  [[nodiscard]] Cylinder cylinder_of(double x, int n);

  /// Number of symbols of the word in non-expanding blocks.
  [[nodiscard]] int non_expanding_visits(int n, std::size_t i) const;

 private:
  struct Level {
    std::vector<double> lo, hi;
    std::vector<std::uint32_t> parent, shift;
    std::vector<std::uint64_t> child;  // size count+1 once the next level exists
    std::vector<std::uint8_t> words;
    std::vector<std::size_t> preimage_offsets, preimages;  // inverse of shift
  };
  [[nodiscard]] const Level& L(int n) const;
  void build_level_one();
  void build_next();
  void index_shift(int n);

  MapModel model_;
  std::size_t max_count_;
  std::vector<Level> levels_;
};

class CylinderMeasure;

struct BSet {
  int level = 0;
  double gamma = 0.0;
  std::vector<std::size_t> members;
  double measure = 0.0;  // only when a measure was supplied
};

/// B(n, gamma): cylinders with more than gamma*n symbols in the non-expanding blocks.
BSet classify_B(const CylinderTree& tree, int n, double gamma,
                const CylinderMeasure* measure = nullptr);

enum class HyperbolicStatus : std::uint8_t { No = 0, Approximate = 1, Certified = 2 };

/// Status per level-n cylinder: Certified when the worst-case derivative bounds on
/// every image cylinder give a c-hyperbolic time, Approximate when only the
/// `samples` sample points (endpoints included) pass.
std::vector<HyperbolicStatus> hyperbolic_cylinders(const CylinderTree& tree, int n, double c,
                                                   int samples = 5);

/// Whether the word of (n, i) overlaps itself at some lag 1 <= j <= lag_max.
bool has_short_return(const CylinderTree& tree, int n, std::size_t i, int lag_max);

/// Level-n cylinders with f^j(Q) disjoint from Q for 1 <= j <= floor(zeta*n).
std::vector<std::size_t> short_return_free(const CylinderTree& tree, int n, double zeta = 0.2);

struct DiameterRow {
  int level = 0;
  double max_all = 0.0, mean_all = 0.0;
  double max_good = 0.0, mean_good = 0.0;  // cylinders outside B(n, gamma)
  double max_bad = 0.0;
  std::size_t count = 0, count_bad = 0;
  double bound = 0.0;   // exp(-c*tau*n) * max diam(Q)
  bool bound_holds = true;
};

std::vector<DiameterRow> diameter_stats(const CylinderTree& tree, int n_lo, int n_hi, double gamma,
                                        double c, double tau);

}  // namespace thermo
