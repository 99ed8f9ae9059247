#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thermo/circle.hpp"

namespace thermo {

enum class MapKind { PiecewiseLinear, SmoothDeformation };

/// One element Q_i of the Markov partition together with its branch.
///
/// The branch is stored as an increasing lift F_i : [lo, hi] -> [image_lo, image_hi]
/// with f = F_i mod 1 on the block and image_hi - image_lo <= 1.
struct Block {
  Interval domain;
  double image_lo = 0.0;
  double image_hi = 0.0;
  bool expanding = true;
};

/// Piecewise-linear Markov circle map: block i is [endpoints[i], endpoints[i+1])
/// and maps affinely with slope slopes[i] starting at image_starts[i].
struct LinearSpec {
  std::vector<double> endpoints;
  std::vector<double> image_starts;
  std::vector<double> slopes;
};

/// f(x) = degree * x + epsilon * sum_k sine[k-1] * sin(2 pi k x)  (mod 1).
///
/// The working partition is the depth-`partition_depth` refinement of the
/// partition cut at the preimages of the fixed point 0.
struct SmoothSpec {
  int degree = 2;
  double epsilon = 0.0;
  std::vector<double> sine{1.0};
  int partition_depth = 1;
};

class MapModel {
 public:
  static MapModel piecewise_linear(const LinearSpec& spec,
                                   const std::vector<std::size_t>& non_expanding = {});
  static MapModel smooth_deformation(const SmoothSpec& spec,
                                     const std::vector<std::size_t>& non_expanding = {});
  static MapModel doubling(const std::vector<std::size_t>& non_expanding = {});

  [[nodiscard]] MapKind kind() const { return kind_; }
  [[nodiscard]] std::size_t size() const { return blocks_.size(); }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] std::size_t q() const;
  [[nodiscard]] std::size_t p() const { return size() - q(); }
  [[nodiscard]] const Block& block(std::size_t i) const { return blocks_[i]; }
  [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
  [[nodiscard]] const LinearSpec& linear_spec() const { return linear_; }
  [[nodiscard]] const SmoothSpec& smooth_spec() const { return smooth_; }

  /// Index of the block containing x (boundary points go to the block they open).
  [[nodiscard]] std::size_t block_of(double x) const;
  [[nodiscard]] bool is_endpoint(double x) const;
  [[nodiscard]] double max_block_length() const;

  /// Lift F_b(x) for x in the closure of block b.
  [[nodiscard]] double lift(std::size_t b, double x) const;
  /// f'(x) computed on block b (one-sided at the endpoints).
  [[nodiscard]] double derivative(std::size_t b, double x) const;
  /// Lipschitz constant of f' (0 for piecewise-linear maps).
  [[nodiscard]] double derivative_lipschitz() const;
  /// Lower bound for f' over `iv`, which must lie inside the closure of block b.
  /// Exact for piecewise-linear maps, certified through derivative_lipschitz() otherwise.
  [[nodiscard]] double min_derivative(std::size_t b, Interval iv, int samples = 9) const;
  /// Solves lift(b, x) = target for x in the closure of block b (|residual| <= 1e-14).
  [[nodiscard]] double solve_lift(std::size_t b, double target) const;
  /// Lifts a circle point into the image arc of block b; nullopt if it is not in the image.
  [[nodiscard]] std::optional<double> lift_into_image(std::size_t b, double y) const;

  /// Q_j is contained in f(Q_i).
  [[nodiscard]] bool admissible(std::size_t i, std::size_t j) const {
    return transitions_[i * size() + j] != 0;
  }
  /// Blocks i with Q_j contained in f(Q_i), in increasing order.
  [[nodiscard]] const std::vector<std::size_t>& predecessors(std::size_t j) const {
    return predecessors_[j];
  }
  /// Blocks j contained in f(Q_i), ordered along the image arc.
  [[nodiscard]] const std::vector<std::size_t>& successors(std::size_t i) const {
    return successors_[i];
  }
  /// Pairs (i, j) where f(Q_i) meets Q_j without containing it, and other (H1) defects.
  [[nodiscard]] const std::vector<std::string>& markov_defects() const { return defects_; }
  [[nodiscard]] bool is_markov() const { return defects_.empty(); }
  /// Smallest N with f^N(Q_i) = circle for all i, or 0 if none up to #Q^2.
  [[nodiscard]] int covering_time() const { return covering_time_; }

  [[nodiscard]] std::string describe() const;

 private:
  MapModel() = default;
  void finalize(const std::vector<std::size_t>& non_expanding);
  [[nodiscard]] double smooth_F(double x) const;
  [[nodiscard]] double smooth_dF(double x) const;

  MapKind kind_ = MapKind::PiecewiseLinear;
  std::vector<Block> blocks_;
  std::vector<double> slopes_;         // piecewise-linear only
  std::vector<int> base_offset_;       // smooth only: integer subtracted from F on the block
  LinearSpec linear_;
  SmoothSpec smooth_;
  int degree_ = 0;
  std::vector<unsigned char> transitions_;
  std::vector<std::vector<std::size_t>> predecessors_;
  std::vector<std::vector<std::size_t>> successors_;
  std::vector<std::string> defects_;
  int covering_time_ = 0;
};

double eval_map(const MapModel& model, double x);

/// 1/|f'(x)|; throws BoundaryPointError on a partition endpoint where f' jumps.
double inverse_deriv_norm(const MapModel& model, double x);

/// The unique x in closure(Q_branch) with f(x) = y; throws NotInImageError.
double inverse_branch(const MapModel& model, std::size_t branch, double y);

/// x, f(x), ..., f^{n-1}(x) by forward iteration.
std::vector<double> forward_orbit(const MapModel& model, double x, std::size_t n);

/// Builds the exact orbit with a prescribed itinerary by pulling `terminal`
/// (a point of the last block) back through the inverse branches.
/// Returns x_0..x_{len-1} with x_k in Q_{itinerary[k]} and f(x_k) = x_{k+1}.
std::vector<double> orbit_from_itinerary(const MapModel& model,
                                         std::span<const std::size_t> itinerary,
                                         double terminal);

/// Every n <= n_max that is a c-hyperbolic time for x (sorted).
std::vector<int> hyperbolic_times(const MapModel& model, double x, double c, int n_max);

/// Same test along an already computed orbit x_0..x_{T-1}; returns times n <= T.
std::vector<int> hyperbolic_times_along(const MapModel& model, std::span<const double> orbit,
                                        double c);

std::optional<int> first_hyperbolic_time(const MapModel& model, double x, double c, int cap);

}  // namespace thermo
