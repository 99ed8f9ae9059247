#include "thermo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermo/error.hpp"

namespace thermo {

namespace {

constexpr double kTol = 1e-12;

// Safeguarded Newton on an increasing function over [a, b].
template <class F, class DF>
double solve_increasing(F&& f, DF&& df, double target, double a, double b) {
  double fa = f(a) - target;
  double fb = f(b) - target;
  if (fa >= 0.0) return a;
  if (fb <= 0.0) return b;
  double x = a + (b - a) * (-fa) / (fb - fa);
  for (int it = 0; it < 200; ++it) {
    double fx = f(x) - target;
    if (fx == 0.0) return x;
    if (fx < 0.0) a = x; else b = x;
    double d = df(x);
    double nx = x - fx / d;
    if (!(nx > a && nx < b) || !std::isfinite(nx)) nx = 0.5 * (a + b);
    if (std::abs(nx - x) < 1e-16 || b - a < 1e-16) return nx;
    x = nx;
  }
  double fx = f(x) - target;
  if (std::abs(fx) > 1e-13) {
    throw ConvergenceError("inverse branch root finding did not converge (residual " +
                           std::to_string(fx) + ")");
  }
  return x;
}

}  // namespace

MapModel MapModel::piecewise_linear(const LinearSpec& spec,
                                    const std::vector<std::size_t>& non_expanding) {
  const auto& e = spec.endpoints;
  if (e.size() < 2) throw ModelError("piecewise-linear map needs at least two endpoints");
  std::size_t n = e.size() - 1;
  if (spec.slopes.size() != n || spec.image_starts.size() != n) {
    throw ModelError("piecewise-linear map: slopes/image_starts must have one entry per block");
  }
  if (e.front() != 0.0 || e.back() != 1.0) throw ModelError("endpoints must start at 0 and end at 1");
  MapModel m;
  m.kind_ = MapKind::PiecewiseLinear;
  m.linear_ = spec;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(e[i + 1] > e[i])) throw ModelError("endpoints must be strictly increasing");
    double s = spec.slopes[i];
    if (!(s > 0.0) || !std::isfinite(s)) throw ModelError("slopes must be positive");
    Block b;
    b.domain = {e[i], e[i + 1]};
    b.image_lo = spec.image_starts[i];
    b.image_hi = spec.image_starts[i] + s * (e[i + 1] - e[i]);
    if (b.image_hi - b.image_lo > 1.0 + kTol) {
      throw ModelError("block " + std::to_string(i) + " wraps more than once around the circle");
    }
    m.blocks_.push_back(b);
    m.slopes_.push_back(s);
  }
  m.finalize(non_expanding);
  return m;
}

MapModel MapModel::doubling(const std::vector<std::size_t>& non_expanding) {
  return piecewise_linear({{0.0, 0.5, 1.0}, {0.0, 0.0}, {2.0, 2.0}}, non_expanding);
}

double MapModel::smooth_F(double x) const {
  double v = smooth_.degree * x;
  for (std::size_t k = 0; k < smooth_.sine.size(); ++k) {
    v += smooth_.epsilon * smooth_.sine[k] * std::sin(kTwoPi * double(k + 1) * x);
  }
  return v;
}

double MapModel::smooth_dF(double x) const {
  double v = smooth_.degree;
  for (std::size_t k = 0; k < smooth_.sine.size(); ++k) {
    double w = kTwoPi * double(k + 1);
    v += smooth_.epsilon * smooth_.sine[k] * w * std::cos(w * x);
  }
  return v;
}

MapModel MapModel::smooth_deformation(const SmoothSpec& spec,
                                      const std::vector<std::size_t>& non_expanding) {
  if (spec.degree < 2) throw ModelError("smooth deformation needs degree >= 2");
  if (spec.partition_depth < 1 || spec.partition_depth > 8) {
    throw ModelError("partition depth must be in 1..8");
  }
  MapModel m;
  m.kind_ = MapKind::SmoothDeformation;
  m.smooth_ = spec;

  const int grid = 8192;
  double lip = m.derivative_lipschitz();
  double min_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) min_d = std::min(min_d, m.smooth_dF((i + 0.5) / grid));
  if (min_d - lip * 0.5 / grid <= 0.0) {
    throw ModelError("smooth deformation is not a local diffeomorphism (f' vanishes)");
  }

  auto F = [&m](double x) { return m.smooth_F(x); };
  auto dF = [&m](double x) { return m.smooth_dF(x); };
  const int d = spec.degree;
  std::vector<double> base(d + 1);
  base[0] = 0.0;
  base[d] = 1.0;
  for (int k = 1; k < d; ++k) base[k] = solve_increasing(F, dF, double(k), 0.0, 1.0);

  // level-r endpoints: pull the level-(r-1) endpoints back through every base branch
  std::vector<double> prev{0.0};
  for (int r = 1; r <= spec.partition_depth; ++r) {
    std::vector<double> next;
    for (int k = 0; k < d; ++k) {
      for (double y : prev) {
        next.push_back(y == 0.0 ? base[k]
                                : solve_increasing(F, dF, k + y, base[k], base[k + 1]));
      }
    }
    std::sort(next.begin(), next.end());
    if (r == spec.partition_depth) {
      // image arcs come from the previous level's endpoints
      std::vector<double> targets = prev;
      targets.push_back(1.0);
      std::size_t per = prev.size();
      for (int k = 0; k < d; ++k) {
        for (std::size_t t = 0; t < per; ++t) {
          std::size_t idx = k * per + t;
          Block b;
          b.domain.lo = next[idx];
          b.domain.hi = idx + 1 < next.size() ? next[idx + 1] : 1.0;
          b.image_lo = targets[t];
          b.image_hi = targets[t + 1];
          m.blocks_.push_back(b);
          m.base_offset_.push_back(k);
        }
      }
    }
    prev = std::move(next);
  }
  m.finalize(non_expanding);
  return m;
}

void MapModel::finalize(const std::vector<std::size_t>& non_expanding) {
  const std::size_t n = blocks_.size();
  for (std::size_t i : non_expanding) {
    if (i >= n) throw ModelError("non-expanding block index " + std::to_string(i) + " out of range");
    blocks_[i].expanding = false;
  }
  transitions_.assign(n * n, 0);
  predecessors_.assign(n, {});
  successors_.assign(n, {});
  defects_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const Block& bi = blocks_[i];
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < n; ++j) {
      const Interval& q = blocks_[j].domain;
      bool contained = false;
      bool meets = false;
      double where = 0.0;
      for (double k = std::floor(bi.image_lo) - 1.0; k <= std::ceil(bi.image_hi) + 1.0; k += 1.0) {
        double lo = q.lo + k;
        double hi = q.hi + k;
        if (lo < bi.image_hi - kTol && hi > bi.image_lo + kTol) {
          meets = true;
          if (lo >= bi.image_lo - kTol && hi <= bi.image_hi + kTol) {
            contained = true;
            where = lo;
          }
        }
      }
      if (contained) {
        transitions_[i * n + j] = 1;
        order.emplace_back(where, j);
      } else if (meets) {
        defects_.push_back("image of block " + std::to_string(i) + " meets block " +
                           std::to_string(j) + " without containing it");
      }
    }
    std::sort(order.begin(), order.end());
    for (auto& [w, j] : order) successors_[i].push_back(j);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (admissible(i, j)) predecessors_[j].push_back(i);

  degree_ = -1;
  for (std::size_t j = 0; j < n; ++j) {
    int cnt = int(predecessors_[j].size());
    if (degree_ < 0) degree_ = cnt;
    if (cnt != degree_) {
      defects_.push_back("block " + std::to_string(j) + " has " + std::to_string(cnt) +
                         " preimages, expected " + std::to_string(degree_));
    }
  }
  if (degree_ <= 0) defects_.push_back("map has no preimages for some block");

  // covering time
  covering_time_ = 0;
  std::vector<std::vector<unsigned char>> reach(n, std::vector<unsigned char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : successors_[i]) reach[i][j] = 1;
  for (std::size_t N = 1; N <= n * n + 1; ++N) {
    bool all = true;
    for (std::size_t i = 0; i < n && all; ++i)
      for (std::size_t j = 0; j < n && all; ++j) all = reach[i][j] != 0;
    if (all) {
      covering_time_ = int(N);
      break;
    }
    std::vector<std::vector<unsigned char>> nxt(n, std::vector<unsigned char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (reach[i][k])
          for (std::size_t j : successors_[k]) nxt[i][j] = 1;
    reach = std::move(nxt);
  }
  if (covering_time_ == 0) defects_.push_back("no iterate of the partition covers the circle");
}

std::size_t MapModel::q() const {
  std::size_t k = 0;
  for (const auto& b : blocks_) k += b.expanding ? 0 : 1;
  return k;
}

std::size_t MapModel::block_of(double x) const {
  x = wrap(x);
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), x,
                             [](double v, const Block& b) { return v < b.domain.lo; });
  return std::size_t(it - blocks_.begin()) - 1;
}

bool MapModel::is_endpoint(double x) const {
  x = wrap(x);
  return blocks_[block_of(x)].domain.lo == x;
}

double MapModel::max_block_length() const {
  double m = 0.0;
  for (const auto& b : blocks_) m = std::max(m, b.domain.length());
  return m;
}

double MapModel::lift(std::size_t b, double x) const {
  const Block& bl = blocks_[b];
  if (kind_ == MapKind::PiecewiseLinear) return bl.image_lo + slopes_[b] * (x - bl.domain.lo);
  return smooth_F(x) - base_offset_[b];
}

double MapModel::derivative(std::size_t b, double x) const {
  if (kind_ == MapKind::PiecewiseLinear) return slopes_[b];
  return smooth_dF(x);
}

double MapModel::derivative_lipschitz() const {
  if (kind_ == MapKind::PiecewiseLinear) return 0.0;
  double l = 0.0;
  for (std::size_t k = 0; k < smooth_.sine.size(); ++k) {
    double w = kTwoPi * double(k + 1);
    l += std::abs(smooth_.epsilon * smooth_.sine[k]) * w * w;
  }
  return l;
}

double MapModel::min_derivative(std::size_t b, Interval iv, int samples) const {
  if (kind_ == MapKind::PiecewiseLinear) return slopes_[b];
  samples = std::max(samples, 2);
  double h = iv.length() / (samples - 1);
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) m = std::min(m, smooth_dF(iv.lo + i * h));
  return m - 0.5 * h * derivative_lipschitz();
}

double MapModel::solve_lift(std::size_t b, double target) const {
  const Block& bl = blocks_[b];
  if (kind_ == MapKind::PiecewiseLinear) {
    double x = bl.domain.lo + (target - bl.image_lo) / slopes_[b];
    return std::clamp(x, bl.domain.lo, bl.domain.hi);
  }
  if (target <= bl.image_lo) return bl.domain.lo;
  if (target >= bl.image_hi) return bl.domain.hi;
  double off = base_offset_[b];
  return solve_increasing([this](double x) { return smooth_F(x); },
                          [this](double x) { return smooth_dF(x); }, target + off,
                          bl.domain.lo, bl.domain.hi);
}

std::optional<double> MapModel::lift_into_image(std::size_t b, double y) const {
  const Block& bl = blocks_[b];
  double k = std::ceil(bl.image_lo - kTol - y);
  double yl = y + k;
  if (yl > bl.image_hi + kTol) return std::nullopt;
  return std::clamp(yl, bl.image_lo, bl.image_hi);
}

std::string MapModel::describe() const {
  std::ostringstream os;
  os.precision(6);
  if (kind_ == MapKind::PiecewiseLinear) {
    os << "piecewise-linear Markov map, " << size() << " blocks";
  } else {
    os << "f(x) = " << smooth_.degree << "x + " << smooth_.epsilon << "*g(x) mod 1, depth "
       << smooth_.partition_depth << " partition, " << size() << " blocks";
  }
  os << ", degree " << degree_ << ", q=" << q();
  return os.str();
}

double eval_map(const MapModel& model, double x) {
  x = wrap(x);
  return wrap(model.lift(model.block_of(x), x));
}

double inverse_deriv_norm(const MapModel& model, double x) {
  x = wrap(x);
  std::size_t b = model.block_of(x);
  double d = model.derivative(b, x);
  if (model.is_endpoint(x)) {
    std::size_t left = (b + model.size() - 1) % model.size();
    double dl = model.derivative(left, x == 0.0 ? 1.0 : x);
    if (std::abs(dl - d) > 1e-12 * std::max(std::abs(d), 1.0))
      throw BoundaryPointError("derivative jumps at a partition endpoint");
  }
  return 1.0 / std::abs(d);
}

double inverse_branch(const MapModel& model, std::size_t branch, double y) {
  if (branch >= model.size()) throw ModelError("branch index out of range");
  auto yl = model.lift_into_image(branch, wrap(y));
  if (!yl) throw NotInImageError("point is not in the image of branch " + std::to_string(branch));
  return model.solve_lift(branch, *yl);
}

std::vector<double> forward_orbit(const MapModel& model, double x, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  x = wrap(x);
  for (std::size_t j = 0; j < n; ++j) {
    out.push_back(x);
    x = eval_map(model, x);
  }
  return out;
}

std::vector<double> orbit_from_itinerary(const MapModel& model,
                                         std::span<const std::size_t> itinerary,
                                         double terminal) {
  std::vector<double> out(itinerary.size());
  if (itinerary.empty()) return out;
  out.back() = wrap(terminal);
  for (std::size_t k = itinerary.size() - 1; k-- > 0;) {
    if (!model.admissible(itinerary[k], itinerary[k + 1])) {
      throw ModelError("itinerary contains an inadmissible transition");
    }
    out[k] = inverse_branch(model, itinerary[k], out[k + 1]);
  }
  return out;
}

std::vector<int> hyperbolic_times_along(const MapModel& model, std::span<const double> orbit,
                                        double c) {
  std::vector<int> times;
  // running maximum over suffix sums of log|Df^{-1}| + c
  double suffix = 0.0;
  for (std::size_t j = 0; j < orbit.size(); ++j) {
    double a = std::log(inverse_deriv_norm(model, orbit[j])) + c;
    suffix = a + std::max(0.0, j == 0 ? 0.0 : suffix);
    if (suffix < 0.0) times.push_back(int(j + 1));
  }
  return times;
}

std::vector<int> hyperbolic_times(const MapModel& model, double x, double c, int n_max) {
  if (n_max < 1) return {};
  auto orbit = forward_orbit(model, x, std::size_t(n_max));
  return hyperbolic_times_along(model, orbit, c);
}

std::optional<int> first_hyperbolic_time(const MapModel& model, double x, double c, int cap) {
  x = wrap(x);
  double suffix = 0.0;
  for (int j = 0; j < cap; ++j) {
    double a = std::log(inverse_deriv_norm(model, x)) + c;
    suffix = a + std::max(0.0, j == 0 ? 0.0 : suffix);
    if (suffix < 0.0) return j + 1;
    x = eval_map(model, x);
  }
  return std::nullopt;
}

}  // namespace thermo
