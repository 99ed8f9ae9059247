#include "thermo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thermo/cylinders.hpp"
#include "thermo/error.hpp"

namespace thermo {

Potential Potential::constant(double value) {
  Potential p;
  p.kind_ = PotentialKind::Constant;
  p.a0_ = value;
  p.certify();
  return p;
}

Potential Potential::fourier(double a0, std::vector<double> cos_coeffs,
                             std::vector<double> sin_coeffs, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ModelError("Holder exponent must lie in (0,1]");
  Potential p;
  p.kind_ = PotentialKind::Fourier;
  p.a0_ = a0;
  p.cos_ = std::move(cos_coeffs);
  p.sin_ = std::move(sin_coeffs);
  p.alpha_ = alpha;
  bool all_zero = true;
  for (double v : p.cos_) all_zero = all_zero && v == 0.0;
  for (double v : p.sin_) all_zero = all_zero && v == 0.0;
  if (all_zero) {
    p.kind_ = PotentialKind::Constant;
    p.cos_.clear();
    p.sin_.clear();
  }
  p.certify();
  return p;
}

Potential Potential::bump(double height, double center, double width, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ModelError("Holder exponent must lie in (0,1]");
  if (!(width > 0.0 && width <= 0.5)) throw ModelError("bump width must lie in (0, 0.5]");
  Potential p;
  p.kind_ = PotentialKind::Bump;
  p.height_ = height;
  p.center_ = wrap(center);
  p.width_ = width;
  p.alpha_ = alpha;
  p.certify();
  return p;
}

double Potential::operator()(double x) const {
  switch (kind_) {
    case PotentialKind::Constant:
      return a0_;
    case PotentialKind::Fourier: {
      double v = a0_;
      for (std::size_t k = 0; k < cos_.size(); ++k) v += cos_[k] * std::cos(kTwoPi * (k + 1) * x);
      for (std::size_t k = 0; k < sin_.size(); ++k) v += sin_[k] * std::sin(kTwoPi * (k + 1) * x);
      return v;
    }
    case PotentialKind::Bump: {
      double t = 1.0 - circle_distance(x, center_) / width_;
      return a0_ + (t > 0.0 ? height_ * std::pow(t, alpha_) : 0.0);
    }
  }
  return 0.0;
}

void Potential::certify() {
  switch (kind_) {
    case PotentialKind::Constant:
      sup_ = inf_ = a0_;
      holder_ = 0.0;
      lip_ = lip2_ = 0.0;
      return;
    case PotentialKind::Bump:
      sup_ = a0_ + std::max(height_, 0.0);
      inf_ = a0_ + std::min(height_, 0.0);
      holder_ = std::abs(height_) * std::pow(width_, -alpha_);
      lip_ = alpha_ == 1.0 ? holder_ : std::numeric_limits<double>::infinity();
      return;
    case PotentialKind::Fourier:
      break;
  }
  lip_ = lip2_ = 0.0;
  for (std::size_t k = 0; k < std::max(cos_.size(), sin_.size()); ++k) {
    double a = k < cos_.size() ? std::abs(cos_[k]) : 0.0;
    double b = k < sin_.size() ? std::abs(sin_[k]) : 0.0;
    double w = kTwoPi * (k + 1);
    lip_ += (a + b) * w;
    lip2_ += (a + b) * w * w;
  }
  // grid extremes are within |phi''| h^2 / 8 of the true ones
  const int grid = 1 << 14;
  const double h = 1.0 / grid;
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double v = (*this)(i * h);
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  double slack = lip2_ * h * h / 8.0;
  sup_ = mx + slack;
  inf_ = mn - slack;
  double osc = sup_ - inf_;
  if (alpha_ == 1.0) {
    holder_ = lip_;
  } else {
    double d_star = std::min(0.5, osc / lip_);
    holder_ = lip_ * std::pow(d_star, 1.0 - alpha_);
  }
}

double Potential::sup_on(Interval iv) const {
  if (kind_ == PotentialKind::Constant) return a0_;
  const int m = 9;
  double h = iv.length() / (m - 1);
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) mx = std::max(mx, (*this)(iv.lo + i * h));
  double corr = holder_ * std::pow(0.5 * h, alpha_);
  return std::min(sup_, mx + corr);
}

double Potential::inf_on(Interval iv) const {
  if (kind_ == PotentialKind::Constant) return a0_;
  const int m = 9;
  double h = iv.length() / (m - 1);
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) mn = std::min(mn, (*this)(iv.lo + i * h));
  double corr = holder_ * std::pow(0.5 * h, alpha_);
  return std::max(inf_, mn - corr);
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  p.a0_ += c;
  p.sup_ += c;
  p.inf_ += c;
  return p;
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(10);
  switch (kind_) {
    case PotentialKind::Constant:
      os << "constant " << a0_;
      break;
    case PotentialKind::Fourier:
      os << "fourier a0=" << a0_;
      for (std::size_t k = 0; k < cos_.size(); ++k)
        if (cos_[k] != 0.0) os << " a" << k + 1 << "=" << cos_[k];
      for (std::size_t k = 0; k < sin_.size(); ++k)
        if (sin_[k] != 0.0) os << " b" << k + 1 << "=" << sin_[k];
      break;
    case PotentialKind::Bump:
      os << "bump height=" << height_ << " center=" << center_ << " width=" << width_;
      if (a0_ != 0.0) os << " offset=" << a0_;
      break;
  }
  os << " alpha=" << alpha_;
  return os.str();
}

Observable Observable::function(std::function<double(double)> g, double lipschitz, double range) {
  Observable o;
  o.g_ = std::move(g);
  o.lip_ = lipschitz;
  o.range_ = range;
  return o;
}

Observable Observable::indicator(std::vector<Interval> arcs) {
  Observable o;
  o.indicator_ = true;
  std::sort(arcs.begin(), arcs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& a : arcs) {
    if (!(a.hi > a.lo)) continue;
    if (!merged.empty() && a.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, a.hi);
    } else {
      merged.push_back(a);
    }
  }
  o.arcs_ = std::move(merged);
  o.lip_ = std::numeric_limits<double>::infinity();
  o.range_ = 1.0;
  return o;
}

Observable Observable::constant(double value) {
  return function([value](double) { return value; }, 0.0, 0.0);
}

Observable Observable::from_potential(const Potential& phi) {
  double lip = phi.alpha() == 1.0 ? phi.holder_const() : std::numeric_limits<double>::infinity();
  return function([phi](double x) { return phi(x); }, lip, phi.oscillation());
}

double Observable::operator()(double x) const {
  if (!indicator_) return g_(x);
  for (const auto& a : arcs_)
    if (a.lo <= x && x < a.hi) return 1.0;
  return 0.0;
}

double birkhoff_sum(const MapModel& model, const Potential& phi, double x, int n) {
  double s = 0.0;
  x = wrap(x);
  for (int j = 0; j < n; ++j) {
    s += phi(x);
    x = eval_map(model, x);
  }
  return s;
}

namespace {

BirkhoffSup birkhoff_extreme(const CylinderTree& tree, const Potential& phi, int level,
                             std::size_t index, int samples, bool upper) {
  BirkhoffSup out;
  if (phi.is_constant()) {
    out.raw = out.bound = level * phi(0.0);
    return out;
  }
  const MapModel& model = tree.model();
  auto word = tree.word(level, index);
  double lo = tree.lo(level, index);
  double hi = tree.hi(level, index);
  samples = std::max(samples, 2);
  double best = upper ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    double x = lo + (hi - lo) * s / (samples - 1);
    double sum = 0.0;
    for (int j = 0; j < level; ++j) {
      sum += phi(x);
      x = wrap(model.lift(word[j], x));
    }
    best = upper ? std::max(best, sum) : std::min(best, sum);
  }
  // affine branches keep the sample spacing proportional along the orbit
  const double share = model.kind() == MapKind::PiecewiseLinear ? 0.5 / (samples - 1) : 1.0;
  double corr = 0.0;
  std::size_t idx = index;
  for (int j = 0; j < level; ++j) {
    double d = tree.hi(level - j, idx) - tree.lo(level - j, idx);
    corr += phi.holder_const() * std::pow(share * d, phi.alpha());
    if (j + 1 < level) idx = tree.shift(level - j, idx);
  }
  out.raw = best;
  double limit = upper ? level * phi.sup() : level * phi.inf();
  out.bound = upper ? std::min(best + corr, limit) : std::max(best - corr, limit);
  return out;
}

}  // namespace

BirkhoffSup sup_birkhoff_on_cylinder(const CylinderTree& tree, const Potential& phi, int level,
                                     std::size_t index, int samples) {
  return birkhoff_extreme(tree, phi, level, index, samples, true);
}

BirkhoffSup inf_birkhoff_on_cylinder(const CylinderTree& tree, const Potential& phi, int level,
                                     std::size_t index, int samples) {
  return birkhoff_extreme(tree, phi, level, index, samples, false);
}

double essential_oscillation(const Observable& g, Interval cyl, int quad) {
  if (g.is_indicator()) {
    double covered = 0.0;
    for (const auto& a : g.arcs()) {
      double lo = std::max(a.lo, cyl.lo);
      double hi = std::min(a.hi, cyl.hi);
      if (hi > lo) covered += hi - lo;
    }
    if (covered <= 0.0) return 0.0;
    if (covered >= cyl.length() * (1.0 - 1e-12)) return 0.0;
    return 1.0;
  }
  quad = std::max(quad, 2);
  double h = cyl.length() / (quad - 1);
  double mx = -std::numeric_limits<double>::infinity();
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < quad; ++i) {
    double v = g(cyl.lo + i * h);
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  double osc = mx - mn;
  if (g.lipschitz() == 0.0) return 0.0;
  if (std::isfinite(g.lipschitz())) osc += g.lipschitz() * h;
  return std::min(osc, g.range());
}

}  // namespace thermo
