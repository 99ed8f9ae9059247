#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "thermo/csv.hpp"

namespace thermo::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::vector<std::size_t> indices(Settings& s, const std::string& key) {
  std::vector<std::size_t> out;
  for (double v : s.numbers(key, {})) {
    if (v < 0 || v != std::floor(v)) throw ConfigError("'" + key + "': expected block indices");
    out.push_back(std::size_t(v));
  }
  return out;
}

}  // namespace

Settings Settings::load(const std::filesystem::path& path) {
  Settings s;
  try {
    pt::read_ini(path.string(), s.pt_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

void Settings::assign(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || assignment.find('.') > eq)
    throw ConfigError("override must look like section.key=value: " + assignment);
  put(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Settings::put(const std::string& key, const std::string& value) { pt_.put(key, value); }

double Settings::number(const std::string& key, double fallback) {
  auto v = pt_.get_optional<std::string>(key);
  if (!v) {
    pt_.put(key, format_double(fallback));
    return fallback;
  }
  return parse_number(key, trim(*v));
}

long Settings::integer(const std::string& key, long fallback) {
  double x = number(key, double(fallback));
  if (x != std::floor(x)) throw ConfigError("'" + key + "': expected an integer");
  return long(x);
}

std::string Settings::text(const std::string& key, const std::string& fallback) {
  auto v = pt_.get_optional<std::string>(key);
  if (!v) {
    pt_.put(key, fallback);
    return fallback;
  }
  return trim(*v);
}

std::vector<double> Settings::numbers(const std::string& key, const std::vector<double>& fallback) {
  auto v = pt_.get_optional<std::string>(key);
  if (!v) {
    pt_.put(key, join(fallback));
    return fallback;
  }
  std::vector<double> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number(key, item));
  }
  return out;
}

std::optional<double> Settings::optional_number(const std::string& key) {
  std::string v = text(key, "auto");
  if (v == "auto" || v.empty()) return std::nullopt;
  return parse_number(key, v);
}

void Settings::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  pt::write_ini(path.string(), pt_);
}

MapModel build_model(Settings& s) {
  std::string kind = s.text("model.kind", "doubling");
  auto ne = indices(s, "model.non_expanding");
  if (kind == "doubling") return MapModel::doubling(ne);
  if (kind == "linear") {
    LinearSpec spec;
    spec.endpoints = s.numbers("model.endpoints", {0.0, 0.5, 1.0});
    spec.image_starts = s.numbers("model.image_starts", {0.0, 1.0});
    spec.slopes = s.numbers("model.slopes", {2.0, 2.0});
    return MapModel::piecewise_linear(spec, ne);
  }
  if (kind == "smooth") {
    SmoothSpec spec;
    spec.degree = int(s.integer("model.degree", 2));
    spec.epsilon = s.number("model.epsilon", 0.2);
    spec.sine = s.numbers("model.sine", {1.0});
    spec.partition_depth = int(s.integer("model.depth", 1));
    return MapModel::smooth_deformation(spec, ne);
  }
  throw ConfigError("model.kind must be doubling, linear or smooth");
}

Potential build_potential(Settings& s) {
  std::string kind = s.text("potential.kind", "constant");
  if (kind == "constant") return Potential::constant(s.number("potential.value", 0.0));
  if (kind == "fourier") {
    double a0 = s.number("potential.a0", 0.0);
    auto c = s.numbers("potential.cos", {});
    auto sn = s.numbers("potential.sin", {});
    return Potential::fourier(a0, c, sn, s.number("potential.alpha", 1.0));
  }
  if (kind == "bump") {
    return Potential::bump(s.number("potential.height", 0.5), s.number("potential.center", 0.5),
                           s.number("potential.width", 0.25), s.number("potential.alpha", 1.0));
  }
  throw ConfigError("potential.kind must be constant, fourier or bump");
}

RunConfig build_run_config(Settings& s) {
  RunConfig rc;
  rc.model_kind = s.text("model.kind", "doubling");
  rc.potential_kind = s.text("potential.kind", "constant");
  rc.level = int(s.integer("resolution.level", 10));
  rc.level_lo = int(s.integer("resolution.level_lo", 4));
  rc.level_hi = int(s.integer("resolution.level_hi", rc.level));
  rc.lag_max = int(s.integer("resolution.lag_max", 200));
  rc.ly_n_hi = int(s.integer("resolution.ly_n_hi", 6));
  rc.seed = std::uint64_t(s.integer("sampling.seed", 1));
  rc.samples = s.integer("sampling.samples", 10000);
  rc.t_max = s.number("sampling.t_max", 10.0);
  rc.n = int(s.integer("sampling.n", std::max(2, rc.level - 2)));
  for (double v : s.numbers("sampling.n_list", {})) rc.n_list.push_back(int(v));
  rc.cylinders = s.integer("sampling.cylinders", 10);
  rc.bootstrap = int(s.integer("sampling.bootstrap", 200));
  rc.cap_factor = s.number("sampling.cap_factor", 40.0);
  for (double v : s.numbers("clt.lengths", {500, 1000, 2000})) rc.clt_lengths.push_back(int(v));
  rc.observable_kind = s.text("observable.kind", "cos");
  rc.observable_freq = int(s.integer("observable.freq", 1));
  rc.observable_level = int(s.integer("observable.level", 2));
  rc.observable_index = s.integer("observable.index", 0);
  rc.zeta = s.number("constants.zeta", 0.2);
  rc.a = s.number("constants.a", 4.0);
  rc.validator.c = s.optional_number("constants.c");
  rc.validator.gamma = s.optional_number("constants.gamma");
  rc.validator.eps0 = s.optional_number("constants.eps0");
  rc.validator.theta = s.optional_number("constants.theta");
  rc.validator.m = s.number("constants.m", 1.0);
  rc.validator.seed = rc.seed;
  rc.out = s.text("output.dir", "out");

  if (rc.level < 2 || rc.level > 22) throw ConfigError("resolution.level must lie in [2, 22]");
  if (rc.level_lo < 1 || rc.level_lo > rc.level_hi) throw ConfigError("resolution.level_lo must not exceed level_hi");
  if (rc.samples < 1) throw ConfigError("sampling.samples must be positive");
  if (rc.n < 1) throw ConfigError("sampling.n must be positive");
  if (rc.clt_lengths.empty() || *std::min_element(rc.clt_lengths.begin(), rc.clt_lengths.end()) < 1)
    throw ConfigError("clt.lengths must list positive orbit lengths");
  if (!(rc.zeta > 0.0 && rc.zeta < 1.0)) throw ConfigError("constants.zeta must lie in (0, 1)");
  return rc;
}

Observable build_observable(const RunConfig& rc, const Potential& phi, CylinderTree& tree) {
  const double k = rc.observable_freq;
  if (rc.observable_kind == "cos")
    return Observable::function([k](double x) { return std::cos(kTwoPi * k * x); }, kTwoPi * k, 2.0);
  if (rc.observable_kind == "sin")
    return Observable::function([k](double x) { return std::sin(kTwoPi * k * x); }, kTwoPi * k, 2.0);
  if (rc.observable_kind == "potential") return Observable::from_potential(phi);
  if (rc.observable_kind == "indicator") {
    tree.build_to(rc.observable_level);
    if (rc.observable_index < 0 || std::size_t(rc.observable_index) >= tree.count(rc.observable_level))
      throw ConfigError("observable.index out of range");
    return Observable::indicator({tree.interval(rc.observable_level, std::size_t(rc.observable_index))});
  }
  throw ConfigError("observable.kind must be cos, sin, potential or indicator");
}

}  // namespace thermo::cli
