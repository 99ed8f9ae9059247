#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "thermo/cylinders.hpp"
#include "thermo/dynamics.hpp"
#include "thermo/potential.hpp"
#include "thermo/validator.hpp"

namespace thermo::cli {

/// Configuration error (exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// INI-style settings.  Every lookup writes its default back, so resolved()
/// lists every value a run actually used.
class Settings {
 public:
  Settings() = default;
  static Settings load(const std::filesystem::path& path);

  /// "section.key=value"
  void assign(const std::string& assignment);
  void put(const std::string& key, const std::string& value);

  double number(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  /// "auto" (or absent) yields nullopt.
  std::optional<double> optional_number(const std::string& key);

  [[nodiscard]] const boost::property_tree::ptree& resolved() const { return pt_; }
  void write(const std::filesystem::path& path) const;

 private:
  boost::property_tree::ptree pt_;
};

struct RunConfig {
  // [model]
  std::string model_kind;
  // [potential]
  std::string potential_kind;
  // [resolution]
  int level = 10;
  int level_lo = 4;
  int level_hi = 12;
  int lag_max = 200;
  int ly_n_hi = 6;
  // [sampling]
  std::uint64_t seed = 1;
  long samples = 10000;
  double t_max = 10.0;
  int n = 10;
  std::vector<int> n_list;
  long cylinders = 10;
  int bootstrap = 200;
  double cap_factor = 40.0;
  // [clt]
  std::vector<int> clt_lengths;
  // [observable]
  std::string observable_kind;
  int observable_freq = 1;
  int observable_level = 2;
  long observable_index = 0;
  // [constants]
  double zeta = 0.2;
  double a = 4.0;
  ValidatorOptions validator;
  // [output]
  std::filesystem::path out;
};

MapModel build_model(Settings& s);
Potential build_potential(Settings& s);
Observable build_observable(const RunConfig& rc, const Potential& phi, CylinderTree& tree);
RunConfig build_run_config(Settings& s);

}  // namespace thermo::cli
