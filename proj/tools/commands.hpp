#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "thermo/csv.hpp"

namespace thermo::cli {

struct Verdict {
  std::string criterion;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Context {
  std::string command;
  Settings settings;
  RunConfig rc;
  bool strict = false;
  std::vector<Verdict> verdicts;
  std::vector<std::string> artifacts;

  void verdict(std::string criterion, double value, double threshold, bool pass);
  void emit(const std::string& name, const CsvTable& table);
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes its artifacts; returns the process exit code.
int run_subcommand(Context& ctx);

}  // namespace thermo::cli
