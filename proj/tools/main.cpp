#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "commands.hpp"
#include "thermo/error.hpp"

int main(int argc, char** argv) {
  using namespace thermo::cli;
  CLI::App app{"thermo: transfer operators, equilibrium states and recurrence statistics of Markov circle maps"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  long long seed = -1;
  int level = -1;
  long samples = -1;
  int n = -1;
  bool strict = false;
  std::vector<std::string> overrides;

  const std::map<std::string, std::string> about{
      {"validate", "check the hyperbolicity hypotheses and derive constants"},
      {"cylinders", "cylinder partitions, diameters and special subfamilies"},
      {"spectrum", "leading eigentriple, pressure and spectral gap"},
      {"correlations", "decay of correlations against the gap"},
      {"lasota-yorke", "theta-variation contraction of the transfer operator"},
      {"gibbs", "Gibbs constants, Jacobian and weak Gibbs fractions"},
      {"hitting", "Kac formula, Pac bound and exponential hitting law"},
      {"returns", "return-time entropy and hitting vs return gap"},
      {"clt", "asymptotic variance and central limit theorem"},
      {"fluctuations", "log-normal fluctuations of return times"},
      {"report", "aggregate verdicts of an output directory"}};
  for (const auto& name : subcommands()) {
    auto it = about.find(name);
    auto* sub = app.add_subcommand(name, it == about.end() ? std::string() : it->second);
    sub->add_option("--config", config, "INI configuration file");
    sub->add_option("--seed", seed, "root seed");
    sub->add_option("--level", level, "working cylinder level");
    sub->add_option("--samples", samples, "Monte Carlo sample count");
    sub->add_option("--n", n, "target / return-time level");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--set", overrides, "section.key=value override")->take_all();
    sub->add_flag("--strict", strict, "exit 3 when an acceptance check fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.strict = strict;
  try {
    if (!config.empty()) ctx.settings = Settings::load(config);
    for (const auto& o : overrides) ctx.settings.assign(o);
    if (seed >= 0) ctx.settings.put("sampling.seed", std::to_string(seed));
    if (level >= 0) ctx.settings.put("resolution.level", std::to_string(level));
    if (samples >= 0) ctx.settings.put("sampling.samples", std::to_string(samples));
    if (n >= 0) ctx.settings.put("sampling.n", std::to_string(n));
    if (!out.empty()) ctx.settings.put("output.dir", out);
    ctx.rc = build_run_config(ctx.settings);
    return run_subcommand(ctx);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const thermo::ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return 1;
  } catch (const thermo::SigmaZeroError& e) {
    std::fprintf(stderr, "degenerate variance: %s\n", e.what());
    return 1;
  } catch (const thermo::ConvergenceError& e) {
    std::fprintf(stderr, "no convergence: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
