// diskcert: certificates, residuals and variation experiments for maps on the
// unit disk. See README.md for the configuration format.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"

namespace {

using namespace diskcert;
using namespace diskcert::cli;

struct Overrides {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<int> N;
  std::optional<double> p;
};

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.N) {
    cfg.N = *o.N;
    cfg.band_N = *o.N;
  }
  if (o.p) cfg.p = *o.p;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "output directory (default: current)");
  sub->add_option("--seed", o.seed, "base seed (overrides config)");
  sub->add_option("--trials", o.trials, "trial count (overrides config)");
  sub->add_option("--N", o.N, "band index N (overrides config)");
  sub->add_option("--p", o.p, "exponent p in [2, inf) (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diskcert: stationarity certificates and variation experiments on the unit disk"};
  app.require_subcommand(1);

  Overrides o;
  std::string suite;
  std::string command;

  for (const char* name : {"decompose", "certify", "residual", "energy", "pressure", "variation"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, o);
    sub->callback([&command, name] { command = name; });
  }
  app.get_subcommand("decompose")->description("angular mode masses of a field");
  app.get_subcommand("certify")->description("integer certificate for a stationary candidate");
  app.get_subcommand("residual")->description("weak Euler-Lagrange residuals");
  app.get_subcommand("energy")->description("stored energy of the configured map");
  app.get_subcommand("pressure")->description("recover and integrate the pressure");
  app.get_subcommand("variation")->description("generate a band or flow variation");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, o);
  std::string suites_help = "one of:";
  for (const auto& s : verify_suites()) suites_help += " " + s;
  verify->add_option("suite", suite, suites_help)->required();
  verify->callback([&command] { command = "verify"; });

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(o);
    CommandResult r;
    if (command == "decompose") r = cmd_decompose(cfg);
    else if (command == "certify") r = cmd_certify(cfg);
    else if (command == "residual") r = cmd_residual(cfg);
    else if (command == "energy") r = cmd_energy(cfg);
    else if (command == "pressure") r = cmd_pressure(cfg);
    else if (command == "variation") r = cmd_variation(cfg);
    else r = cmd_verify(cfg, suite);
    write_result(o.out_dir, output_stem(command, suite), r);
    std::cout << r.payload.dump(2) << "\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "diskcert: error: " << e.what() << "\n";
    return kExitError;
  }
}
