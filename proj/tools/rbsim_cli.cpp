// rbsim: seeded RB / Ramsey / echo / calibration runs from a config file.
//
//   rbsim rb --config configs/benchmark_rb.ini --out out/ --workers 4
//   rbsim run --config my.ini          (experiment kind taken from the file)

#include <CLI11.hpp>
#include <iostream>

#include "rbsim/commands.hpp"
#include "rbsim/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Randomized-benchmarking simulator for a single trapped-atom qubit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  rbsim::CommandOptions opts;
  app.add_option("--config", config_path, "Run config file (defaults apply when omitted)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed; overrides the config");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory; overrides the config");
  app.add_option("--workers", opts.workers, "Worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  app.add_flag("--zero-noise", opts.zero_noise, "Switch off every noise source");

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"rb", "Randomized benchmarking and decay fit"},
      {"sweep", "RB across trap depths and eta fit"},
      {"ramsey", "Ramsey fringes and frequency fit"},
      {"echo", "Spin echo and T2s fit"},
      {"calibrate", "Multi-pulse duration scan and t_pi/2 fit"},
      {"budget", "Per-gate error budget"},
      {"tables", "Export the Clifford Cayley table and pulse decompositions"},
      {"run", "Run the experiment named in the config file"},
  };
  for (const Sub& s : subs) app.add_subcommand(s.name, s.help);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  rbsim::RunConfig cfg;
  try {
    cfg = config_path.empty() ? rbsim::RunConfig::defaults() : rbsim::load_config(config_path);
    if (*seed_opt) opts.seed = seed;
    if (*out_opt) opts.out_dir = out_dir;
    cfg = rbsim::effective_config(cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return rbsim::kExitConfig;
  }

  try {
    rbsim::CommandResult result;
    if (command == "tables") {
      result = rbsim::cmd_tables(cfg, opts);
    } else if (command == "run") {
      if (!cfg.experiment) {
        std::cerr << "config error: 'run' needs an experiment key in the config\n";
        return rbsim::kExitConfig;
      }
      result = rbsim::run_experiment(*cfg.experiment, cfg, opts);
    } else {
      result = rbsim::run_experiment(rbsim::experiment_kind_from_string(command), cfg, opts);
    }
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    (result.exit_code == rbsim::kExitOk ? std::cout : std::cerr) << result.message << '\n';
    return result.exit_code;
  } catch (const rbsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return rbsim::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
