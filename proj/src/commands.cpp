#include "rbsim/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rbsim/analysis.hpp"
#include "rbsim/clifford.hpp"
#include "rbsim/error.hpp"
#include "rbsim/pulse.hpp"

namespace rbsim {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json fit_json(const FitResult& fit) {
  Json params = Json::object();
  for (size_t i = 0; i < fit.names.size(); ++i) {
    params[fit.names[i]] = {{"value", number(fit.params[i])}, {"error", number(fit.std_errors[i])}};
  }
  return {{"converged", fit.converged}, {"iterations", fit.iterations}, {"chi2", number(fit.chi2)},
          {"dof", fit.dof},             {"params", params},             {"diagnostic", fit.diagnostic}};
}

Json header_json(const RunConfig& cfg) { return {{"seed", cfg.seed}, {"config", serialize_config(cfg)}}; }

fs::path out_dir_for(const RunConfig& cfg, const CommandOptions& opts) {
  fs::path dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text, CommandResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  result.files.push_back(path);
}

void write_json(const fs::path& path, const Json& j, CommandResult& result) { write_file(path, j.dump(2) + "\n", result); }

std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : "nan"; }

struct Tables {
  CliffordTable cliffords;
  PulseTable pulses;
};

Tables build_tables(const RunConfig& cfg) {
  Tables t{CliffordTable::generate(), {}};
  t.pulses = PulseTable::build(t.cliffords, cfg.decomposition);
  return t;
}

std::string trace_csv(const RunConfig& cfg, const ExperimentTrace& trace, const std::string& abscissa,
                      const std::vector<double>* extra = nullptr, const std::string& extra_name = {}) {
  std::ostringstream out;
  out << config_header(cfg);
  for (const std::string& w : trace.warnings) out << "# warning: " << w << '\n';
  out << abscissa << ",p0,shots";
  if (extra) out << ',' << extra_name;
  out << '\n';
  for (size_t i = 0; i < trace.abscissa.size(); ++i) {
    out << fmt(trace.abscissa[i]) << ',' << fmt(trace.probabilities[i]) << ',' << trace.shots[i];
    if (extra) out << ',' << fmt((*extra)[i]);
    out << '\n';
  }
  return out.str();
}

CommandResult finish_fit(CommandResult result, const FitResult& fit, const std::string& summary) {
  if (!fit.converged) {
    result.exit_code = kExitFit;
    result.message = "fit did not converge: " + fit.diagnostic;
  } else {
    result.message = summary;
  }
  return result;
}

std::string rb_data_csv(const RunConfig& cfg, const RBDataset& ds, const FitResult* fit) {
  std::ostringstream out;
  out << config_header(cfg);
  out << "# idle_per_gate = " << fmt(ds.idle_per_gate) << '\n';
  out << "# mean_gate_time = " << fmt(ds.mean_gate_time) << '\n';
  out << "length,mean,std_error,model";
  for (int k = 0; k < ds.sequences_per_length; ++k) out << ",seq" << k;
  out << '\n';
  for (const RBLengthData& p : ds.points) {
    const double model = fit && fit->converged ? rb_survival_model(p.length, fit->params[0], fit->params[1])
                                               : std::numeric_limits<double>::quiet_NaN();
    out << p.length << ',' << fmt(p.mean) << ',' << fmt(p.std_error) << ',' << fmt(model);
    for (double s : p.survivals) out << ',' << fmt(s);
    out << '\n';
  }
  return out.str();
}

// Runs RB and its fit. Fit failures on malformed data come back as a
// non-converged result rather than an exception.
FitResult fit_or_diagnose(const RBDataset& ds) {
  try {
    return fit_rb_decay(ds);
  } catch (const InvalidData& e) {
    FitResult bad;
    bad.names = {"eps_g", "d_if"};
    bad.params.assign(2, std::numeric_limits<double>::quiet_NaN());
    bad.std_errors.assign(2, std::numeric_limits<double>::infinity());
    bad.diagnostic = e.what();
    return bad;
  }
}

}  // namespace

std::string config_header(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# rbsim seed = " << cfg.seed << '\n';
  std::istringstream in(serialize_config(cfg));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << "# " << line << '\n';
  }
  return out.str();
}

RunConfig effective_config(RunConfig cfg, const CommandOptions& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  cfg.rb.seed = cfg.seed;
  if (opts.zero_noise) {
    const ResamplePolicy policy = cfg.noise.resample_policy;
    cfg.noise = NoiseConfig::zero();
    cfg.noise.resample_policy = policy;
    cfg.ramsey.envelope_t2r.reset();
    cfg.echo.t2s = std::numeric_limits<double>::infinity();
  }
  if (opts.workers < 1) throw ConfigError("--workers must be >= 1");
  cfg.validate();
  return cfg;
}

CommandResult cmd_rb(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const Tables t = build_tables(cfg);
  RBHooks hooks;
  hooks.workers = opts.workers;
  const RBDataset ds = run_rb(cfg.rb, cfg.noise, t.cliffords, t.pulses, hooks);
  const FitResult fit = fit_or_diagnose(ds);

  write_file(dir / "rb_data.csv", rb_data_csv(cfg, ds, &fit), result);
  Json j = header_json(cfg);
  j["mean_gate_time"] = number(ds.mean_gate_time);
  j["fit"] = fit_json(fit);
  write_json(dir / "rb_fit.json", j, result);

  std::ostringstream summary;
  summary << "eps_g = " << fmt(fit.params[0]) << " +- " << fmt(fit.std_errors[0]) << ", d_if = " << fmt(fit.params[1])
          << " +- " << fmt(fit.std_errors[1]);
  return finish_fit(std::move(result), fit, summary.str());
}

CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const Tables t = build_tables(cfg);
  const TrapDepthModel model = cfg.trap_model();
  RBHooks hooks;
  hooks.workers = opts.workers;

  std::ostringstream csv;
  csv << config_header(cfg);
  csv << "depth_ratio,t2s,seed,eps_g,eps_g_error,d_if,d_if_error,converged\n";
  std::vector<CoherencePoint> points;
  double t_cg = 0.0;
  bool all_converged = true;
  std::string diagnostic;
  for (size_t i = 0; i < cfg.sweep.depth_ratios.size(); ++i) {
    const double ratio = cfg.sweep.depth_ratios[i];
    NoiseConfig noise = cfg.noise;
    noise.t2s = model.t2s(ratio);
    RBConfig rb = cfg.rb;
    rb.seed = cfg.seed + i;
    const RBDataset ds = run_rb(rb, noise, t.cliffords, t.pulses, hooks);
    const FitResult fit = fit_or_diagnose(ds);
    t_cg = ds.mean_gate_time;
    csv << fmt(ratio) << ',' << fmt(noise.t2s) << ',' << rb.seed << ',' << fmt(fit.params[0]) << ','
        << fmt(fit.std_errors[0]) << ',' << fmt(fit.params[1]) << ',' << fmt(fit.std_errors[1]) << ','
        << (fit.converged ? 1 : 0) << '\n';
    if (fit.converged) {
      points.push_back({noise.t2s, fit.params[0], fit.std_errors[0]});
    } else if (all_converged) {
      all_converged = false;
      diagnostic = "RB fit at depth ratio " + fmt(ratio) + ": " + fit.diagnostic;
    }
  }
  write_file(dir / "sweep.csv", csv.str(), result);

  FitResult eta;
  eta.names = {"eta"};
  eta.params = {std::numeric_limits<double>::quiet_NaN()};
  eta.std_errors = {std::numeric_limits<double>::infinity()};
  if (all_converged) {
    try {
      eta = fit_eta(points, t_cg);
    } catch (const InvalidData& e) {
      eta.diagnostic = e.what();
    }
  } else {
    eta.diagnostic = diagnostic;
  }
  Json j = header_json(cfg);
  j["t_cg"] = number(t_cg);
  j["fit"] = fit_json(eta);
  write_json(dir / "eta_fit.json", j, result);
  return finish_fit(std::move(result), eta,
                    "eta = " + fmt(eta.params[0]) + " +- " + fmt(eta.std_errors[0]));
}

CommandResult cmd_ramsey(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const ExperimentTrace trace = run_ramsey(cfg.ramsey, cfg.noise, cfg.seed, SamplingMode::Bernoulli, opts.workers);
  write_file(dir / "ramsey.csv", trace_csv(cfg, trace, "delay"), result);
  FitResult fit;
  try {
    fit = fit_sinusoid(trace);
  } catch (const InvalidData& e) {
    fit.diagnostic = e.what();
  }
  Json j = header_json(cfg);
  j["fit"] = fit_json(fit);
  write_json(dir / "ramsey_fit.json", j, result);
  if (!fit.converged) return finish_fit(std::move(result), fit, {});
  return finish_fit(std::move(result), fit,
                    "frequency = " + fmt(fit.value("frequency")) + " +- " + fmt(fit.error("frequency")) + " Hz");
}

CommandResult cmd_echo(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const ExperimentTrace trace = run_spin_echo(cfg.echo, cfg.noise, cfg.seed, SamplingMode::Bernoulli, opts.workers);
  const std::vector<double> visibility = echo_visibility(trace);
  write_file(dir / "echo.csv", trace_csv(cfg, trace, "total_delay", &visibility, "visibility"), result);
  FitResult fit;
  try {
    fit = fit_echo_decay(trace);
  } catch (const InvalidData& e) {
    fit.diagnostic = e.what();
  }
  Json j = header_json(cfg);
  j["fit"] = fit_json(fit);
  write_json(dir / "echo_fit.json", j, result);
  if (!fit.converged) return finish_fit(std::move(result), fit, {});
  return finish_fit(std::move(result), fit, "t2s = " + fmt(fit.value("t2s")) + " +- " + fmt(fit.error("t2s")) + " s");
}

CommandResult cmd_calibrate(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const ExperimentTrace trace =
      run_pulse_calibration(cfg.calibration, cfg.noise, cfg.seed, SamplingMode::Bernoulli, opts.workers);
  write_file(dir / "calibrate.csv", trace_csv(cfg, trace, "duration"), result);
  FitResult fit;
  try {
    fit = fit_gaussian(trace);
  } catch (const InvalidData& e) {
    fit.diagnostic = e.what();
  }
  Json j = header_json(cfg);
  j["fit"] = fit_json(fit);
  write_json(dir / "calibrate_fit.json", j, result);
  if (!fit.converged) return finish_fit(std::move(result), fit, {});
  return finish_fit(std::move(result), fit,
                    "t_half_pi = " + fmt(fit.value("center")) + " +- " + fmt(fit.error("center")) + " s");
}

CommandResult cmd_budget(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const Tables t = build_tables(cfg);
  const double t_cg = cfg.rb.t_cg_override ? *cfg.rb.t_cg_override
                                           : mean_clifford_duration(t.pulses, cfg.rb.t_half_pi, cfg.rb.idle);
  const BudgetReport r = error_budget(cfg.noise, t_cg, t.cliffords, t.pulses, cfg.rb, cfg.budget.measured_eps_g);

  std::ostringstream csv;
  csv << config_header(cfg);
  csv << "term,value\n";
  csv << "detuning," << fmt(r.detuning) << '\n';
  csv << "pulse_area," << fmt(r.pulse_area) << '\n';
  csv << "dephasing_ratio_estimate," << fmt(r.dephasing_ratio_estimate) << '\n';
  csv << "dephasing_eq2," << fmt(r.dephasing_eq2) << '\n';
  csv << "total," << fmt(r.total) << '\n';
  if (r.measured_eps_g) csv << "measured_eps_g," << fmt(*r.measured_eps_g) << '\n';
  write_file(dir / "budget.csv", csv.str(), result);

  Json j = header_json(cfg);
  j["t_cg"] = number(t_cg);
  j["budget"] = {{"detuning", number(r.detuning)},
                 {"pulse_area", number(r.pulse_area)},
                 {"dephasing_ratio_estimate", number(r.dephasing_ratio_estimate)},
                 {"dephasing_eq2", number(r.dephasing_eq2)},
                 {"total", number(r.total)},
                 {"measured_eps_g", r.measured_eps_g ? number(*r.measured_eps_g) : Json(nullptr)}};
  write_json(dir / "budget.json", j, result);
  result.message = "total = " + fmt(r.total) + " (dephasing " + fmt(r.dephasing_eq2) + ")";
  return result;
}

CommandResult cmd_tables(const RunConfig& cfg, const CommandOptions& opts) {
  CommandResult result;
  const fs::path dir = out_dir_for(cfg, opts);
  const Tables t = build_tables(cfg);
  std::ostringstream cayley;
  cayley << config_header(cfg);
  t.cliffords.write_cayley_csv(cayley);
  write_file(dir / "cayley.csv", cayley.str(), result);
  std::ostringstream words;
  words << config_header(cfg);
  t.pulses.write_csv(words);
  write_file(dir / "decomposition.csv", words.str(), result);
  result.message = "mean Clifford duration = " +
                   fmt(mean_clifford_duration(t.pulses, cfg.rb.t_half_pi, cfg.rb.idle)) + " s";
  return result;
}

CommandResult run_experiment(ExperimentKind kind, const RunConfig& cfg, const CommandOptions& opts) {
  switch (kind) {
    case ExperimentKind::Rb:
      return cmd_rb(cfg, opts);
    case ExperimentKind::Sweep:
      return cmd_sweep(cfg, opts);
    case ExperimentKind::Ramsey:
      return cmd_ramsey(cfg, opts);
    case ExperimentKind::Echo:
      return cmd_echo(cfg, opts);
    case ExperimentKind::Calibrate:
      return cmd_calibrate(cfg, opts);
    case ExperimentKind::Budget:
      return cmd_budget(cfg, opts);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace rbsim
