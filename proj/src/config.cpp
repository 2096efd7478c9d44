#include "rbsim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {

namespace {

const std::map<ExperimentKind, std::string>& kind_names() {
  static const std::map<ExperimentKind, std::string> names{
      {ExperimentKind::Rb, "rb"},         {ExperimentKind::Ramsey, "ramsey"}, {ExperimentKind::Echo, "echo"},
      {ExperimentKind::Calibrate, "calibrate"}, {ExperimentKind::Budget, "budget"}, {ExperimentKind::Sweep, "sweep"},
  };
  return names;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& key, const std::string& raw) {
  if (trim(raw) == "none") return std::nullopt;
  return parse_double(key, raw);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

// Comma-separated numbers, or linspace(first, last, count).
std::vector<double> parse_double_list(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s.rfind("linspace(", 0) == 0 && s.back() == ')') {
    const auto args = split_commas(s.substr(9, s.size() - 10));
    if (args.size() != 3) throw ConfigError(key + ": linspace takes (first, last, count)");
    return linspace(parse_double(key, args[0]), parse_double(key, args[1]), parse_int<int>(key, args[2]));
  }
  std::vector<double> out;
  if (s.empty()) return out;
  for (const std::string& item : split_commas(s)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  const std::string s = trim(raw);
  if (s.empty()) return out;
  for (const std::string& item : split_commas(s)) out.push_back(parse_int<int>(key, item));
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  std::string section;  // empty = top level
  std::string key;
  Setter set;
  Getter get;
};

// Single source of truth for both directions of the file format.
const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // top level
    f.push_back({"", "format_version",
                 [](RunConfig& c, const std::string& v) { c.format_version = parse_int<int>("format_version", v); },
                 [](const RunConfig& c) { return std::to_string(c.format_version); }});
    f.push_back({"", "experiment",
                 [](RunConfig& c, const std::string& v) {
                   c.experiment = trim(v) == "none" ? std::nullopt
                                                    : std::optional(experiment_kind_from_string(trim(v)));
                 },
                 [](const RunConfig& c) { return c.experiment ? to_string(*c.experiment) : std::string("none"); }});
    f.push_back({"", "seed", [](RunConfig& c, const std::string& v) { c.seed = parse_int<uint64_t>("seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    f.push_back({"", "output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
                 [](const RunConfig& c) { return c.output_dir; }});

    // [rb]
    f.push_back({"rb", "lengths", [](RunConfig& c, const std::string& v) { c.rb.lengths = parse_int_list("rb.lengths", v); },
                 [](const RunConfig& c) { return join(c.rb.lengths); }});
    f.push_back({"rb", "sequences_per_length",
                 [](RunConfig& c, const std::string& v) {
                   c.rb.sequences_per_length = parse_int<int>("rb.sequences_per_length", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.rb.sequences_per_length); }});
    f.push_back({"rb", "shots_per_sequence",
                 [](RunConfig& c, const std::string& v) {
                   c.rb.shots_per_sequence = parse_int<int>("rb.shots_per_sequence", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.rb.shots_per_sequence); }});
    f.push_back({"rb", "rabi_hz",
                 [](RunConfig& c, const std::string& v) {
                   c.rb.rabi_hz = trim(v) == "calibrated" ? std::nullopt
                                                          : std::optional(parse_double("rb.rabi_hz", v));
                 },
                 [](const RunConfig& c) { return c.rb.rabi_hz ? format_double(*c.rb.rabi_hz) : "calibrated"; }});
    f.push_back({"rb", "t_half_pi", [](RunConfig& c, const std::string& v) { c.rb.t_half_pi = parse_double("rb.t_half_pi", v); },
                 [](const RunConfig& c) { return format_double(c.rb.t_half_pi); }});
    f.push_back({"rb", "idle", [](RunConfig& c, const std::string& v) { c.rb.idle = parse_double("rb.idle", v); },
                 [](const RunConfig& c) { return format_double(c.rb.idle); }});
    f.push_back({"rb", "t_cg_override",
                 [](RunConfig& c, const std::string& v) { c.rb.t_cg_override = parse_optional("rb.t_cg_override", v); },
                 [](const RunConfig& c) { return format_optional(c.rb.t_cg_override); }});
    f.push_back({"rb", "decomposition",
                 [](RunConfig& c, const std::string& v) { c.decomposition = decomposition_objective_from_string(trim(v)); },
                 [](const RunConfig& c) { return to_string(c.decomposition); }});

    // [noise]
    f.push_back({"noise", "detuning_rms_hz",
                 [](RunConfig& c, const std::string& v) { c.noise.detuning_rms_hz = parse_double("noise.detuning_rms_hz", v); },
                 [](const RunConfig& c) { return format_double(c.noise.detuning_rms_hz); }});
    f.push_back({"noise", "detuning_drift_pp_hz",
                 [](RunConfig& c, const std::string& v) {
                   c.noise.detuning_drift_pp_hz = parse_double("noise.detuning_drift_pp_hz", v);
                 },
                 [](const RunConfig& c) { return format_double(c.noise.detuning_drift_pp_hz); }});
    f.push_back({"noise", "area_rms", [](RunConfig& c, const std::string& v) { c.noise.area_rms = parse_double("noise.area_rms", v); },
                 [](const RunConfig& c) { return format_double(c.noise.area_rms); }});
    f.push_back({"noise", "t2s", [](RunConfig& c, const std::string& v) { c.noise.t2s = parse_double("noise.t2s", v); },
                 [](const RunConfig& c) { return format_double(c.noise.t2s); }});
    f.push_back({"noise", "eta", [](RunConfig& c, const std::string& v) { c.noise.eta = parse_double("noise.eta", v); },
                 [](const RunConfig& c) { return format_double(c.noise.eta); }});
    f.push_back({"noise", "d_if", [](RunConfig& c, const std::string& v) { c.noise.d_if = parse_double("noise.d_if", v); },
                 [](const RunConfig& c) { return format_double(c.noise.d_if); }});
    f.push_back({"noise", "resample_policy",
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.noise.resample_policy = resample_policy_from_string(trim(v));
                   } catch (const InvalidParameter& e) {
                     throw ConfigError(std::string("noise.resample_policy: ") + e.what());
                   }
                 },
                 [](const RunConfig& c) { return to_string(c.noise.resample_policy); }});

    // [ramsey]
    f.push_back({"ramsey", "detuning_hz",
                 [](RunConfig& c, const std::string& v) { c.ramsey.detuning_hz = parse_double("ramsey.detuning_hz", v); },
                 [](const RunConfig& c) { return format_double(c.ramsey.detuning_hz); }});
    f.push_back({"ramsey", "delays",
                 [](RunConfig& c, const std::string& v) { c.ramsey.delays = parse_double_list("ramsey.delays", v); },
                 [](const RunConfig& c) { return join(c.ramsey.delays); }});
    f.push_back({"ramsey", "shots", [](RunConfig& c, const std::string& v) { c.ramsey.shots = parse_int<int>("ramsey.shots", v); },
                 [](const RunConfig& c) { return std::to_string(c.ramsey.shots); }});
    f.push_back({"ramsey", "envelope_t2r",
                 [](RunConfig& c, const std::string& v) { c.ramsey.envelope_t2r = parse_optional("ramsey.envelope_t2r", v); },
                 [](const RunConfig& c) { return format_optional(c.ramsey.envelope_t2r); }});

    // [echo]
    f.push_back({"echo", "total_delays",
                 [](RunConfig& c, const std::string& v) { c.echo.total_delays = parse_double_list("echo.total_delays", v); },
                 [](const RunConfig& c) { return join(c.echo.total_delays); }});
    f.push_back({"echo", "t2s", [](RunConfig& c, const std::string& v) { c.echo.t2s = parse_double("echo.t2s", v); },
                 [](const RunConfig& c) { return format_double(c.echo.t2s); }});
    f.push_back({"echo", "shots", [](RunConfig& c, const std::string& v) { c.echo.shots = parse_int<int>("echo.shots", v); },
                 [](const RunConfig& c) { return std::to_string(c.echo.shots); }});

    // [calibrate]
    f.push_back({"calibrate", "n_pulses",
                 [](RunConfig& c, const std::string& v) { c.calibration.n_pulses = parse_int<int>("calibrate.n_pulses", v); },
                 [](const RunConfig& c) { return std::to_string(c.calibration.n_pulses); }});
    f.push_back({"calibrate", "durations",
                 [](RunConfig& c, const std::string& v) {
                   c.calibration.durations = parse_double_list("calibrate.durations", v);
                 },
                 [](const RunConfig& c) { return join(c.calibration.durations); }});
    f.push_back({"calibrate", "true_t_half_pi",
                 [](RunConfig& c, const std::string& v) {
                   c.calibration.true_t_half_pi = parse_double("calibrate.true_t_half_pi", v);
                 },
                 [](const RunConfig& c) { return format_double(c.calibration.true_t_half_pi); }});
    f.push_back({"calibrate", "shots",
                 [](RunConfig& c, const std::string& v) { c.calibration.shots = parse_int<int>("calibrate.shots", v); },
                 [](const RunConfig& c) { return std::to_string(c.calibration.shots); }});

    // [sweep]
    f.push_back({"sweep", "depth_ratios",
                 [](RunConfig& c, const std::string& v) { c.sweep.depth_ratios = parse_double_list("sweep.depth_ratios", v); },
                 [](const RunConfig& c) { return join(c.sweep.depth_ratios); }});
    f.push_back({"sweep", "t2s_magic",
                 [](RunConfig& c, const std::string& v) { c.sweep.t2s_magic = parse_double("sweep.t2s_magic", v); },
                 [](const RunConfig& c) { return format_double(c.sweep.t2s_magic); }});
    f.push_back({"sweep", "curvature",
                 [](RunConfig& c, const std::string& v) { c.sweep.curvature = parse_double("sweep.curvature", v); },
                 [](const RunConfig& c) { return format_double(c.sweep.curvature); }});
    f.push_back({"sweep", "trap_table", [](RunConfig& c, const std::string& v) { c.sweep.trap_table = trim(v); },
                 [](const RunConfig& c) { return c.sweep.trap_table; }});

    // [budget]
    f.push_back({"budget", "measured_eps_g",
                 [](RunConfig& c, const std::string& v) {
                   c.budget.measured_eps_g = parse_optional("budget.measured_eps_g", v);
                 },
                 [](const RunConfig& c) { return format_optional(c.budget.measured_eps_g); }});
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

std::string to_string(ExperimentKind kind) { return kind_names().at(kind); }

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kind_names()) {
    if (name == s) return kind;
  }
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::string to_string(DecompositionObjective objective) {
  return objective == DecompositionObjective::MinPulseCount ? "min_pulse_count" : "min_duration";
}

DecompositionObjective decomposition_objective_from_string(const std::string& s) {
  if (s == "min_pulse_count") return DecompositionObjective::MinPulseCount;
  if (s == "min_duration") return DecompositionObjective::MinDuration;
  throw ConfigError("unknown decomposition objective '" + s + "'");
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.rb.seed = c.seed;
  c.ramsey.detuning_hz = 17.0;
  c.ramsey.delays = linspace(0.0, 0.12, 49);
  c.ramsey.shots = 50;
  c.echo.total_delays = linspace(0.0, 4.0, 21);
  c.echo.t2s = 1.72;
  c.echo.shots = 50;
  c.calibration.n_pulses = 100;
  c.calibration.durations = linspace(20.48e-6, 21.08e-6, 31);
  c.calibration.true_t_half_pi = 20.78e-6;
  c.calibration.shots = 50;
  return c;
}

void RunConfig::validate() const {
  if (format_version != kConfigFormatVersion) {
    throw ConfigError("unsupported format_version " + std::to_string(format_version));
  }
  try {
    rb.validate();
    noise.validate();
    if (ramsey.shots < 1 || echo.shots < 1 || calibration.shots < 1) throw InvalidParameter("shots must be >= 1");
    if (ramsey.envelope_t2r && !(*ramsey.envelope_t2r > 0.0)) throw InvalidParameter("ramsey.envelope_t2r must be positive");
    if (!(echo.t2s > 0.0)) throw InvalidParameter("echo.t2s must be positive");
    if (calibration.n_pulses < 1) throw InvalidParameter("calibrate.n_pulses must be >= 1");
    if (!(calibration.true_t_half_pi > 0.0)) throw InvalidParameter("calibrate.true_t_half_pi must be positive");
    if (sweep.depth_ratios.empty()) throw InvalidParameter("sweep.depth_ratios must not be empty");
    if (sweep.trap_table.empty()) {
      const TrapDepthModel m = trap_model();
      for (double r : sweep.depth_ratios) (void)m.t2s(r);
    }
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

TrapDepthModel RunConfig::trap_model() const {
  if (!sweep.trap_table.empty()) return TrapDepthModel::load_csv(sweep.trap_table);
  return TrapDepthModel::quadratic(sweep.t2s_magic, sweep.curvature);
}

RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  RunConfig cfg = RunConfig::defaults();
  bool saw_version = false;
  auto assign = [&cfg, &saw_version](const std::string& section, const std::string& key, const std::string& value) {
    const Field* f = find_field(section, key);
    if (!f) throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
    f->set(cfg, value);
    if (section.empty() && key == "format_version") saw_version = true;
  };
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      assign("", name, node.data());
      continue;
    }
    const bool known = std::any_of(fields().begin(), fields().end(), [&name](const Field& f) { return f.section == name; });
    if (!known) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("nested sections are not supported: " + name + "." + key);
      assign(name, key, leaf.data());
    }
  }
  if (!saw_version) throw ConfigError("missing format_version");
  cfg.rb.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      section = f.section;
      out << "\n[" << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace rbsim
