#pragma once

// Run configuration: a versioned INI-style file with one section per
// module. Parsing is strict; unknown sections or keys are errors.
//
//   format_version = 1
//   experiment = rb
//   seed = 7
//
//   [rb]
//   lengths = 1, 200, 400, 600, 800, 1000, 1300
//   t_cg_override = 7.573e-05
//
//   [ramsey]
//   delays = linspace(0, 0.12, 49)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rbsim/engine.hpp"
#include "rbsim/noise.hpp"
#include "rbsim/pulse.hpp"

namespace rbsim {

inline constexpr int kConfigFormatVersion = 1;

enum class ExperimentKind { Rb, Ramsey, Echo, Calibrate, Budget, Sweep };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

std::string to_string(DecompositionObjective objective);
DecompositionObjective decomposition_objective_from_string(const std::string& s);

struct SweepConfig {
  std::vector<double> depth_ratios{1.0, 1.1, 1.2, 1.3, 1.4};
  double t2s_magic = 1.72;   // s
  double curvature = 20.74;  // quadratic model; T_2s(1.3) ~ 0.6 s
  std::string trap_table;    // two-column CSV; overrides the quadratic model when set
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct BudgetConfig {
  std::optional<double> measured_eps_g;
  friend bool operator==(const BudgetConfig&, const BudgetConfig&) = default;
};

struct RunConfig {
  int format_version = kConfigFormatVersion;
  std::optional<ExperimentKind> experiment;
  uint64_t seed = 1;
  std::string output_dir = ".";
  DecompositionObjective decomposition = DecompositionObjective::MinPulseCount;

  RBConfig rb = RBConfig::benchmark_defaults();
  NoiseConfig noise = NoiseConfig::benchmark_defaults();
  RamseyConfig ramsey;
  EchoConfig echo;
  CalibrationConfig calibration;
  SweepConfig sweep;
  BudgetConfig budget;

  // Checks every sub-config; throws ConfigError.
  void validate() const;
  TrapDepthModel trap_model() const;

  static RunConfig defaults();
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ConfigError with the offending key or line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace rbsim
