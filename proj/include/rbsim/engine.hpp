#pragma once

// Seeded Monte Carlo experiments over the pulse-level simulator:
// randomized benchmarking, Ramsey fringes, spin echo, and the
// multi-pulse duration scan used to calibrate t_pi/2.
//
// Every random draw comes from a sub-stream keyed by (seed, purpose,
// indices), so results are bit-identical for any worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/noise.hpp"
#include "rbsim/pulse.hpp"

namespace rbsim {

enum class SamplingMode {
  Bernoulli,    // one binary readout per shot
  Expectation,  // exact p(|0>) averaged over the shot-noise draws
};

struct RBConfig {
  std::vector<int> lengths;
  int sequences_per_length = 5;
  int shots_per_sequence = 50;
  // Drive Rabi frequency Omega/2pi. Unset means calibrated: 1 / (4 t_half_pi).
  std::optional<double> rabi_hz;
  double t_half_pi = 20.78e-6;  // s
  double idle = 3e-6;           // s per Clifford
  // Mean Clifford duration to reproduce; stretches the idle time accordingly.
  std::optional<double> t_cg_override;
  uint64_t seed = 1;

  void validate() const;
  double rabi_rad_s() const;

  static RBConfig benchmark_defaults();
  friend bool operator==(const RBConfig&, const RBConfig&) = default;
};

// Test hooks that bypass parts of the physical model.
struct RBHooks {
  SamplingMode mode = SamplingMode::Bernoulli;
  // Ideal Clifford unitaries followed by a depolarizing channel of this
  // strength after every random gate; pulses and dephasing are skipped.
  std::optional<double> depolarizing_p;
  int workers = 1;
};

struct RBLengthData {
  int length = 0;
  std::vector<double> survivals;  // one per sequence
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(sequences)
};

struct RBDataset {
  std::vector<RBLengthData> points;
  int sequences_per_length = 0;
  int shots_per_sequence = 0;
  double idle_per_gate = 0.0;  // s, after any t_CG override
  double mean_gate_time = 0.0;  // s, what the simulator actually charged
};

struct ExperimentTrace {
  std::vector<double> abscissa;       // s
  std::vector<double> probabilities;  // p(|0>)
  std::vector<int> shots;
  std::vector<std::string> warnings;
};

// Draws the random Clifford sequence `sequence_index` (length `length`).
std::vector<int> draw_sequence(uint64_t seed, int sequence_index, int length);

// Idle time per Clifford after applying cfg.t_cg_override to the table.
double effective_idle(const RBConfig& cfg, const PulseTable& pulses);

// Coherence time of the Markovian z-dephasing channel used during gates.
// Pure dephasing with coherence factor lambda costs (1 - lambda)/3 in average
// gate infidelity, so T_RB / 3 makes an exposure t cost 1 - exp(-t / T_RB).
double gate_dephasing_time(const NoiseConfig& noise);

// Noisy evolution of |0><0| through `sequence` and its recovery gate. The
// returned probability is before SPAM.
double simulate_sequence(const std::vector<int>& sequence, int recovery, const PulseTable& pulses,
                         const RBConfig& cfg, const NoiseConfig& noise,
                         const ShotNoise& shot);

RBDataset run_rb(const RBConfig& cfg, const NoiseConfig& noise, const CliffordTable& table,
                 const PulseTable& pulses, const RBHooks& hooks = {});

struct RamseyConfig {
  double detuning_hz = 17.0;
  std::vector<double> delays;  // s between the two pi/2 pulses
  int shots = 50;
  std::optional<double> envelope_t2r;  // s; Gaussian exp(-(t/T2R)^2) on coherence
  friend bool operator==(const RamseyConfig&, const RamseyConfig&) = default;
};

struct EchoConfig {
  std::vector<double> total_delays;  // s between the outer pi/2 pulses
  double t2s = 1.72;                 // s
  int shots = 50;
  friend bool operator==(const EchoConfig&, const EchoConfig&) = default;
};

struct CalibrationConfig {
  int n_pulses = 100;
  std::vector<double> durations;  // scanned single-pulse durations, s
  double true_t_half_pi = 20.78e-6;
  int shots = 50;
  friend bool operator==(const CalibrationConfig&, const CalibrationConfig&) = default;
};

// pi/2 - free evolution - pi/2 with hard pulses.
ExperimentTrace run_ramsey(const RamseyConfig& cfg, const NoiseConfig& noise, uint64_t seed,
                           SamplingMode mode = SamplingMode::Bernoulli, int workers = 1);

// pi/2 - t/2 - pi - t/2 - pi/2 with hard pulses. Static detuning is refocused;
// the coherence decays by exp(-(t/t2s)^2).
ExperimentTrace run_spin_echo(const EchoConfig& cfg, const NoiseConfig& noise, uint64_t seed,
                              SamplingMode mode = SamplingMode::Bernoulli, int workers = 1);

// n identical rectangular pulses of each scanned duration, starting in |0>.
ExperimentTrace run_pulse_calibration(const CalibrationConfig& cfg, const NoiseConfig& noise, uint64_t seed,
                                      SamplingMode mode = SamplingMode::Bernoulli, int workers = 1);

// 2 p0 - 1 per point; the echo readout contrast.
std::vector<double> echo_visibility(const ExperimentTrace& trace);

std::vector<double> linspace(double first, double last, int count);

}  // namespace rbsim
