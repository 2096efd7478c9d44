#pragma once

// Stochastic error models: quasi-static detuning and pulse-area noise,
// homogeneous dephasing, SPAM depolarization, and the trap-depth
// dependence of the spin-echo coherence time.

#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rbsim/rng.hpp"

namespace rbsim {

enum class ResamplePolicy { PerShot, PerSequence };

std::string to_string(ResamplePolicy p);
ResamplePolicy resample_policy_from_string(const std::string& s);

struct NoiseConfig {
  double detuning_rms_hz = 0.0;
  double detuning_drift_pp_hz = 0.0;  // slow drift, metadata only
  double area_rms = 0.0;              // fractional rms of the pulse area
  double t2s = std::numeric_limits<double>::infinity();  // s; infinite disables dephasing
  double eta = 1.0;
  double d_if = 0.0;
  ResamplePolicy resample_policy = ResamplePolicy::PerShot;

  // Throws InvalidParameter on a violated invariant.
  void validate() const;
  bool has_dephasing() const { return t2s < std::numeric_limits<double>::infinity(); }

  static NoiseConfig zero() { return NoiseConfig{}; }
  // Noise figures of the magic-intensity trap benchmark.
  static NoiseConfig benchmark_defaults();

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

// One quasi-static draw, fixed for a shot (or a whole sequence).
struct ShotNoise {
  double detuning = 0.0;    // rad/s
  double area_scale = 1.0;  // multiplies the Rabi frequency
};

// Always consumes exactly two standard-normal draws from `rng`.
ShotNoise sample_shot_noise(const NoiseConfig& cfg, Rng& rng);

// T_RB = eta * T_2s
double coherence_time_rb(const NoiseConfig& cfg);

class TrapDepthModel {
 public:
  // T_2s(r) = t2s_magic / (1 + curvature (r - 1)^2), r = U / U_m.
  static TrapDepthModel quadratic(double t2s_magic, double curvature);
  // (ratio, T_2s) samples with the peak at ratio 1; monotone cubic interpolation.
  static TrapDepthModel table(std::vector<std::pair<double, double>> points);
  // Two-column CSV: ratio,t2s. A non-numeric first line is treated as a header.
  static TrapDepthModel load_csv(const std::filesystem::path& path);

  // Curvature that puts T_2s(ratio) at t2s_target.
  static double curvature_for(double t2s_magic, double ratio, double t2s_target);

  double t2s(double ratio) const;

  bool is_table() const { return !points_.empty(); }
  double t2s_magic() const { return t2s_magic_; }
  double curvature() const { return curvature_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  double t2s_magic_ = 0.0;
  double curvature_ = 0.0;
  std::vector<std::pair<double, double>> points_;
  std::vector<double> slopes_;
};

inline double t2s_of_depth(const TrapDepthModel& model, double ratio) { return model.t2s(ratio); }

// (1 - d_if) p0 + d_if / 2
double apply_spam(double p0_true, double d_if);

}  // namespace rbsim
