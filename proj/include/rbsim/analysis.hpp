#pragma once

// Weighted nonlinear least squares and the fits built on it: the RB decay
// F(l) = 1/2 + 1/2 (1 - d_if)(1 - 2 eps_g)^l, the coherence-limited error
// eps_g(T_2s) = 1 - exp(-t_CG / (eta T_2s)), sinusoids, Gaussians, and the
// per-gate error budget.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/engine.hpp"
#include "rbsim/noise.hpp"
#include "rbsim/pulse.hpp"

namespace rbsim {

struct FitModel {
  std::vector<std::string> names;
  std::function<double(double x, std::span<const double> params)> eval;
  // Optional box constraints, enforced by clamping each step. Empty = none.
  std::vector<double> lower;
  std::vector<double> upper;
  // Typical magnitude of each parameter; floors the finite-difference step.
  std::vector<double> scales;
};

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;      // relative parameter change
  double gradient_tolerance = 1e-6;   // cosine between residual and Jacobian columns
  double jacobian_step = 1e-6;        // relative central-difference step
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> std_errors;  // +inf where the curvature is singular
  double residual_norm = 0.0;      // sqrt(chi^2)
  double chi2 = 0.0;
  int dof = 0;
  bool converged = false;
  int iterations = 0;
  std::string diagnostic;

  // Throws std::out_of_range for an unknown name.
  double value(const std::string& name) const;
  double error(const std::string& name) const;
};

// Minimizes sum(((y - model(x; p)) / sigma)^2) by damped Gauss-Newton with
// central-difference Jacobians. Never throws on numerical trouble; returns
// converged = false with a diagnostic instead. Throws InvalidData for
// malformed input (size mismatch, too few points, sigma <= 0).
FitResult fit_least_squares(const FitModel& model, std::span<const double> x, std::span<const double> y,
                            std::span<const double> sigma, std::vector<double> init, const FitOptions& options = {});

// sqrt(p(1-p)/n), with an Agresti-Coull floor when p is 0 or 1.
double binomial_sigma(double p, int n);

double rb_survival_model(double length, double eps_g, double d_if);
FitResult fit_rb_decay(const RBDataset& ds);

struct CoherencePoint {
  double t2s = 0.0;    // s
  double eps_g = 0.0;
  double sigma = 0.0;  // <= 0 means unweighted
};

double eq2_error(double t_cg, double eta, double t2s);
// Closed-form eta from a single point.
double invert_eta(double t_cg, double t2s, double eps_g);
FitResult fit_eta(const std::vector<CoherencePoint>& points, double t_cg);

// offset + amplitude * cos(2 pi frequency x + phase)
double sinusoid_model(double x, double frequency, double amplitude, double phase, double offset);
FitResult fit_sinusoid(const ExperimentTrace& trace);

// offset + amplitude * exp(-((x - center) / width)^2)
double gaussian_model(double x, double center, double width, double amplitude, double offset);
FitResult fit_gaussian(const ExperimentTrace& trace);

// Echo visibility amplitude * exp(-(t / t2s)^2).
FitResult fit_echo_decay(const ExperimentTrace& trace);

struct BudgetReport {
  double detuning = 0.0;
  double pulse_area = 0.0;
  double dephasing_ratio_estimate = 0.0;  // t_CG / T_2s
  double dephasing_eq2 = 0.0;             // 1 - exp(-t_CG / (eta T_2s))
  double total = 0.0;                     // detuning + pulse_area + dephasing_eq2
  std::optional<double> measured_eps_g;
};

// Mean over the 24 Cliffords of 1 - F(ideal, simulated) for the coherent
// error at +rms and -rms; timing from `timing`.
double coherent_error_per_gate(const CliffordTable& cliffords, const PulseTable& pulses, const RBConfig& timing,
                               double detuning_rad_s, double area_scale);

BudgetReport error_budget(const NoiseConfig& noise, double t_cg, const CliffordTable& cliffords,
                          const PulseTable& pulses, const RBConfig& timing,
                          std::optional<double> measured_eps_g = std::nullopt);

}  // namespace rbsim
