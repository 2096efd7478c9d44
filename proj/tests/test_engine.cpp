#include <doctest.h>

#include <cmath>

#include "rbsim/analysis.hpp"
#include "rbsim/engine.hpp"
#include "rbsim/error.hpp"

using namespace rbsim;

namespace {

struct Fixture {
  CliffordTable cliffords = CliffordTable::generate();
  PulseTable pulses = PulseTable::build(cliffords);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

RBConfig small_rb() {
  RBConfig cfg = RBConfig::benchmark_defaults();
  cfg.lengths = {1, 50, 100, 200};
  cfg.sequences_per_length = 3;
  cfg.shots_per_sequence = 10;
  return cfg;
}

}  // namespace

TEST_CASE("noiseless RB survives at every benchmark length") {
  const RBConfig cfg = RBConfig::benchmark_defaults();
  for (SamplingMode mode : {SamplingMode::Expectation, SamplingMode::Bernoulli}) {
    RBHooks hooks;
    hooks.mode = mode;
    const RBDataset ds = run_rb(cfg, NoiseConfig::zero(), fx().cliffords, fx().pulses, hooks);
    REQUIRE(ds.points.size() == 7);
    for (const RBLengthData& p : ds.points) {
      for (double s : p.survivals) CHECK(std::abs(s - 1.0) < 1e-9);
      CHECK(p.std_error < 1e-9);
    }
  }
}

TEST_CASE("dataset bookkeeping") {
  const RBConfig cfg = small_rb();
  const RBDataset ds = run_rb(cfg, NoiseConfig::benchmark_defaults(), fx().cliffords, fx().pulses);
  CHECK(ds.sequences_per_length == 3);
  CHECK(ds.shots_per_sequence == 10);
  CHECK(ds.mean_gate_time == doctest::Approx(75.73e-6));
  for (const RBLengthData& p : ds.points) {
    REQUIRE(p.survivals.size() == 3);
    double m = 0, ss = 0;
    for (double s : p.survivals) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      m += s / 3;
    }
    for (double s : p.survivals) ss += (s - m) * (s - m);
    CHECK(p.mean == doctest::Approx(m));
    CHECK(p.std_error == doctest::Approx(std::sqrt(ss / 2) / std::sqrt(3.0)));
  }
}

TEST_CASE("results do not depend on the worker count") {
  const RBConfig cfg = small_rb();
  RBHooks one, many;
  many.workers = 4;
  const RBDataset a = run_rb(cfg, NoiseConfig::benchmark_defaults(), fx().cliffords, fx().pulses, one);
  const RBDataset b = run_rb(cfg, NoiseConfig::benchmark_defaults(), fx().cliffords, fx().pulses, many);
  for (size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].survivals == b.points[i].survivals);

  RamseyConfig r;
  r.delays = linspace(0, 0.12, 13);
  CHECK(run_ramsey(r, NoiseConfig::benchmark_defaults(), 3).probabilities ==
        run_ramsey(r, NoiseConfig::benchmark_defaults(), 3, SamplingMode::Bernoulli, 3).probabilities);
}

TEST_CASE("depolarizing hook follows the analytic decay exactly") {
  RBConfig cfg = RBConfig::benchmark_defaults();
  cfg.sequences_per_length = 2;
  cfg.shots_per_sequence = 1;
  RBHooks hooks;
  hooks.mode = SamplingMode::Expectation;
  for (double p : {1e-4, 1e-3, 1e-2}) {
    hooks.depolarizing_p = p;
    const RBDataset ds = run_rb(cfg, NoiseConfig::zero(), fx().cliffords, fx().pulses, hooks);
    for (const RBLengthData& d : ds.points) {
      CHECK(d.mean == doctest::Approx(0.5 + 0.5 * std::pow(1 - 2 * p, d.length)).epsilon(1e-12));
    }
  }
}

TEST_CASE("survival decays monotonically under benchmark noise") {
  RBConfig cfg = RBConfig::benchmark_defaults();
  cfg.shots_per_sequence = 500;
  const RBDataset ds = run_rb(cfg, NoiseConfig::benchmark_defaults(), fx().cliffords, fx().pulses);
  for (size_t i = 1; i < ds.points.size(); ++i) {
    const double tol = 2 * std::hypot(ds.points[i].std_error, ds.points[i - 1].std_error);
    CHECK(ds.points[i].mean <= ds.points[i - 1].mean + tol);
  }
}

TEST_CASE("per-sequence policy shares one draw across shots") {
  RBConfig cfg = small_rb();
  NoiseConfig noise;
  noise.area_rms = 0.05;
  noise.detuning_rms_hz = 50;
  RBHooks hooks;
  hooks.mode = SamplingMode::Expectation;

  noise.resample_policy = ResamplePolicy::PerSequence;
  cfg.shots_per_sequence = 1;
  const RBDataset one = run_rb(cfg, noise, fx().cliffords, fx().pulses, hooks);
  cfg.shots_per_sequence = 7;
  const RBDataset seven = run_rb(cfg, noise, fx().cliffords, fx().pulses, hooks);
  for (size_t i = 0; i < one.points.size(); ++i) {
    for (size_t k = 0; k < 3; ++k) {
      CHECK(one.points[i].survivals[k] == doctest::Approx(seven.points[i].survivals[k]).epsilon(1e-12));
    }
  }

  noise.resample_policy = ResamplePolicy::PerShot;
  const RBDataset independent = run_rb(cfg, noise, fx().cliffords, fx().pulses, hooks);
  int differing = 0;
  for (size_t i = 1; i < one.points.size(); ++i) {
    for (size_t k = 0; k < 3; ++k) differing += one.points[i].survivals[k] != independent.points[i].survivals[k];
  }
  CHECK(differing > 0);
}

TEST_CASE("simulate_sequence matches the ideal product without noise") {
  const std::vector<int> seq = draw_sequence(8, 0, 1300);
  const int rec = fx().cliffords.recovery_gate(seq);
  const double p = simulate_sequence(seq, rec, fx().pulses, RBConfig::benchmark_defaults(), NoiseConfig::zero(), {});
  CHECK(std::abs(p - 1.0) < 1e-9);
  // a wrong recovery gate is caught
  const double q = simulate_sequence(seq, fx().cliffords.compose(1, rec), fx().pulses, RBConfig::benchmark_defaults(),
                                     NoiseConfig::zero(), {});
  CHECK(q < 1.0 - 1e-3);
}

TEST_CASE("t_CG override stretches the idle") {
  RBConfig cfg = RBConfig::benchmark_defaults();
  const double natural = mean_clifford_duration(fx().pulses, cfg.t_half_pi, cfg.idle);
  CHECK(effective_idle(cfg, fx().pulses) == doctest::Approx(cfg.idle + 75.73e-6 - natural));
  cfg.t_cg_override.reset();
  CHECK(effective_idle(cfg, fx().pulses) == cfg.idle);
  CHECK(gate_dephasing_time(NoiseConfig::benchmark_defaults()) == doctest::Approx(1.72 * 1.30 / 3));
}

TEST_CASE("invalid RB configs are rejected") {
  RBConfig cfg = small_rb();
  cfg.lengths = {};
  CHECK_THROWS_AS(run_rb(cfg, NoiseConfig::zero(), fx().cliffords, fx().pulses), InvalidParameter);
  cfg = small_rb();
  cfg.lengths = {0, 5};
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg = small_rb();
  cfg.shots_per_sequence = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg = small_rb();
  cfg.rabi_hz = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  RamseyConfig r;
  r.delays = {0.0};
  r.shots = 0;
  CHECK_THROWS_AS(run_ramsey(r, NoiseConfig::zero(), 1), InvalidParameter);
}

TEST_CASE("Ramsey fringes follow the two-pulse formula") {
  RamseyConfig cfg;
  cfg.delays = linspace(0.0, 0.12, 49);
  const ExperimentTrace t = run_ramsey(cfg, NoiseConfig::zero(), 1, SamplingMode::Expectation);
  for (size_t i = 0; i < t.abscissa.size(); ++i) {
    const double expect = 0.5 * (1.0 - std::cos(kTwoPi * 17.0 * t.abscissa[i]));
    CHECK(std::abs(t.probabilities[i] - expect) < 1e-9);
  }
  cfg.detuning_hz = 0.0;
  for (double p : run_ramsey(cfg, NoiseConfig::zero(), 1, SamplingMode::Expectation).probabilities) {
    CHECK(p < 1e-12);
  }
}

TEST_CASE("Ramsey envelope damps the fringe contrast") {
  RamseyConfig cfg;
  cfg.delays = {0.5 / 17.0};
  cfg.envelope_t2r = 0.05;
  const double p = run_ramsey(cfg, NoiseConfig::zero(), 1, SamplingMode::Expectation).probabilities[0];
  const double contrast = std::exp(-std::pow(cfg.delays[0] / 0.05, 2));
  CHECK(p == doctest::Approx(0.5 * (1 + contrast)).epsilon(1e-9));
}

TEST_CASE("spin echo") {
  EchoConfig cfg;
  cfg.total_delays = {0.0, 1.72, 3.0};
  cfg.t2s = 1.72;
  const ExperimentTrace t = run_spin_echo(cfg, NoiseConfig::zero(), 1, SamplingMode::Expectation);
  const std::vector<double> v = echo_visibility(t);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  cfg.t2s = std::numeric_limits<double>::infinity();
  NoiseConfig noise;
  noise.detuning_rms_hz = 10.0;
  for (double x : echo_visibility(run_spin_echo(cfg, noise, 4, SamplingMode::Expectation))) {
    CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  }

  cfg.t2s = 1.72;
  cfg.total_delays = linspace(0, 3, 7);
  std::vector<double> reference;
  for (double rms : {0.0, 1.0, 10.0}) {
    noise.detuning_rms_hz = rms;
    const std::vector<double> vis = echo_visibility(run_spin_echo(cfg, noise, 4, SamplingMode::Expectation));
    if (reference.empty()) reference = vis;
    for (size_t i = 0; i < vis.size(); ++i) CHECK(std::abs(vis[i] - reference[i]) < 1e-12);
  }
}

TEST_CASE("pulse calibration scan") {
  CalibrationConfig cfg;
  cfg.durations = {20.78e-6};
  const ExperimentTrace exact = run_pulse_calibration(cfg, NoiseConfig::zero(), 1, SamplingMode::Expectation);
  CHECK(exact.probabilities[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(exact.warnings.empty());

  // cos^2(n * Omega * t / 2) with Omega = (pi/2) / t0; fringe width shrinks as 1/n
  const double t0 = 20.78e-6;
  const double omega = (kPi / 2) / t0;
  double widths[2] = {0, 0};
  int slot = 0;
  for (int n : {20, 100}) {
    cfg.n_pulses = n;
    cfg.durations = linspace(t0 - 3e-6, t0 + 3e-6, 1201);
    const ExperimentTrace t = run_pulse_calibration(cfg, NoiseConfig::zero(), 1, SamplingMode::Expectation);
    for (size_t i = 0; i < t.abscissa.size(); ++i) {
      CHECK(std::abs(t.probabilities[i] - std::pow(std::cos(n * omega * t.abscissa[i] / 2), 2)) < 1e-9);
    }
    // first zero on the right of t0
    size_t i = 600;
    while (i + 1 < t.probabilities.size() && t.probabilities[i + 1] < t.probabilities[i]) ++i;
    widths[slot++] = t.abscissa[i] - t0;
  }
  CHECK(widths[0] / widths[1] == doctest::Approx(5.0).epsilon(0.02));

  cfg.n_pulses = 6;
  cfg.durations = {t0};
  CHECK_FALSE(run_pulse_calibration(cfg, NoiseConfig::zero(), 1).warnings.empty());
}

TEST_CASE("linspace") {
  CHECK(linspace(0, 1, 5) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(linspace(2, 2, 1) == std::vector<double>{2});
}
