#include "rbsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "rbsim/error.hpp"
#include "rbsim/rng.hpp"

namespace rbsim {

void RBConfig::validate() const {
  if (lengths.empty()) throw InvalidParameter("lengths must not be empty");
  for (int l : lengths) {
    if (l < 1) throw InvalidParameter("sequence lengths must be >= 1");
  }
  if (sequences_per_length < 1) throw InvalidParameter("sequences_per_length must be >= 1");
  if (shots_per_sequence < 1) throw InvalidParameter("shots_per_sequence must be >= 1");
  if (rabi_hz && !(*rabi_hz > 0.0)) throw InvalidParameter("rabi_hz must be positive");
  if (!(t_half_pi > 0.0)) throw InvalidParameter("t_half_pi must be positive");
  if (!(idle >= 0.0)) throw InvalidParameter("idle must be non-negative");
  if (t_cg_override && !(*t_cg_override > 0.0)) throw InvalidParameter("t_cg_override must be positive");
}

double RBConfig::rabi_rad_s() const {
  return rabi_hz ? kTwoPi * *rabi_hz : (kPi / 2) / t_half_pi;
}

RBConfig RBConfig::benchmark_defaults() {
  RBConfig c;
  c.lengths = {1, 200, 400, 600, 800, 1000, 1300};
  c.sequences_per_length = 5;
  c.shots_per_sequence = 50;
  c.t_half_pi = 20.78e-6;
  c.idle = 3e-6;
  c.t_cg_override = 75.73e-6;
  return c;
}

std::vector<int> draw_sequence(uint64_t seed, int sequence_index, int length) {
  Rng rng = make_stream(seed, StreamTag::Sequence, {static_cast<uint64_t>(sequence_index)});
  std::uniform_int_distribution<int> pick(0, kCliffordCount - 1);
  std::vector<int> seq(static_cast<size_t>(length));
  for (int& g : seq) g = pick(rng);
  return seq;
}

double effective_idle(const RBConfig& cfg, const PulseTable& pulses) {
  if (!cfg.t_cg_override) return cfg.idle;
  const double table_mean = mean_clifford_duration(pulses, cfg.t_half_pi, cfg.idle);
  return std::max(0.0, cfg.idle + (*cfg.t_cg_override - table_mean));
}

double gate_dephasing_time(const NoiseConfig& noise) { return coherence_time_rb(noise) / 3.0; }

namespace {

// One step of a compiled gate: a unitary followed by decay of the coherence.
struct Step {
  Unitary u;
  double decay = 1.0;
};

// Per-shot compiled form of all 24 Cliffords under a fixed noise draw.
class ShotKernel {
 public:
  ShotKernel(const PulseTable& pulses, const RBConfig& cfg, const NoiseConfig& noise, const ShotNoise& shot,
             double idle) {
    const double rabi = cfg.rabi_rad_s() * shot.area_scale;
    const bool dephasing = noise.has_dephasing();
    const double t_coh = dephasing ? gate_dephasing_time(noise) : 0.0;
    auto decay = [&](double t) { return dephasing ? std::exp(-t / t_coh) : 1.0; };
    for (int g = 0; g < pulses.size(); ++g) {
      auto& steps = steps_[static_cast<size_t>(g)];
      for (const PulsePrimitive& p : pulses.decompose(g, cfg.t_half_pi, idle).pulses) {
        steps.push_back(Step{pulse_propagator(rabi, shot.detuning, p.axis_phase(), p.duration), decay(p.duration)});
      }
      if (idle > 0.0) steps.push_back(Step{pulse_propagator(0.0, shot.detuning, 0.0, idle), decay(idle)});
    }
  }

  QubitState run(const QubitState& in, int g) const {
    QubitState s = in;
    for (const Step& step : steps_[static_cast<size_t>(g)]) {
      s = apply(step.u, s);
      if (step.decay < 1.0) s = scale_coherence(s, step.decay);
    }
    return s;
  }

 private:
  std::array<std::vector<Step>, kCliffordCount> steps_;
};

double run_depolarizing(const std::vector<int>& sequence, int recovery, const CliffordTable& table, double p) {
  QubitState s = QubitState::ground();
  for (int g : sequence) s = depolarize(apply(table.element(g).unitary, s), p);
  s = apply(table.element(recovery).unitary, s);
  return prob_zero(s);
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

double readout(double p0, const NoiseConfig& noise, SamplingMode mode, Rng& measurement) {
  const double p = apply_spam(std::clamp(p0, 0.0, 1.0), noise.d_if);
  if (mode == SamplingMode::Expectation) return p;
  std::bernoulli_distribution outcome(p);
  return outcome(measurement) ? 1.0 : 0.0;
}

}  // namespace

double simulate_sequence(const std::vector<int>& sequence, int recovery, const PulseTable& pulses,
                         const RBConfig& cfg, const NoiseConfig& noise,
                         const ShotNoise& shot) {
  const ShotKernel kernel(pulses, cfg, noise, shot, effective_idle(cfg, pulses));
  QubitState s = QubitState::ground();
  for (int g : sequence) s = kernel.run(s, g);
  s = kernel.run(s, recovery);
  return prob_zero(s);
}

RBDataset run_rb(const RBConfig& cfg, const NoiseConfig& noise, const CliffordTable& table,
                 const PulseTable& pulses, const RBHooks& hooks) {
  cfg.validate();
  noise.validate();
  if (hooks.depolarizing_p && !(*hooks.depolarizing_p >= 0.0 && *hooks.depolarizing_p <= 0.5)) {
    throw InvalidParameter("depolarizing hook strength must lie in [0, 0.5]");
  }

  const int max_length = *std::max_element(cfg.lengths.begin(), cfg.lengths.end());
  const size_t n_len = cfg.lengths.size();
  const auto n_seq = static_cast<size_t>(cfg.sequences_per_length);
  const double idle = effective_idle(cfg, pulses);

  std::vector<std::vector<int>> sequences;
  sequences.reserve(n_seq);
  for (size_t k = 0; k < n_seq; ++k) sequences.push_back(draw_sequence(cfg.seed, static_cast<int>(k), max_length));

  // Task = (length, sequence); all shots of a task run on one worker.
  std::vector<double> survival(n_len * n_seq, 0.0);
  detail::parallel_for(n_len * n_seq, hooks.workers, [&](size_t task) {
    const size_t li = task / n_seq;
    const size_t k = task % n_seq;
    const auto length = static_cast<size_t>(cfg.lengths[li]);
    const std::vector<int> seq(sequences[k].begin(), sequences[k].begin() + static_cast<std::ptrdiff_t>(length));
    const int recovery = table.recovery_gate(seq);

    std::optional<ShotNoise> shared;
    if (noise.resample_policy == ResamplePolicy::PerSequence) {
      Rng rng = make_stream(cfg.seed, StreamTag::ShotNoise, {li, k});
      shared = sample_shot_noise(noise, rng);
    }

    double hits = 0.0;
    for (int shot = 0; shot < cfg.shots_per_sequence; ++shot) {
      const auto s = static_cast<uint64_t>(shot);
      Rng measurement = make_stream(cfg.seed, StreamTag::Measurement, {li, k, s});
      double p0 = 0.0;
      if (hooks.depolarizing_p) {
        p0 = run_depolarizing(seq, recovery, table, *hooks.depolarizing_p);
      } else {
        ShotNoise draw;
        if (shared) {
          draw = *shared;
        } else {
          Rng rng = make_stream(cfg.seed, StreamTag::ShotNoise, {li, k, s});
          draw = sample_shot_noise(noise, rng);
        }
        const ShotKernel kernel(pulses, cfg, noise, draw, idle);
        QubitState state = QubitState::ground();
        for (int g : seq) state = kernel.run(state, g);
        state = kernel.run(state, recovery);
        p0 = prob_zero(state);
      }
      hits += readout(p0, noise, hooks.mode, measurement);
    }
    survival[task] = hits / cfg.shots_per_sequence;
  });

  RBDataset ds;
  ds.sequences_per_length = cfg.sequences_per_length;
  ds.shots_per_sequence = cfg.shots_per_sequence;
  ds.idle_per_gate = idle;
  ds.mean_gate_time = mean_clifford_duration(pulses, cfg.t_half_pi, idle);
  for (size_t li = 0; li < n_len; ++li) {
    RBLengthData d;
    d.length = cfg.lengths[li];
    d.survivals.assign(survival.begin() + static_cast<std::ptrdiff_t>(li * n_seq),
                       survival.begin() + static_cast<std::ptrdiff_t>((li + 1) * n_seq));
    d.mean = mean(d.survivals);
    d.std_error = standard_error(d.survivals);
    ds.points.push_back(std::move(d));
  }
  return ds;
}

namespace {

template <class ShotFn>
ExperimentTrace run_trace(const std::vector<double>& abscissa, int shots, const NoiseConfig& noise, uint64_t seed,
                          SamplingMode mode, int workers, ShotFn&& p0_of) {
  if (shots < 1) throw InvalidParameter("shots must be >= 1");
  noise.validate();
  ExperimentTrace trace;
  trace.abscissa = abscissa;
  trace.shots.assign(abscissa.size(), shots);
  trace.probabilities.assign(abscissa.size(), 0.0);
  detail::parallel_for(abscissa.size(), workers, [&](size_t i) {
    double hits = 0.0;
    for (int shot = 0; shot < shots; ++shot) {
      const auto s = static_cast<uint64_t>(shot);
      Rng noise_rng = make_stream(seed, StreamTag::ShotNoise, {i, s});
      Rng measurement = make_stream(seed, StreamTag::Measurement, {i, s});
      const ShotNoise draw = sample_shot_noise(noise, noise_rng);
      hits += readout(p0_of(abscissa[i], draw), noise, mode, measurement);
    }
    trace.probabilities[i] = hits / shots;
  });
  return trace;
}

}  // namespace

ExperimentTrace run_ramsey(const RamseyConfig& cfg, const NoiseConfig& noise, uint64_t seed, SamplingMode mode,
                           int workers) {
  if (cfg.envelope_t2r && !(*cfg.envelope_t2r > 0.0)) throw InvalidParameter("envelope_t2r must be positive");
  for (double t : cfg.delays) {
    if (!(t >= 0.0)) throw InvalidParameter("Ramsey delays must be non-negative");
  }
  return run_trace(cfg.delays, cfg.shots, noise, seed, mode, workers, [&](double t, const ShotNoise& draw) {
    const Unitary half = make_rotation(0.0, draw.area_scale * kPi / 2);
    const double detuning = kTwoPi * cfg.detuning_hz + draw.detuning;
    QubitState s = apply(half, QubitState::ground());
    s = apply(pulse_propagator(0.0, detuning, 0.0, t), s);
    if (cfg.envelope_t2r) s = scale_coherence(s, std::exp(-std::pow(t / *cfg.envelope_t2r, 2)));
    s = apply(half, s);
    return prob_zero(s);
  });
}

ExperimentTrace run_spin_echo(const EchoConfig& cfg, const NoiseConfig& noise, uint64_t seed, SamplingMode mode,
                              int workers) {
  if (!(cfg.t2s > 0.0)) throw InvalidParameter("t2s must be positive");
  for (double t : cfg.total_delays) {
    if (!(t >= 0.0)) throw InvalidParameter("echo delays must be non-negative");
  }
  return run_trace(cfg.total_delays, cfg.shots, noise, seed, mode, workers, [&](double t, const ShotNoise& draw) {
    const Unitary half = make_rotation(0.0, draw.area_scale * kPi / 2);
    const Unitary flip = make_rotation(0.0, draw.area_scale * kPi);
    const Unitary wait = pulse_propagator(0.0, draw.detuning, 0.0, 0.5 * t);
    QubitState s = apply(half, QubitState::ground());
    s = apply(wait, s);
    s = apply(flip, s);
    s = apply(wait, s);
    s = scale_coherence(s, std::exp(-std::pow(t / cfg.t2s, 2)));
    s = apply(half, s);
    return prob_zero(s);
  });
}

ExperimentTrace run_pulse_calibration(const CalibrationConfig& cfg, const NoiseConfig& noise, uint64_t seed,
                                      SamplingMode mode, int workers) {
  if (cfg.n_pulses < 1) throw InvalidParameter("n_pulses must be >= 1");
  if (!(cfg.true_t_half_pi > 0.0)) throw InvalidParameter("true_t_half_pi must be positive");
  for (double t : cfg.durations) {
    if (!(t >= 0.0)) throw InvalidParameter("pulse durations must be non-negative");
  }
  const double rabi = (kPi / 2) / cfg.true_t_half_pi;
  ExperimentTrace trace =
      run_trace(cfg.durations, cfg.shots, noise, seed, mode, workers, [&](double t, const ShotNoise& draw) {
        const Unitary one = pulse_propagator(rabi * draw.area_scale, draw.detuning, 0.0, t);
        Unitary all;
        for (int i = 0; i < cfg.n_pulses; ++i) all = one * all;
        return prob_zero(apply(all, QubitState::ground()));
      });
  if (cfg.n_pulses % 4 != 0) {
    trace.warnings.push_back("n_pulses = " + std::to_string(cfg.n_pulses) +
                             " is not a multiple of 4; the true duration no longer returns the qubit to |0>");
  }
  return trace;
}

std::vector<double> echo_visibility(const ExperimentTrace& trace) {
  std::vector<double> v;
  v.reserve(trace.probabilities.size());
  for (double p : trace.probabilities) v.push_back(2.0 * p - 1.0);
  return v;
}

std::vector<double> linspace(double first, double last, int count) {
  if (count < 1) throw InvalidParameter("linspace needs at least one point");
  std::vector<double> v(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<size_t>(i)] = count == 1 ? first : first + (last - first) * i / (count - 1);
  }
  return v;
}

}  // namespace rbsim
