#include <doctest.h>

#include <string>

#include "rbsim/config.hpp"
#include "rbsim/error.hpp"

using namespace rbsim;

TEST_CASE("defaults round-trip") {
  const RunConfig cfg = RunConfig::defaults();
  CHECK(parse_config(serialize_config(cfg)) == cfg);
  CHECK(serialize_config(parse_config(serialize_config(cfg))) == serialize_config(cfg));
}

TEST_CASE("a modified config round-trips") {
  RunConfig cfg = RunConfig::defaults();
  cfg.experiment = ExperimentKind::Sweep;
  cfg.seed = 18446744073709551615ULL;
  cfg.rb.seed = cfg.seed;
  cfg.output_dir = "runs/a b";
  cfg.rb.lengths = {1, 3, 17};
  cfg.rb.rabi_hz = 12000.5;
  cfg.rb.t_cg_override.reset();
  cfg.decomposition = DecompositionObjective::MinDuration;
  cfg.noise.t2s = std::numeric_limits<double>::infinity();
  cfg.noise.area_rms = 0.1 + 0.2;  // not exactly representable as a short decimal
  cfg.noise.resample_policy = ResamplePolicy::PerSequence;
  cfg.ramsey.envelope_t2r = 0.3;
  cfg.ramsey.delays = linspace(0, 0.1, 7);
  cfg.sweep.depth_ratios = {1.0, 1.25};
  cfg.budget.measured_eps_g = 3e-5;
  CHECK(parse_config(serialize_config(cfg)) == cfg);
}

TEST_CASE("parsing") {
  const RunConfig cfg = parse_config(
      "format_version = 1\n"
      "experiment = ramsey\n"
      "seed = 42\n"
      "; comment\n"
      "[ramsey]\n"
      "delays = linspace(0, 0.12, 5)\n"
      "[noise]\n"
      "t2s = inf\n");
  CHECK(cfg.experiment == ExperimentKind::Ramsey);
  CHECK(cfg.seed == 42);
  CHECK(cfg.rb.seed == 42);
  CHECK(cfg.ramsey.delays.size() == 5);
  CHECK(cfg.ramsey.delays.back() == doctest::Approx(0.12));
  CHECK_FALSE(cfg.noise.has_dephasing());
  // untouched sections keep the defaults
  CHECK(cfg.rb == [] {
    RBConfig rb = RunConfig::defaults().rb;
    rb.seed = 42;
    return rb;
  }());
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_AS(parse_config("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\nsed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[nosie]\nt2s = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[noise]\nt2 = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[noise]\nt2s = 1.7s\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[noise]\nt2s = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[noise]\nresample_policy = hourly\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[rb]\nlengths = 1, 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\nexperiment = tomography\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[rb]\nsequences_per_length = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[sweep]\ndepth_ratios = 1, -0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\n[rb\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/rbsim.ini"), ConfigError);
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_double(20.78e-6) == "2.078e-05");
  CHECK(format_double(1.3) == "1.3");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}
