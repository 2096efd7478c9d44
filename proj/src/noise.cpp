#include "rbsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rbsim/error.hpp"
#include "rbsim/qubit.hpp"

namespace rbsim {

std::string to_string(ResamplePolicy p) { return p == ResamplePolicy::PerShot ? "per_shot" : "per_sequence"; }

ResamplePolicy resample_policy_from_string(const std::string& s) {
  if (s == "per_shot") return ResamplePolicy::PerShot;
  if (s == "per_sequence") return ResamplePolicy::PerSequence;
  throw InvalidParameter("unknown resample policy '" + s + "'");
}

void NoiseConfig::validate() const {
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0)) throw InvalidParameter(std::string(name) + " must be non-negative");
  };
  non_negative(detuning_rms_hz, "detuning_rms_hz");
  non_negative(detuning_drift_pp_hz, "detuning_drift_pp_hz");
  non_negative(area_rms, "area_rms");
  if (!(t2s > 0.0)) throw InvalidParameter("t2s must be positive (use inf to disable dephasing)");
  if (has_dephasing() && !(eta > 0.0 && std::isfinite(eta))) {
    throw InvalidParameter("eta must be positive when t2s is finite");
  }
  if (!(d_if >= 0.0 && d_if <= 1.0)) throw InvalidParameter("d_if must lie in [0, 1]");
}

NoiseConfig NoiseConfig::benchmark_defaults() {
  NoiseConfig c;
  c.detuning_rms_hz = 1.0;
  c.detuning_drift_pp_hz = 5.0;
  c.area_rms = 0.0015;
  c.t2s = 1.72;
  c.eta = 1.30;
  c.d_if = 0.03;
  return c;
}

ShotNoise sample_shot_noise(const NoiseConfig& cfg, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z_detuning = normal(rng);
  const double z_area = normal(rng);
  return ShotNoise{kTwoPi * cfg.detuning_rms_hz * z_detuning, 1.0 + cfg.area_rms * z_area};
}

double coherence_time_rb(const NoiseConfig& cfg) {
  if (!(cfg.t2s > 0.0) || !(cfg.eta > 0.0)) throw InvalidParameter("t2s and eta must be positive");
  return cfg.eta * cfg.t2s;
}

TrapDepthModel TrapDepthModel::quadratic(double t2s_magic, double curvature) {
  if (!(t2s_magic > 0.0)) throw InvalidParameter("t2s_magic must be positive");
  if (!(curvature > 0.0)) throw InvalidParameter("curvature must be positive");
  TrapDepthModel m;
  m.t2s_magic_ = t2s_magic;
  m.curvature_ = curvature;
  return m;
}

TrapDepthModel TrapDepthModel::table(std::vector<std::pair<double, double>> points) {
  std::sort(points.begin(), points.end());
  if (points.size() < 2) throw InvalidParameter("trap-depth table needs at least two points");
  const auto peak = std::find_if(points.begin(), points.end(), [](const auto& p) { return p.first == 1.0; });
  if (peak == points.end()) throw InvalidParameter("trap-depth table must contain ratio 1");
  for (size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second > 0.0)) {
      throw InvalidParameter("trap-depth table entries must be positive");
    }
    if (i == 0) continue;
    if (points[i].first == points[i - 1].first) throw InvalidParameter("duplicate ratio in trap-depth table");
    const bool rising = points[i].first <= 1.0;
    if (rising ? !(points[i].second > points[i - 1].second) : !(points[i].second < points[i - 1].second)) {
      throw InvalidParameter("trap-depth table must peak strictly at ratio 1");
    }
  }

  // Fritsch-Carlson monotone cubic Hermite slopes.
  const size_t n = points.size();
  std::vector<double> secant(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (points[i + 1].second - points[i].second) / (points[i + 1].first - points[i].first);
  }
  std::vector<double> slopes(n);
  slopes[0] = secant[0];
  slopes[n - 1] = secant[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      slopes[i] = 0.0;
    } else {
      const double h0 = points[i].first - points[i - 1].first;
      const double h1 = points[i + 1].first - points[i].first;
      const double w0 = 2 * h1 + h0;
      const double w1 = h1 + 2 * h0;
      slopes[i] = (w0 + w1) / (w0 / secant[i - 1] + w1 / secant[i]);
    }
  }

  TrapDepthModel m;
  m.t2s_magic_ = peak->second;
  m.points_ = std::move(points);
  m.slopes_ = std::move(slopes);
  return m;
}

TrapDepthModel TrapDepthModel::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open trap-depth table " + path.string());
  std::vector<std::pair<double, double>> points;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double r = 0.0;
    double t = 0.0;
    if (!(row >> r >> t)) {
      if (first) {
        first = false;
        continue;
      }
      throw InvalidParameter("malformed trap-depth row: " + line);
    }
    first = false;
    points.emplace_back(r, t);
  }
  return table(std::move(points));
}

double TrapDepthModel::curvature_for(double t2s_magic, double ratio, double t2s_target) {
  if (!(t2s_target > 0.0 && t2s_target < t2s_magic) || ratio == 1.0) {
    throw InvalidParameter("target must lie below t2s_magic at a ratio other than 1");
  }
  return (t2s_magic / t2s_target - 1.0) / ((ratio - 1.0) * (ratio - 1.0));
}

double TrapDepthModel::t2s(double ratio) const {
  if (!(ratio > 0.0)) throw InvalidParameter("trap-depth ratio must be positive");
  if (!is_table()) {
    const double d = ratio - 1.0;
    return t2s_magic_ / (1.0 + curvature_ * d * d);
  }
  if (ratio < points_.front().first || ratio > points_.back().first) {
    throw InvalidParameter("trap-depth ratio outside the tabulated range");
  }
  auto hi = std::lower_bound(points_.begin(), points_.end(), ratio,
                             [](const auto& p, double r) { return p.first < r; });
  if (hi->first == ratio) return hi->second;
  const size_t i = static_cast<size_t>(hi - points_.begin()) - 1;
  const double x0 = points_[i].first;
  const double h = points_[i + 1].first - x0;
  const double s = (ratio - x0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * points_[i].second + h10 * h * slopes_[i] + h01 * points_[i + 1].second + h11 * h * slopes_[i + 1];
}

double apply_spam(double p0_true, double d_if) {
  if (!(p0_true >= 0.0 && p0_true <= 1.0)) throw InvalidParameter("probability must lie in [0, 1]");
  if (!(d_if >= 0.0 && d_if <= 1.0)) throw InvalidParameter("d_if must lie in [0, 1]");
  return (1.0 - d_if) * p0_true + 0.5 * d_if;
}

}  // namespace rbsim
