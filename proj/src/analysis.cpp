#include "rbsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rbsim/error.hpp"

namespace rbsim {

double FitResult::value(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return params[i];
  }
  throw std::out_of_range("no fit parameter named " + name);
}

double FitResult::error(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return std_errors[i];
  }
  throw std::out_of_range("no fit parameter named " + name);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
  const FitModel& model;
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> sigma;
  size_t n_params;

  double lower(size_t j) const { return model.lower.empty() ? -kInf : model.lower[j]; }
  double upper(size_t j) const { return model.upper.empty() ? kInf : model.upper[j]; }
  double scale(size_t j) const { return model.scales.empty() ? 1.0 : model.scales[j]; }

  void clamp(std::vector<double>& p) const {
    for (size_t j = 0; j < n_params; ++j) p[j] = std::clamp(p[j], lower(j), upper(j));
  }

  Eigen::VectorXd residuals(const std::vector<double>& p) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
    for (size_t i = 0; i < x.size(); ++i) r(static_cast<Eigen::Index>(i)) = (y[i] - model.eval(x[i], p)) / sigma[i];
    return r;
  }

  // d r / d p by central differences; one-sided at an active bound.
  Eigen::MatrixXd jacobian(const std::vector<double>& p, double rel_step) const {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(n_params));
    for (size_t j = 0; j < n_params; ++j) {
      const double h = rel_step * std::max(std::abs(p[j]), scale(j));
      std::vector<double> hi = p;
      std::vector<double> lo = p;
      hi[j] = std::min(p[j] + h, upper(j));
      lo[j] = std::max(p[j] - h, lower(j));
      const double span = hi[j] - lo[j];
      for (size_t i = 0; i < x.size(); ++i) {
        const double d = span > 0.0 ? (model.eval(x[i], hi) - model.eval(x[i], lo)) / span : 0.0;
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -d / sigma[i];
      }
    }
    return J;
  }

  // Largest cosine between the residual and a free Jacobian column.
  double gradient_cosine(const std::vector<double>& p, const Eigen::MatrixXd& J, const Eigen::VectorXd& r) const {
    const double rn = r.norm();
    // An interpolating fit leaves only rounding noise, which has no direction.
    double yn = 0.0;
    for (size_t i = 0; i < y.size(); ++i) yn += (y[i] / sigma[i]) * (y[i] / sigma[i]);
    if (rn <= 1e-10 * std::sqrt(yn)) return 0.0;
    const Eigen::VectorXd g = J.transpose() * r;
    double worst = 0.0;
    for (size_t j = 0; j < n_params; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      // Descent direction is -g; a bound blocks it if it points outward.
      if (p[j] <= lower(j) && -g(jj) < 0.0) continue;
      if (p[j] >= upper(j) && -g(jj) > 0.0) continue;
      const double cn = J.col(jj).norm();
      if (cn == 0.0) continue;
      worst = std::max(worst, std::abs(g(jj)) / (cn * rn));
    }
    return worst;
  }
};

void fill_errors(FitResult& out, const Eigen::MatrixXd& J) {
  out.std_errors.assign(out.params.size(), kInf);
  // Column scaling keeps the rank test meaningful when parameters differ by
  // many orders of magnitude (seconds next to dimensionless amplitudes).
  const Eigen::VectorXd norms = J.colwise().norm().transpose();
  if ((norms.array() <= 0.0).any()) return;
  const Eigen::MatrixXd Js = J * norms.cwiseInverse().asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Js.transpose() * Js);
  if (!lu.isInvertible()) return;
  const Eigen::MatrixXd cov = lu.inverse();
  for (size_t j = 0; j < out.params.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double v = cov(jj, jj);
    out.std_errors[j] = v >= 0.0 ? std::sqrt(v) / norms(jj) : kInf;
  }
}

}  // namespace

FitResult fit_least_squares(const FitModel& model, std::span<const double> x, std::span<const double> y,
                            std::span<const double> sigma, std::vector<double> init, const FitOptions& options) {
  const size_t np = model.names.size();
  if (init.size() != np) throw InvalidData("initial guess does not match the parameter count");
  if (x.size() != y.size() || x.size() != sigma.size()) throw InvalidData("x, y and sigma sizes differ");
  if (x.size() < np) throw InvalidData("fewer data points than parameters");
  if ((!model.lower.empty() && model.lower.size() != np) || (!model.upper.empty() && model.upper.size() != np) ||
      (!model.scales.empty() && model.scales.size() != np)) {
    throw InvalidData("bounds/scales do not match the parameter count");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidData("sigma must be positive and finite");
  }

  const Problem prob{model, x, y, sigma, np};
  FitResult out;
  out.names = model.names;
  out.dof = static_cast<int>(x.size()) - static_cast<int>(np);

  std::vector<double> p = std::move(init);
  prob.clamp(p);
  Eigen::VectorXd r = prob.residuals(p);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) {
    out.params = p;
    out.std_errors.assign(np, kInf);
    out.diagnostic = "model is not finite at the initial guess";
    return out;
  }

  double lambda = 1e-3;
  bool done = false;
  bool stalled = false;
  Eigen::MatrixXd J = prob.jacobian(p, options.jacobian_step);
  while (!done && out.iterations < options.max_iterations) {
    if (r.squaredNorm() == 0.0) break;
    for (Eigen::Index j = 0; j < J.cols(); ++j) {
      if (J.col(j).squaredNorm() == 0.0) {
        out.params = p;
        out.std_errors.assign(np, kInf);
        out.chi2 = cost;
        out.residual_norm = std::sqrt(cost);
        out.diagnostic = "singular Jacobian: parameter '" + model.names[static_cast<size_t>(j)] +
                         "' does not affect the model";
        return out;
      }
    }
    ++out.iterations;
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    // Parameters held at a bound by the gradient stay fixed for this step,
    // so the remaining ones are solved for consistently.
    std::vector<Eigen::Index> free;
    for (size_t j = 0; j < np; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const bool pinned = (p[j] <= prob.lower(j) && g(jj) > 0.0) || (p[j] >= prob.upper(j) && g(jj) < 0.0);
      if (!pinned) free.push_back(jj);
    }
    if (free.empty()) {
      done = true;
      break;
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd Af(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = g(free[static_cast<size_t>(a)]);
      for (Eigen::Index b = 0; b < nf; ++b) Af(a, b) = A(free[static_cast<size_t>(a)], free[static_cast<size_t>(b)]);
    }

    // Retry with heavier damping until the cost drops.
    for (;;) {
      Eigen::MatrixXd M = Af;
      M.diagonal() += lambda * Af.diagonal();
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        lambda *= 10.0;
      } else {
        const Eigen::VectorXd step = ldlt.solve(-gf);
        std::vector<double> trial = p;
        for (Eigen::Index a = 0; a < nf; ++a) trial[static_cast<size_t>(free[static_cast<size_t>(a)])] += step(a);
        prob.clamp(trial);
        const Eigen::VectorXd r_trial = prob.residuals(trial);
        const double cost_trial = r_trial.squaredNorm();
        if (std::isfinite(cost_trial) && cost_trial <= cost) {
          double rel = 0.0;
          for (size_t j = 0; j < np; ++j) {
            rel = std::max(rel, std::abs(trial[j] - p[j]) / std::max(std::abs(p[j]), prob.scale(j) * 1e-6));
          }
          const bool improved = cost_trial < cost;
          p = std::move(trial);
          r = r_trial;
          cost = cost_trial;
          lambda = std::max(lambda * 0.1, 1e-12);
          if (rel < options.step_tolerance || !improved) done = true;
          break;
        }
        lambda *= 10.0;
      }
      if (lambda > 1e16) {
        stalled = true;
        done = true;
        break;
      }
    }
    J = prob.jacobian(p, options.jacobian_step);
  }

  out.params = p;
  out.chi2 = cost;
  out.residual_norm = std::sqrt(cost);
  fill_errors(out, J);
  const double cosine = prob.gradient_cosine(p, J, r);
  if (cost == 0.0 || (done && cosine <= options.gradient_tolerance)) {
    out.converged = true;
  } else if (stalled) {
    out.diagnostic = "damping limit reached; gradient cosine " + std::to_string(cosine);
  } else if (!done) {
    out.diagnostic = "iteration limit reached";
  } else {
    out.diagnostic = "step converged but gradient cosine " + std::to_string(cosine) + " above tolerance";
  }
  return out;
}

double binomial_sigma(double p, int n) {
  if (n < 1) throw InvalidData("binomial sigma needs at least one shot");
  if (p > 0.0 && p < 1.0) return std::sqrt(p * (1.0 - p) / n);
  // Agresti-Coull with z = 1.96.
  constexpr double z2 = 1.96 * 1.96;
  const double n_adj = n + z2;
  const double p_adj = (p * n + 0.5 * z2) / n_adj;
  return std::sqrt(p_adj * (1.0 - p_adj) / n_adj);
}

double rb_survival_model(double length, double eps_g, double d_if) {
  return 0.5 + 0.5 * (1.0 - d_if) * std::pow(1.0 - 2.0 * eps_g, length);
}

FitResult fit_rb_decay(const RBDataset& ds) {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> s;
  for (const RBLengthData& d : ds.points) {
    x.push_back(d.length);
    y.push_back(d.mean);
    const int pooled = std::max(1, ds.sequences_per_length * ds.shots_per_sequence);
    s.push_back(std::max(d.std_error, binomial_sigma(d.mean, pooled)));
  }
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw InvalidData("RB fit needs at least three distinct lengths");

  const size_t shortest =
      static_cast<size_t>(std::min_element(x.begin(), x.end()) - x.begin());
  const double d0 = std::clamp(1.0 - (2.0 * y[shortest] - 1.0), 0.0, 1.0);

  // Slope of log(2F - 1) against length.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double v = 2.0 * y[i] - 1.0;
    if (v <= 0.0) continue;
    sx += x[i];
    sy += std::log(v);
    sxx += x[i] * x[i];
    sxy += x[i] * std::log(v);
    ++m;
  }
  double e0 = 0.0;
  if (m >= 2 && m * sxx - sx * sx > 0.0) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    e0 = std::clamp(0.5 * (1.0 - std::exp(slope)), 0.0, 0.5);
  }

  FitModel model;
  model.names = {"eps_g", "d_if"};
  model.eval = [](double l, std::span<const double> p) { return rb_survival_model(l, p[0], p[1]); };
  model.lower = {0.0, 0.0};
  model.upper = {0.5, 1.0};
  model.scales = {1e-4, 1e-2};
  return fit_least_squares(model, x, y, s, {e0, d0});
}

double eq2_error(double t_cg, double eta, double t2s) { return 1.0 - std::exp(-t_cg / (eta * t2s)); }

double invert_eta(double t_cg, double t2s, double eps_g) {
  if (!(eps_g > 0.0 && eps_g < 1.0)) throw InvalidData("eps_g must lie in (0, 1) to invert for eta");
  return -t_cg / (t2s * std::log1p(-eps_g));
}

FitResult fit_eta(const std::vector<CoherencePoint>& points, double t_cg) {
  if (points.empty()) throw InvalidData("eta fit needs at least one point");
  if (!(t_cg > 0.0)) throw InvalidParameter("t_cg must be positive");
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> s;
  std::vector<double> guesses;
  for (const CoherencePoint& pt : points) {
    if (!(pt.eps_g < 1.0)) throw InvalidData("eps_g >= 1 cannot come from a finite coherence time");
    if (!(pt.t2s > 0.0)) throw InvalidData("t2s must be positive");
    x.push_back(pt.t2s);
    y.push_back(pt.eps_g);
    s.push_back(pt.sigma > 0.0 ? pt.sigma : 1.0);
    if (pt.eps_g > 0.0) guesses.push_back(invert_eta(t_cg, pt.t2s, pt.eps_g));
  }
  double init = 1.0;
  if (!guesses.empty()) {
    std::nth_element(guesses.begin(), guesses.begin() + static_cast<std::ptrdiff_t>(guesses.size() / 2), guesses.end());
    init = guesses[guesses.size() / 2];
  }

  FitModel model;
  model.names = {"eta"};
  model.eval = [t_cg](double t2s, std::span<const double> p) { return eq2_error(t_cg, p[0], t2s); };
  model.lower = {1e-12};
  model.upper = {kInf};
  return fit_least_squares(model, x, y, s, {init});
}

namespace {

// Weights taken from the data favour points that fluctuated toward 0 or 1
// and bias the fit; one refit with weights from the fitted curve removes it.
// `to_prob` maps a model value to p(|0>); sigma is scaled back by `unit`.
FitResult fit_binomial(const FitModel& model, const ExperimentTrace& trace, const std::vector<double>& y,
                       std::vector<double> init, double (*to_prob)(double), double unit) {
  const std::vector<double>& x = trace.abscissa;
  std::vector<double> s(x.size());
  auto shots = [&trace](size_t i) { return i < trace.shots.size() ? trace.shots[i] : 1; };
  for (size_t i = 0; i < x.size(); ++i) s[i] = unit * binomial_sigma(to_prob(y[i]), shots(i));
  FitResult first = fit_least_squares(model, x, y, s, std::move(init));
  if (!first.converged) return first;
  for (size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(to_prob(model.eval(x[i], first.params)), 0.0, 1.0);
    s[i] = unit * binomial_sigma(p, shots(i));
  }
  FitResult second = fit_least_squares(model, x, y, s, first.params);
  second.iterations += first.iterations;
  return second.converged ? second : first;
}

double identity_prob(double p) { return p; }
double visibility_prob(double v) { return std::clamp(0.5 * (1.0 + v), 0.0, 1.0); }

void require_points(const ExperimentTrace& trace, size_t n) {
  if (trace.abscissa.size() != trace.probabilities.size()) throw InvalidData("trace columns differ in length");
  if (trace.abscissa.size() < n) throw InvalidData("trace has fewer points than the model needs");
}

}  // namespace

double sinusoid_model(double x, double frequency, double amplitude, double phase, double offset) {
  return offset + amplitude * std::cos(kTwoPi * frequency * x + phase);
}

FitResult fit_sinusoid(const ExperimentTrace& trace) {
  require_points(trace, 5);
  const std::vector<double>& x = trace.abscissa;
  const std::vector<double>& y = trace.probabilities;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const double span = *xmax - *xmin;
  if (!(span > 0.0)) throw InvalidData("sinusoid fit needs a non-degenerate abscissa");

  // Dominant bin of the discrete spectrum, oversampled 8x, up to the mean-spacing Nyquist limit.
  const double nyquist = 0.5 * static_cast<double>(x.size() - 1) / span;
  const double df = 1.0 / (8.0 * span);
  double best_f = df;
  double best_power = -1.0;
  for (double f = df; f <= nyquist; f += df) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = 0; i < x.size(); ++i) acc += (y[i] - mean) * std::polar(1.0, -kTwoPi * f * x[i]);
    if (std::norm(acc) > best_power) {
      best_power = std::norm(acc);
      best_f = f;
    }
  }
  // Linear least squares for cos/sin quadratures at that frequency.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(x.size()), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
  for (size_t i = 0; i < x.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    design(ii, 0) = 1.0;
    design(ii, 1) = std::cos(kTwoPi * best_f * x[i]);
    design(ii, 2) = std::sin(kTwoPi * best_f * x[i]);
    rhs(ii) = y[i];
  }
  const Eigen::Vector3d q = design.colPivHouseholderQr().solve(rhs);
  // a cos + b sin = A cos(wt + phi) with A = hypot(a, b), phi = atan2(-b, a)
  const double amp0 = std::hypot(q(1), q(2));
  const double phase0 = std::atan2(-q(2), q(1));

  FitModel model;
  model.names = {"frequency", "amplitude", "phase", "offset"};
  model.eval = [](double t, std::span<const double> p) { return sinusoid_model(t, p[0], p[1], p[2], p[3]); };
  model.scales = {best_f, 0.1, 1.0, 0.1};
  FitResult r = fit_binomial(model, trace, y, {best_f, amp0, phase0, q(0)}, identity_prob, 1.0);
  if (r.params[1] < 0.0) {
    r.params[1] = -r.params[1];
    r.params[2] += kPi;
  }
  r.params[2] = std::remainder(r.params[2], kTwoPi);
  return r;
}

double gaussian_model(double x, double center, double width, double amplitude, double offset) {
  const double u = (x - center) / width;
  return offset + amplitude * std::exp(-u * u);
}

FitResult fit_gaussian(const ExperimentTrace& trace) {
  require_points(trace, 5);
  const std::vector<double>& x = trace.abscissa;
  const std::vector<double>& y = trace.probabilities;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double offset0 = *lo;
  const double amp0 = *hi - *lo;
  // Weighted moments of the baseline-subtracted peak.
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double v = y[i] - offset0;
    w += v;
    m1 += v * x[i];
    m2 += v * x[i] * x[i];
  }
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  double center0 = x[static_cast<size_t>(hi - y.begin())];
  double width0 = 0.25 * (*xmax - *xmin);
  if (w > 0.0) {
    const double var = m2 / w - (m1 / w) * (m1 / w);
    if (var > 0.0) width0 = std::sqrt(2.0 * var);
  }
  if (!(width0 > 0.0)) width0 = 1.0;

  FitModel model;
  model.names = {"center", "width", "amplitude", "offset"};
  model.eval = [](double t, std::span<const double> p) { return gaussian_model(t, p[0], p[1], p[2], p[3]); };
  model.scales = {width0, width0, 0.1, 0.1};
  FitResult r = fit_binomial(model, trace, y, {center0, width0, amp0, offset0}, identity_prob, 1.0);
  r.params[1] = std::abs(r.params[1]);
  if (r.converged && std::abs(r.params[2]) <= 1e-12) {
    r.converged = false;
    r.diagnostic = "zero-amplitude Gaussian: trace is flat";
  }
  return r;
}

FitResult fit_echo_decay(const ExperimentTrace& trace) {
  require_points(trace, 2);
  const std::vector<double> v = echo_visibility(trace);

  // ln V = ln A - t^2 / T^2 over the points with V clearly above zero.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0.1) continue;
    const double u = trace.abscissa[i] * trace.abscissa[i];
    sx += u;
    sy += std::log(v[i]);
    sxx += u * u;
    sxy += u * std::log(v[i]);
    ++m;
  }
  double t0 = *std::max_element(trace.abscissa.begin(), trace.abscissa.end()) / 2.0;
  double a0 = *std::max_element(v.begin(), v.end());
  if (m >= 2 && m * sxx - sx * sx > 0.0) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (slope < 0.0) {
      t0 = std::sqrt(-1.0 / slope);
      a0 = std::exp((sy - slope * sx) / m);
    }
  }
  if (!(t0 > 0.0)) t0 = 1.0;

  FitModel model;
  model.names = {"t2s", "amplitude"};
  model.eval = [](double t, std::span<const double> p) { return gaussian_model(t, 0.0, p[0], p[1], 0.0); };
  model.lower = {1e-12, -kInf};
  model.upper = {kInf, kInf};
  model.scales = {t0, 0.1};
  return fit_binomial(model, trace, v, {t0, a0}, visibility_prob, 2.0);
}

double coherent_error_per_gate(const CliffordTable& cliffords, const PulseTable& pulses, const RBConfig& timing,
                               double detuning_rad_s, double area_scale) {
  const double rabi = timing.rabi_rad_s() * area_scale;
  const double idle = effective_idle(timing, pulses);
  double sum = 0.0;
  for (int g = 0; g < cliffords.size(); ++g) {
    const PulseSchedule sched = pulses.decompose(g, timing.t_half_pi, idle);
    Unitary u;
    for (const PulsePrimitive& p : sched.pulses) {
      u = pulse_propagator(rabi, detuning_rad_s, p.axis_phase(), p.duration) * u;
    }
    u = pulse_propagator(0.0, detuning_rad_s, 0.0, sched.idle_time) * u;
    sum += 1.0 - avg_gate_fidelity(cliffords.element(g).unitary, u);
  }
  return sum / cliffords.size();
}

BudgetReport error_budget(const NoiseConfig& noise, double t_cg, const CliffordTable& cliffords,
                          const PulseTable& pulses, const RBConfig& timing, std::optional<double> measured_eps_g) {
  noise.validate();
  if (!(t_cg > 0.0)) throw InvalidParameter("t_cg must be positive");
  BudgetReport b;
  const double delta = kTwoPi * noise.detuning_rms_hz;
  b.detuning = 0.5 * (coherent_error_per_gate(cliffords, pulses, timing, delta, 1.0) +
                      coherent_error_per_gate(cliffords, pulses, timing, -delta, 1.0));
  b.pulse_area = 0.5 * (coherent_error_per_gate(cliffords, pulses, timing, 0.0, 1.0 + noise.area_rms) +
                        coherent_error_per_gate(cliffords, pulses, timing, 0.0, 1.0 - noise.area_rms));
  if (noise.has_dephasing()) {
    b.dephasing_ratio_estimate = t_cg / noise.t2s;
    b.dephasing_eq2 = eq2_error(t_cg, noise.eta, noise.t2s);
  }
  b.total = b.detuning + b.pulse_area + b.dephasing_eq2;
  b.measured_eps_g = measured_eps_g;
  return b;
}

}  // namespace rbsim
