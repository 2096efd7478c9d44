#include "rbsim/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbsim/error.hpp"

namespace rbsim {

namespace {
constexpr cplx kI{0.0, 1.0};
}

Mat2 Mat2::adjoint() const {
  return Mat2{{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}};
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return Mat2{{x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
               x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]}};
}

Mat2 operator+(const Mat2& x, const Mat2& y) {
  return Mat2{{x.a[0] + y.a[0], x.a[1] + y.a[1], x.a[2] + y.a[2], x.a[3] + y.a[3]}};
}

Mat2 operator-(const Mat2& x, const Mat2& y) {
  return Mat2{{x.a[0] - y.a[0], x.a[1] - y.a[1], x.a[2] - y.a[2], x.a[3] - y.a[3]}};
}

Mat2 operator*(cplx s, const Mat2& x) {
  return Mat2{{s * x.a[0], s * x.a[1], s * x.a[2], s * x.a[3]}};
}

double max_abs_diff(const Mat2& x, const Mat2& y) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

namespace pauli {
const Mat2 I = Mat2::identity();
const Mat2 X{{cplx{0}, cplx{1}, cplx{1}, cplx{0}}};
const Mat2 Y{{cplx{0}, -kI, kI, cplx{0}}};
const Mat2 Z{{cplx{1}, cplx{0}, cplx{0}, cplx{-1}}};
}  // namespace pauli

Unitary Unitary::from_matrix(const Mat2& u, double tol) {
  if (max_abs_diff(u * u.adjoint(), Mat2::identity()) > tol) {
    throw InvalidParameter("matrix is not unitary");
  }
  return Unitary(u);
}

bool Unitary::equal_up_to_phase(const Unitary& other, double tol) const {
  return std::abs((u_.adjoint() * other.u_).trace()) >= 2.0 - tol;
}

QubitState QubitState::ground() { return QubitState(Mat2{{cplx{1}, cplx{0}, cplx{0}, cplx{0}}}); }

QubitState QubitState::excited() { return QubitState(Mat2{{cplx{0}, cplx{0}, cplx{0}, cplx{1}}}); }

QubitState QubitState::plus() {
  return QubitState(Mat2{{cplx{0.5}, cplx{0.5}, cplx{0.5}, cplx{0.5}}});
}

QubitState QubitState::maximally_mixed() {
  return QubitState(Mat2{{cplx{0.5}, cplx{0}, cplx{0}, cplx{0.5}}});
}

QubitState QubitState::pure(cplx c0, cplx c1) {
  const double n = std::sqrt(std::norm(c0) + std::norm(c1));
  if (!(n > 0.0)) throw InvalidParameter("zero state vector");
  c0 /= n;
  c1 /= n;
  return QubitState(Mat2{{c0 * std::conj(c0), c0 * std::conj(c1), c1 * std::conj(c0), c1 * std::conj(c1)}});
}

QubitState QubitState::from_matrix(const Mat2& rho) {
  QubitState s(rho);
  if (!s.is_valid()) throw InvalidParameter("matrix is not a valid density matrix");
  return s;
}

std::array<double, 2> QubitState::eigenvalues() const {
  // Hermitian 2x2: lambda = tr/2 +- sqrt(((a-d)/2)^2 + |b|^2)
  const double mean = 0.5 * (rho_(0, 0).real() + rho_(1, 1).real());
  const double half = 0.5 * (rho_(0, 0).real() - rho_(1, 1).real());
  const double r = std::hypot(half, std::abs(rho_(0, 1)));
  return {mean - r, mean + r};
}

bool QubitState::is_valid(double tol) const {
  if (max_abs_diff(rho_, rho_.adjoint()) > tol) return false;
  if (std::abs(rho_.trace() - cplx{1.0}) > tol) return false;
  return eigenvalues()[0] >= -tol;
}

Unitary make_rotation(double axis_phase, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  // -i s (cos(phi) X + sin(phi) Y) has off-diagonals -i s e^{-i phi}, -i s e^{+i phi}
  const cplx e = std::polar(1.0, axis_phase);
  return Unitary(Mat2{{cplx{c}, -kI * s * std::conj(e), -kI * s * e, cplx{c}}});
}

Unitary pulse_propagator(double rabi, double detuning, double axis_phase, double duration) {
  if (duration < 0.0) throw InvalidParameter("pulse duration must be non-negative");
  const double nx = rabi * std::cos(axis_phase);
  const double ny = rabi * std::sin(axis_phase);
  const double w = std::sqrt(nx * nx + ny * ny + detuning * detuning);
  if (w == 0.0 || duration == 0.0) return Unitary();
  const double half = 0.5 * w * duration;
  const double c = std::cos(half);
  const double s = std::sin(half) / w;
  // cos I - i sin (n.sigma)/|n|
  const cplx off{nx, -ny};  // nx - i ny
  return Unitary(Mat2{{cplx{c, -s * detuning}, -kI * s * off, -kI * s * std::conj(off), cplx{c, s * detuning}}});
}

QubitState apply(const Unitary& u, const QubitState& s) {
  const Mat2& m = u.matrix();
  Mat2 r = m * s.rho_ * m.adjoint();
  // Re-impose exact Hermiticity; drift would otherwise accumulate over long sequences.
  const cplx off = 0.5 * (r(0, 1) + std::conj(r(1, 0)));
  const double p0 = r(0, 0).real();
  const double p1 = r(1, 1).real();
  const double tr = p0 + p1;
  r(0, 0) = cplx{p0 / tr};
  r(1, 1) = cplx{p1 / tr};
  r(0, 1) = off / tr;
  r(1, 0) = std::conj(off) / tr;
  return QubitState(r);
}

QubitState dephase(const QubitState& s, double duration, double t_coh) {
  if (!(t_coh > 0.0)) throw InvalidParameter("coherence time must be positive");
  if (duration < 0.0) throw InvalidParameter("dephasing duration must be non-negative");
  return scale_coherence(s, std::exp(-duration / t_coh));
}

QubitState scale_coherence(const QubitState& s, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) throw InvalidParameter("coherence factor must lie in [0, 1]");
  Mat2 r = s.rho_;
  r(0, 1) *= factor;
  r(1, 0) *= factor;
  return QubitState(r);
}

QubitState depolarize(const QubitState& s, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("depolarizing probability must lie in [0, 1]");
  const double keep = 1.0 - 2.0 * p;
  Mat2 r = cplx{keep} * s.rho_;
  r(0, 0) += p;
  r(1, 1) += p;
  return QubitState(r);
}

double prob_zero(const QubitState& s) { return std::clamp(s.rho()(0, 0).real(), 0.0, 1.0); }

double avg_gate_fidelity(const Unitary& u, const Unitary& v) {
  const double t = std::abs((u.matrix().adjoint() * v.matrix()).trace());
  return (t * t + 2.0) / 6.0;
}

}  // namespace rbsim
