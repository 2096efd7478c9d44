#pragma once

// Exact 2x2 algebra for a single hyperfine qubit: density matrices,
// rotation unitaries, rectangular-pulse propagators, dephasing.
//
// Basis ordering is {|0>, |1>}. Rotations follow R_n(theta) =
// exp(-i theta n.sigma / 2). Global phase is never tracked.

#include <array>
#include <complex>

namespace rbsim {

using cplx = std::complex<double>;

// Row-major 2x2 complex matrix.
struct Mat2 {
  std::array<cplx, 4> a{};

  constexpr cplx& operator()(int r, int c) { return a[2 * r + c]; }
  constexpr const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

  static Mat2 identity() { return Mat2{{cplx{1}, cplx{0}, cplx{0}, cplx{1}}}; }
  static Mat2 zero() { return Mat2{}; }

  Mat2 adjoint() const;
  cplx trace() const { return a[0] + a[3]; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y);
  friend Mat2 operator+(const Mat2& x, const Mat2& y);
  friend Mat2 operator-(const Mat2& x, const Mat2& y);
  friend Mat2 operator*(cplx s, const Mat2& x);
};

double max_abs_diff(const Mat2& x, const Mat2& y);

namespace pauli {
extern const Mat2 I;
extern const Mat2 X;
extern const Mat2 Y;
extern const Mat2 Z;
}  // namespace pauli

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class Unitary {
 public:
  Unitary() : u_(Mat2::identity()) {}

  // Checks u u^dagger = I to `tol` elementwise; throws InvalidParameter.
  static Unitary from_matrix(const Mat2& u, double tol = 1e-10);

  const Mat2& matrix() const { return u_; }
  Unitary adjoint() const { return Unitary(u_.adjoint()); }

  friend Unitary operator*(const Unitary& x, const Unitary& y) { return Unitary(x.u_ * y.u_); }

  // |tr(u^dagger v)| >= 2 - tol
  bool equal_up_to_phase(const Unitary& other, double tol = 1e-9) const;

 private:
  explicit Unitary(const Mat2& u) : u_(u) {}
  friend Unitary make_rotation(double, double);
  friend Unitary pulse_propagator(double, double, double, double);

  Mat2 u_;
};

class QubitState {
 public:
  QubitState() : rho_(ground().rho_) {}

  static QubitState ground();        // |0><0|
  static QubitState excited();       // |1><1|
  static QubitState plus();          // |+><+|
  static QubitState maximally_mixed();
  static QubitState pure(cplx c0, cplx c1);  // normalizes
  // Validates Hermiticity, unit trace and positivity; throws InvalidParameter.
  static QubitState from_matrix(const Mat2& rho);

  const Mat2& rho() const { return rho_; }
  cplx coherence() const { return rho_(0, 1); }

  std::array<double, 2> eigenvalues() const;
  bool is_valid(double tol = 1e-12) const;

 private:
  explicit QubitState(const Mat2& rho) : rho_(rho) {}
  friend QubitState apply(const Unitary&, const QubitState&);
  friend QubitState dephase(const QubitState&, double, double);
  friend QubitState scale_coherence(const QubitState&, double);
  friend QubitState depolarize(const QubitState&, double);

  Mat2 rho_;
};

// exp(-i (angle/2)(cos(phase) X + sin(phase) Y))
Unitary make_rotation(double axis_phase, double angle);

// Rotating-frame propagator of a rectangular pulse:
// exp(-i (t/2)(rabi cos(phase) X + rabi sin(phase) Y + detuning Z)).
// Rates in rad/s. Throws InvalidParameter for negative duration.
Unitary pulse_propagator(double rabi, double detuning, double axis_phase, double duration);

QubitState apply(const Unitary& u, const QubitState& s);

// Markovian z-dephasing: coherences scaled by exp(-duration / t_coh).
QubitState dephase(const QubitState& s, double duration, double t_coh);

// Multiplies the coherence by `factor` in [0, 1]; used for non-exponential
// envelopes such as the Gaussian spin-echo decay.
QubitState scale_coherence(const QubitState& s, double factor);

// Bloch vector shrinks by (1 - 2p): rho -> (1-2p) rho + 2p I/2.
QubitState depolarize(const QubitState& s, double p);

double prob_zero(const QubitState& s);

// (|tr(u^dagger v)|^2 + 2) / 6
double avg_gate_fidelity(const Unitary& u, const Unitary& v);

}  // namespace rbsim
