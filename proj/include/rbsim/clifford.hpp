#pragma once

// The 24-element single-qubit Clifford group, indexed canonically by the
// signed permutation each element induces on {X, Y, Z} under conjugation.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rbsim/qubit.hpp"

namespace rbsim {

inline constexpr int kCliffordCount = 24;

// Image of one Pauli axis: U sigma_axis U^dagger = sign * sigma_{image}.
struct SignedAxis {
  int8_t axis = 0;  // 0 = X, 1 = Y, 2 = Z
  int8_t sign = 1;  // +1 or -1

  // Ordering key: +X < -X < +Y < -Y < +Z < -Z.
  int key() const { return 2 * axis + (sign < 0 ? 1 : 0); }
  friend bool operator==(const SignedAxis&, const SignedAxis&) = default;
};

using PauliAction = std::array<SignedAxis, 3>;

// Action of the composite a∘b (b applied first).
PauliAction compose_actions(const PauliAction& a, const PauliAction& b);
PauliAction pauli_action_of(const Unitary& u, double tol = 1e-10);

struct CliffordElement {
  int index = 0;
  Unitary unitary;
  PauliAction pauli_action{};
};

class CliffordTable {
 public:
  // Closure of {R_x(pi/2), R_y(pi/2)} modulo global phase, sorted by action.
  // Throws std::logic_error if the closure does not have 24 elements.
  static CliffordTable generate();

  const std::vector<CliffordElement>& elements() const { return elements_; }
  const CliffordElement& element(int index) const { return elements_.at(static_cast<size_t>(index)); }
  int size() const { return static_cast<int>(elements_.size()); }

  // Index of U_a U_b (b acts first).
  int compose(int a, int b) const { return product_[static_cast<size_t>(a)][static_cast<size_t>(b)]; }
  int inverse(int g) const { return inverse_[static_cast<size_t>(g)]; }

  // Index whose Pauli action equals `action`, or -1.
  int find(const PauliAction& action) const;
  // Index of the element equal to `u` modulo phase, or -1.
  int find(const Unitary& u) const;

  // Recovery gate for a sequence applied in order seq[0], seq[1], ...
  // Uses only table lookups; O(size of seq).
  int recovery_gate(std::span<const int> sequence) const;

  void write_cayley_csv(std::ostream& os) const;

 private:
  std::vector<CliffordElement> elements_;
  std::array<std::array<int, kCliffordCount>, kCliffordCount> product_{};
  std::array<int, kCliffordCount> inverse_{};
};

}  // namespace rbsim
