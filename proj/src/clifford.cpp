#include "rbsim/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rbsim {

namespace {

const Mat2& pauli_matrix(int axis) {
  static const std::array<const Mat2*, 3> paulis{&pauli::X, &pauli::Y, &pauli::Z};
  return *paulis[static_cast<size_t>(axis)];
}

bool action_less(const PauliAction& a, const PauliAction& b) {
  for (size_t i = 0; i < 3; ++i) {
    if (a[i].key() != b[i].key()) return a[i].key() < b[i].key();
  }
  return false;
}

}  // namespace

PauliAction compose_actions(const PauliAction& a, const PauliAction& b) {
  // a(b(P)): b maps P to s Q, then a maps Q to s' R.
  PauliAction out{};
  for (size_t i = 0; i < 3; ++i) {
    const SignedAxis& mid = b[i];
    const SignedAxis& end = a[static_cast<size_t>(mid.axis)];
    out[i] = SignedAxis{end.axis, static_cast<int8_t>(mid.sign * end.sign)};
  }
  return out;
}

PauliAction pauli_action_of(const Unitary& u, double tol) {
  PauliAction out{};
  const Mat2& m = u.matrix();
  for (int i = 0; i < 3; ++i) {
    const Mat2 conj = m * pauli_matrix(i) * m.adjoint();
    bool found = false;
    for (int j = 0; j < 3 && !found; ++j) {
      // tr(sigma_j C)/2 is the sigma_j component.
      const double c = 0.5 * (pauli_matrix(j) * conj).trace().real();
      if (std::abs(std::abs(c) - 1.0) <= tol) {
        out[static_cast<size_t>(i)] = SignedAxis{static_cast<int8_t>(j), static_cast<int8_t>(c > 0 ? 1 : -1)};
        found = true;
      }
    }
    if (!found) throw std::logic_error("unitary is not a Clifford element");
  }
  return out;
}

CliffordTable CliffordTable::generate() {
  const std::array<Unitary, 2> generators{make_rotation(0.0, kPi / 2), make_rotation(kPi / 2, kPi / 2)};

  std::vector<Unitary> found{Unitary()};
  auto known = [&found](const Unitary& u) {
    return std::any_of(found.begin(), found.end(), [&u](const Unitary& v) { return v.equal_up_to_phase(u); });
  };
  // Breadth-first closure; 24 elements mod phase, so the cap only guards a tolerance bug.
  for (size_t head = 0; head < found.size(); ++head) {
    for (const Unitary& g : generators) {
      Unitary next = g * found[head];
      if (!known(next)) found.push_back(next);
    }
    if (found.size() > 64) break;
  }
  if (found.size() != kCliffordCount) {
    throw std::logic_error("Clifford closure produced " + std::to_string(found.size()) + " elements");
  }

  CliffordTable table;
  table.elements_.reserve(found.size());
  for (const Unitary& u : found) table.elements_.push_back(CliffordElement{0, u, pauli_action_of(u)});
  std::sort(table.elements_.begin(), table.elements_.end(),
            [](const CliffordElement& a, const CliffordElement& b) { return action_less(a.pauli_action, b.pauli_action); });
  for (int i = 0; i < kCliffordCount; ++i) table.elements_[static_cast<size_t>(i)].index = i;

  for (int a = 0; a < kCliffordCount; ++a) {
    for (int b = 0; b < kCliffordCount; ++b) {
      const int c = table.find(compose_actions(table.element(a).pauli_action, table.element(b).pauli_action));
      if (c < 0) throw std::logic_error("Clifford product left the group");
      table.product_[static_cast<size_t>(a)][static_cast<size_t>(b)] = c;
      if (c == 0) table.inverse_[static_cast<size_t>(a)] = b;
    }
  }
  return table;
}

int CliffordTable::find(const PauliAction& action) const {
  // Elements are sorted by action, so binary search would do; 24 entries make it moot.
  for (const CliffordElement& e : elements_) {
    if (e.pauli_action == action) return e.index;
  }
  return -1;
}

int CliffordTable::find(const Unitary& u) const {
  for (const CliffordElement& e : elements_) {
    if (e.unitary.equal_up_to_phase(u)) return e.index;
  }
  return -1;
}

int CliffordTable::recovery_gate(std::span<const int> sequence) const {
  int net = 0;
  for (int g : sequence) net = compose(g, net);
  return inverse(net);
}

void CliffordTable::write_cayley_csv(std::ostream& os) const {
  os << "a";
  for (int b = 0; b < kCliffordCount; ++b) os << ",b" << b;
  os << ",inverse\n";
  for (int a = 0; a < kCliffordCount; ++a) {
    os << a;
    for (int b = 0; b < kCliffordCount; ++b) os << ',' << compose(a, b);
    os << ',' << inverse(a) << '\n';
  }
}

}  // namespace rbsim
