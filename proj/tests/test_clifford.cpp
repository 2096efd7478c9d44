#include <doctest.h>

#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "rbsim/clifford.hpp"
#include "rbsim/engine.hpp"

using namespace rbsim;
using oracle::M2;

namespace {

const CliffordTable& table() {
  static const CliffordTable t = CliffordTable::generate();
  return t;
}

M2 mat(int g) { return oracle::to_eigen(table().element(g).unitary.matrix()); }

int find_by_matrix(const M2& m) {
  int hit = -1;
  for (int g = 0; g < table().size(); ++g) {
    if (oracle::phase_free_distance(mat(g), m) < 1e-9) {
      REQUIRE(hit == -1);
      hit = g;
    }
  }
  return hit;
}

}  // namespace

TEST_CASE("group has 24 distinct elements with identity first") {
  CHECK(table().size() == kCliffordCount);
  CHECK(oracle::phase_free_distance(mat(0), M2::Identity()) < 1e-12);
  for (int a = 0; a < 24; ++a) {
    for (int b = a + 1; b < 24; ++b) CHECK(oracle::phase_free_distance(mat(a), mat(b)) > 1e-3);
  }
}

TEST_CASE("group matches an independent closure of the generators") {
  const M2 gx = oracle::propagator(1.0, 0.0, 0.0, kPi / 2);
  const M2 gy = oracle::propagator(1.0, 0.0, kPi / 2, kPi / 2);
  std::vector<M2> found{M2::Identity()};
  for (size_t head = 0; head < found.size(); ++head) {
    for (const M2& g : {gx, gy}) {
      const M2 c = g * found[head];
      bool seen = false;
      for (const M2& f : found) seen = seen || oracle::phase_free_distance(f, c) < 1e-9;
      if (!seen) found.push_back(c);
    }
  }
  CHECK(found.size() == 24);
  std::set<int> hits;
  for (const M2& f : found) hits.insert(find_by_matrix(f));
  CHECK(hits.size() == 24);
  CHECK(hits.count(-1) == 0);
}

TEST_CASE("closure, products and inverses against matrix multiplication") {
  for (int a = 0; a < 24; ++a) {
    for (int b = 0; b < 24; ++b) {
      const int c = find_by_matrix(mat(a) * mat(b));
      REQUIRE(c >= 0);
      CHECK(table().compose(a, b) == c);
    }
    const int inv = table().inverse(a);
    CHECK(oracle::phase_free_distance(mat(a) * mat(inv), M2::Identity()) < 1e-9);
  }
}

TEST_CASE("Pauli frames agree with conjugation") {
  const M2 paulis[3] = {oracle::sx(), oracle::sy(), oracle::sz()};
  for (const CliffordElement& e : table().elements()) {
    const M2 u = oracle::to_eigen(e.unitary.matrix());
    for (int axis = 0; axis < 3; ++axis) {
      const M2 image = u * paulis[axis] * u.adjoint();
      const SignedAxis& s = e.pauli_action[static_cast<size_t>(axis)];
      CHECK((image - static_cast<double>(s.sign) * paulis[s.axis]).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  for (int a = 0; a < 24; ++a) {
    for (int b = 0; b < 24; ++b) {
      const PauliAction ab = compose_actions(table().element(a).pauli_action, table().element(b).pauli_action);
      CHECK(table().find(ab) == table().compose(a, b));
    }
  }
}

TEST_CASE("recovery gate") {
  CHECK(table().recovery_gate({}) == 0);
  for (int g = 0; g < 24; ++g) {
    const std::vector<int> one{g};
    CHECK(table().recovery_gate(one) == table().inverse(g));
  }
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(0, 23);
  for (int len : {1, 10, 100, 1300}) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<int> seq(static_cast<size_t>(len));
      for (int& g : seq) g = pick(rng);
      M2 net = M2::Identity();
      for (int g : seq) net = mat(g) * net;
      const int rec = table().recovery_gate(seq);
      CHECK(oracle::phase_free_distance(mat(rec) * net, M2::Identity()) < 1e-9);
      // ideal survival from |0>
      const M2 total = mat(rec) * net;
      CHECK(std::norm(total(0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("sequence draws are uniform over the group") {
  const std::vector<int> draws = draw_sequence(2024, 0, 100000);
  std::vector<double> counts(24, 0.0);
  for (int g : draws) {
    REQUIRE(g >= 0);
    REQUIRE(g < 24);
    counts[static_cast<size_t>(g)] += 1.0;
  }
  const double expected = 100000.0 / 24.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // chi-squared, 23 dof, upper 0.001 quantile
  CHECK(chi2 < 49.728);
  CHECK(draw_sequence(2024, 0, 50) == draw_sequence(2024, 0, 50));
  CHECK(draw_sequence(2024, 0, 50) != draw_sequence(2024, 1, 50));
}

TEST_CASE("Cayley table export") {
  std::ostringstream out;
  table().write_cayley_csv(out);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("a,b0,", 0) == 0);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 24);
}
