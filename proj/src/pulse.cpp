#include "rbsim/pulse.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "rbsim/error.hpp"

namespace rbsim {

double PulseSchedule::pulse_time() const {
  double t = 0.0;
  for (const PulsePrimitive& p : pulses) t += p.duration;
  return t;
}

Unitary PulseSchedule::ideal_unitary() const {
  Unitary u;
  for (const PulsePrimitive& p : pulses) u = p.ideal_unitary() * u;
  return u;
}

namespace {

constexpr std::array<PulseLetter, 6> kAlphabet{{
    {PulseAxis::X, 1}, {PulseAxis::X, 2}, {PulseAxis::X, 3},
    {PulseAxis::Y, 1}, {PulseAxis::Y, 2}, {PulseAxis::Y, 3},
}};

int word_turns(const std::vector<int>& letters) {
  int t = 0;
  for (int l : letters) t += kAlphabet[static_cast<size_t>(l)].quarter_turns;
  return t;
}

using Cost = std::tuple<int, int, std::vector<int>>;

Cost cost_of(const std::vector<int>& letters, DecompositionObjective objective) {
  const int n = static_cast<int>(letters.size());
  const int turns = word_turns(letters);
  if (objective == DecompositionObjective::MinPulseCount) return {n, turns, letters};
  return {turns, n, letters};
}

}  // namespace

PulseTable PulseTable::build(const CliffordTable& cliffords, DecompositionObjective objective) {
  std::vector<std::optional<Cost>> best(static_cast<size_t>(cliffords.size()));

  std::vector<int> letters;
  auto visit = [&](auto&& self, const Unitary& u) -> void {
    const int g = cliffords.find(u);
    if (g < 0) throw std::logic_error("pulse word left the Clifford group");
    Cost c = cost_of(letters, objective);
    auto& slot = best[static_cast<size_t>(g)];
    if (!slot || c < *slot) slot = std::move(c);
    if (letters.size() == 3) return;
    for (size_t l = 0; l < kAlphabet.size(); ++l) {
      const PulseLetter& letter = kAlphabet[l];
      letters.push_back(static_cast<int>(l));
      const double phase = letter.axis == PulseAxis::X ? 0.0 : kPi / 2;
      self(self, make_rotation(phase, letter.quarter_turns * (kPi / 2)) * u);
      letters.pop_back();
    }
  };
  visit(visit, Unitary());

  PulseTable table;
  table.objective_ = objective;
  for (const auto& slot : best) {
    if (!slot) throw std::logic_error("Clifford element has no x/y word of length <= 3");
    PulseWord w;
    for (int l : std::get<2>(*slot)) w.push_back(kAlphabet[static_cast<size_t>(l)]);
    table.words_.push_back(std::move(w));
  }
  return table;
}

PulseSchedule PulseTable::decompose(int clifford, double t_half_pi, double idle) const {
  if (!(t_half_pi > 0.0)) throw InvalidParameter("t_half_pi must be positive");
  if (!(idle >= 0.0)) throw InvalidParameter("idle time must be non-negative");
  PulseSchedule s;
  s.idle_time = idle;
  for (const PulseLetter& l : word(clifford)) {
    s.pulses.push_back(PulsePrimitive{l.axis, l.quarter_turns, l.quarter_turns * t_half_pi});
  }
  return s;
}

int PulseTable::quarter_turns(int clifford) const {
  int t = 0;
  for (const PulseLetter& l : word(clifford)) t += l.quarter_turns;
  return t;
}

void PulseTable::write_csv(std::ostream& os) const {
  os << "clifford,pulses,word,quarter_turns\n";
  for (int g = 0; g < size(); ++g) {
    os << g << ',' << word(g).size() << ',' << word_to_string(word(g)) << ',' << quarter_turns(g) << '\n';
  }
}

double mean_clifford_duration(const PulseTable& table, double t_half_pi, double idle) {
  if (!(t_half_pi > 0.0) || !(idle >= 0.0)) throw InvalidParameter("durations must be positive");
  double sum = 0.0;
  for (int g = 0; g < table.size(); ++g) sum += table.decompose(g, t_half_pi, idle).total_duration();
  return sum / table.size();
}

std::string word_to_string(const PulseWord& word) {
  if (word.empty()) return "I";
  static const std::array<const char*, 4> angles{"", "90", "180", "270"};
  std::string out;
  for (const PulseLetter& l : word) {
    if (!out.empty()) out += ' ';
    out += l.axis == PulseAxis::X ? 'X' : 'Y';
    out += angles[static_cast<size_t>(l.quarter_turns)];
  }
  return out;
}

}  // namespace rbsim
