#pragma once

// Compilation of Clifford elements into rectangular microwave pulses.
//
// The hardware can only shift the microwave phase, so every pulse is an
// x- or y-axis rotation by a positive multiple of pi/2 (a -pi/2 rotation is
// played as 3pi/2). z rotations appear only as products of x/y pulses.

#include <iosfwd>
#include <string>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/qubit.hpp"

namespace rbsim {

enum class PulseAxis : int { X = 0, Y = 1 };

struct PulsePrimitive {
  PulseAxis axis = PulseAxis::X;
  int quarter_turns = 1;  // angle = quarter_turns * pi/2, in {1, 2, 3}
  double duration = 0.0;  // s

  double axis_phase() const { return axis == PulseAxis::X ? 0.0 : kPi / 2; }
  double angle() const { return quarter_turns * (kPi / 2); }
  Unitary ideal_unitary() const { return make_rotation(axis_phase(), angle()); }
};

struct PulseSchedule {
  std::vector<PulsePrimitive> pulses;
  double idle_time = 0.0;  // s, charged once after the pulses

  double pulse_time() const;
  double total_duration() const { return pulse_time() + idle_time; }
  // Product of the ideal pulse unitaries in playing order.
  Unitary ideal_unitary() const;
};

enum class DecompositionObjective {
  // Fewest pulses, then shortest total duration, then lexicographic word.
  MinPulseCount,
  // Shortest total duration, then fewest pulses, then lexicographic word.
  MinDuration,
};

// One pulse of a word, before timing is attached.
struct PulseLetter {
  PulseAxis axis = PulseAxis::X;
  int quarter_turns = 1;
  friend bool operator==(const PulseLetter&, const PulseLetter&) = default;
};

using PulseWord = std::vector<PulseLetter>;

class PulseTable {
 public:
  // Exhaustive search over x/y words of length <= 3 for every Clifford.
  static PulseTable build(const CliffordTable& cliffords,
                          DecompositionObjective objective = DecompositionObjective::MinPulseCount);

  const PulseWord& word(int clifford) const { return words_.at(static_cast<size_t>(clifford)); }
  int size() const { return static_cast<int>(words_.size()); }
  DecompositionObjective objective() const { return objective_; }

  // Throws InvalidParameter unless t_half_pi > 0 and idle >= 0.
  PulseSchedule decompose(int clifford, double t_half_pi, double idle = 0.0) const;

  // Total rotation of word g in units of pi/2.
  int quarter_turns(int clifford) const;

  // Columns: clifford,pulses,word,quarter_turns
  void write_csv(std::ostream& os) const;

 private:
  std::vector<PulseWord> words_;
  DecompositionObjective objective_ = DecompositionObjective::MinPulseCount;
};

// Uniform mean over all Cliffords of (pulse time + idle).
double mean_clifford_duration(const PulseTable& table, double t_half_pi, double idle);

std::string word_to_string(const PulseWord& word);

}  // namespace rbsim
