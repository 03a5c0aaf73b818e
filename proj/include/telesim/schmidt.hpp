// Schmidt decomposition of two-qubit pure states and the entanglement
// measures derived from the coefficient pair.

#pragma once

#include <utility>

#include "telesim/statevec.hpp"

namespace telesim {

// Canonical Schmidt coefficients of a two-qubit pure state: a >= b >= 0,
// a^2 + b^2 = 1. Also parameterizes the measurement eigenstate family,
// where the pair is read as (a', b').
class SchmidtPair {
 public:
  // Validates the invariants (within kNormTol on the norm).
  SchmidtPair(double a, double b);

  // Pair with b^2 = b_squared, a = sqrt(1 - b_squared); b_squared must lie
  // in [0, 1/2].
  static SchmidtPair from_b_squared(double b_squared);

  static SchmidtPair bell() { return from_b_squared(0.5); }

  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_;
  double b_;
};

// Local rotations taking a two-qubit state to its Schmidt form:
// (u_left on qubit 0) ⊗ (u_right on qubit 1) maps the state to
// a|00> + b|11>.
struct LocalFrame {
  CMatrix u_left;
  CMatrix u_right;
};

// Decomposes a normalized two-qubit state. Phases are absorbed into the
// frame so the returned coefficients are real non-negative; singular
// vectors are ordered larger-coefficient-first with the first nonzero
// component of each left vector made real positive, which pins the frame
// in the degenerate a = b case.
std::pair<SchmidtPair, LocalFrame> schmidt_decompose(const PureState& state);

// Binary entropy of the Schmidt weights in bits: -a^2 log2 a^2 - b^2 log2 b^2,
// with 0 log 0 := 0. Ranges over [0, 1].
double entanglement_entropy(const SchmidtPair& p);

// 2 b^2: the maximal conclusive-teleportation probability the channel
// supports (equivalently, Alice's sending ability when the pair describes
// her measurement family).
double channel_width(const SchmidtPair& p);

// The two-qubit state a|00> + b|11>.
PureState channel_pair_state(const SchmidtPair& p);

}  // namespace telesim
