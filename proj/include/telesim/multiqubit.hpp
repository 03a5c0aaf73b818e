// k-qubit generalization: k independent channel pairs, k per-pair
// measurement families, per-pair corrections, and the product law
// P = 2^k * prod_i min(b_i, b_i')^2.
//
// Register layout for the full-vector path (3k qubits): qubits 0..k-1 are
// the input particles P_i, k..2k-1 the sender halves A_i, 2k..3k-1 the
// receiver halves B_i. Ancillas are appended past the live register on
// demand. A joint outcome (m_1..m_k) is flattened to the index
// sum_i (m_i - 1) * 4^(i-1).

#pragma once

#include <vector>

#include "telesim/protocol.hpp"

namespace telesim {

// Full-vector enumeration cap: 4^k outcomes over 3k qubits.
inline constexpr int kMaxFullVectorPairs = 3;
// Closed-form product-law cap.
inline constexpr int kMaxClosedFormPairs = 16;

class ChannelBank {
 public:
  explicit ChannelBank(std::vector<SchmidtPair> pairs);

  static ChannelBank from_b_squared(const std::vector<double>& b2);

  int size() const { return static_cast<int>(pairs_.size()); }
  const SchmidtPair& pair(int i) const { return pairs_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<SchmidtPair> pairs_;
};

class MeasurementBank {
 public:
  explicit MeasurementBank(std::vector<MeasurementFamily> families);

  static MeasurementBank from_b_squared(const std::vector<double>& b2);

  int size() const { return static_cast<int>(families_.size()); }
  const MeasurementFamily& family(int i) const {
    return families_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<MeasurementFamily> families_;
};

// Normalized k-qubit input, possibly entangled across pairs.
class MultiInput {
 public:
  // amps.size() must be a power of two >= 2; normalized within kNormTol.
  static MultiInput from_amps(std::vector<Cplx> amps);
  static MultiInput from_qubit(const InputQubit& q);
  static MultiInput random(int k, RngStream& rng);

  int num_qubits() const { return state_.num_qubits(); }
  const PureState& state() const { return state_; }

 private:
  explicit MultiInput(PureState state) : state_(std::move(state)) {}
  PureState state_;
};

struct MultiReport {
  int num_pairs = 0;
  std::vector<double> contributions;  // one per joint outcome, 4^k entries
  double total = 0.0;
  // min over positive-contribution outcomes of the reconstruction fidelity;
  // vacuously 1 when the total is 0.
  double reconstruction_fidelity = 1.0;
};

// Closed form 2^k * prod_i min(b_i, b_i')^2. Banks must have equal length,
// at most kMaxClosedFormPairs.
double multi_success_probability(const ChannelBank& ch, const MeasurementBank& mb);

// Full-vector enumeration of all 4^k joint outcomes with per-pair
// corrections; requires matching bank lengths, k <= kMaxFullVectorPairs,
// and a 2^k-dimensional input.
MultiReport multi_teleport_exact(const MultiInput& q, const ChannelBank& ch,
                                 const MeasurementBank& mb);

// The 3k-qubit product of the input with the k channel pairs, in the
// register layout documented above.
PureState build_total_state(const MultiInput& q, const ChannelBank& ch);

}  // namespace telesim
