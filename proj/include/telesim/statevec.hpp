// Dense pure-state vector engine: tensor products, unitary application on
// qubit subsets, projective collapse, Born-rule sampling, and fidelity.
//
// Basis-index convention (fixed): little-endian, bit j of the amplitude
// index is the value of qubit j, qubit 0 being the least significant bit.
// In tensor products the first factor occupies the lowest qubit indices.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "telesim/rng.hpp"
#include "telesim/tolerances.hpp"

namespace telesim {

using Cplx = std::complex<double>;

// Square complex matrix, row major. Sized for small unitaries (2x2, 4x4,
// up to the measured subspace), not for whole-register operators.
struct CMatrix {
  int dim = 0;
  std::vector<Cplx> data;

  CMatrix() = default;
  explicit CMatrix(int d) : dim(d), data(static_cast<std::size_t>(d) * d) {}
  CMatrix(int d, std::vector<Cplx> entries);

  Cplx& at(int row, int col) { return data[static_cast<std::size_t>(row) * dim + col]; }
  const Cplx& at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * dim + col];
  }

  static CMatrix identity(int d);
  CMatrix adjoint() const;
  CMatrix mul(const CMatrix& rhs) const;

  // max_ij |(U†U - I)_ij|
  double unitarity_defect() const;
};

class PureState {
 public:
  PureState() = default;

  // |index> on num_qubits qubits.
  static PureState basis(int num_qubits, std::uint64_t index);

  // Takes ownership of the amplitude vector; length must be 2^num_qubits and
  // every entry finite. If normalized is true the squared norm must be 1
  // within kNormTol.
  static PureState from_amps(int num_qubits, std::vector<Cplx> amps, bool normalized);

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dim() const { return static_cast<std::uint64_t>(amps_.size()); }
  bool normalized() const { return normalized_; }

  const Cplx& amp(std::uint64_t i) const { return amps_[i]; }
  std::span<const Cplx> amps() const { return amps_; }

  double norm_sq() const;

  // Rescales to unit norm and sets the flag. Throws on (near-)zero vectors.
  PureState normalized_copy() const;

 private:
  PureState(int num_qubits, std::vector<Cplx> amps, bool normalized)
      : num_qubits_(num_qubits), amps_(std::move(amps)), normalized_(normalized) {}

  int num_qubits_ = 0;
  std::vector<Cplx> amps_;
  bool normalized_ = false;

  // Internal factory that skips validation; defined in statevec.cpp.
  friend class StateAccess;
};

// Unnormalized residual of a projection together with its Born weight
// (the squared norm of the residual).
struct UnnormalizedBranch {
  PureState state;   // normalized flag unset
  double weight = 0; // equals state.norm_sq()

  static UnnormalizedBranch make(int num_qubits, std::vector<Cplx> amps);
};

// --- Operations -----------------------------------------------------------

// Kronecker product of one or more states; the first factor gets the low
// bits. Throws on an empty list or if the combined register would exceed
// kMaxQubits.
PureState tensor(std::span<const PureState> states);
PureState tensor(std::initializer_list<PureState> states);

// Applies u (dim 2^t) to the ordered target qubits; bit j of u's row/column
// index is the value of qubit targets[j]. u must be unitary within
// kUnitarityTol; targets must be distinct and in range.
PureState apply_unitary(const PureState& state, const CMatrix& u,
                        std::span<const int> targets);

// Projects the target qubits onto outcome_vector (a normalized state over
// the targets, qubit j of it being targets[j]) and returns the unnormalized
// residual on the remaining qubits (kept in ascending index order) plus the
// Born weight. targets must be a strict subset of the register.
UnnormalizedBranch project(const PureState& state, std::span<const int> targets,
                           const PureState& outcome_vector);

// Born-rule sampling of a projective measurement in the given orthonormal
// basis (complete on the targets, pairwise orthonormal within kNormTol).
// Returns the outcome index and the normalized residual on the remaining
// qubits.
std::pair<int, PureState> sample_measurement(const PureState& state,
                                             std::span<const int> targets,
                                             std::span<const PureState> basis,
                                             RngStream& rng);

Cplx inner_product(const PureState& lhs, const PureState& rhs);

// |<lhs|rhs>|^2; both states must be normalized and of equal width.
double fidelity(const PureState& lhs, const PureState& rhs);

// Haar-ish random state: i.i.d. complex Gaussian amplitudes, normalized.
PureState random_state(int num_qubits, RngStream& rng);

// --- Serial reference kernels ----------------------------------------------
//
// Plain single-threaded loops with the same contracts as the operations
// above. The OpenMP kernels are tested against these, and the benchmark
// target compares the two.
namespace serial {

PureState tensor(std::span<const PureState> states);
PureState apply_unitary(const PureState& state, const CMatrix& u,
                        std::span<const int> targets);
UnnormalizedBranch project(const PureState& state, std::span<const int> targets,
                           const PureState& outcome_vector);
Cplx inner_product(const PureState& lhs, const PureState& rhs);

}  // namespace serial

}  // namespace telesim
