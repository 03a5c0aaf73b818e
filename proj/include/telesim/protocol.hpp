// Single-qubit conclusive teleportation through a partially entangled pure
// channel: the sender's two-qubit measurement eigenbasis, the collapsed
// branches at the receiver, the Pauli-frame plus amplitude-equalization
// correction, per-branch success contributions, and the matching law
// P = 2 min(b, b')^2.

#pragma once

#include <array>
#include <cstdint>

#include "telesim/schmidt.hpp"
#include "telesim/statevec.hpp"

namespace telesim {

// The unknown qubit alpha|0> + beta|1> to be sent.
class InputQubit {
 public:
  InputQubit(Cplx alpha, Cplx beta);

  static InputQubit random(RngStream& rng);

  Cplx alpha() const { return alpha_; }
  Cplx beta() const { return beta_; }
  PureState state() const;

 private:
  Cplx alpha_;
  Cplx beta_;
};

// Von-Neumann measurement family parameterized by (a', b'); b' = 1/sqrt(2)
// is the Bell measurement, b' = 0 the computational product basis.
class MeasurementFamily {
 public:
  explicit MeasurementFamily(SchmidtPair coeffs) : coeffs_(coeffs) {}

  static MeasurementFamily from_b_squared(double b_squared) {
    return MeasurementFamily(SchmidtPair::from_b_squared(b_squared));
  }
  static MeasurementFamily bell() { return from_b_squared(0.5); }

  const SchmidtPair& coeffs() const { return coeffs_; }
  double a_prime() const { return coeffs_.a(); }
  double b_prime() const { return coeffs_.b(); }

 private:
  SchmidtPair coeffs_;
};

// One of the sender's four measurement results, with the unnormalized
// collapsed coefficients of the receiver's qubit stored as non-negative
// magnitudes. The collapsed state is
//   alpha*x|0> + s*beta*y|1>   when !flip_x
//   beta*x|0>  + s*alpha*y|1>  when flip_x
// with s = -1 iff sign_z.
struct OutcomeBranch {
  int index = 0;   // 1..4
  double x = 0.0;
  double y = 0.0;
  bool flip_x = false;  // true for branches 3, 4
  bool sign_z = false;  // true for branches 2, 4
  double born_weight = 0.0;
};

// Which axis the amplitude equalizer attenuates (the larger one, measured
// after the Pauli frame is undone).
enum class ScaleTarget { zero_axis, one_axis };

// The receiver's conditional correction for one branch: Pauli frame bits
// plus the 4x4 collective unitary on (qubit, ancilla).
struct BobCorrection {
  int branch_index = 0;
  bool pauli_x = false;
  bool pauli_z = false;
  double ratio = 1.0;  // min(x,y)/max(x,y); 1 when x == y
  ScaleTarget scale_target = ScaleTarget::zero_axis;
  CMatrix u_sim;
};

// Outcome of running one branch through the correction pipeline.
struct BranchRun {
  double contribution = 0.0;  // success weight, equals min(x,y)^2
  PureState success_state;    // conditional state on ancilla 0
  PureState failure_state;    // conditional state on ancilla 1, canonicalized
  bool success_possible = false;  // contribution > 0
};

struct ProtocolReport {
  std::array<double, 4> contributions{};  // p_m, indexed by m-1
  double total = 0.0;                     // P = sum p_m
  bool matched = false;
  // min over branches with p_m > 0 of the reconstruction fidelity;
  // vacuously 1 when every contribution is 0.
  double success_fidelity = 1.0;
  std::uint64_t failure_state_index = 1;  // canonical blank state |1>
};

enum class LimitingSide { channel, measurement, matched };

struct MatchReport {
  bool matched = false;
  LimitingSide limiting_side = LimitingSide::matched;
  double wasted = 0.0;  // |2b^2 - 2b'^2|
};

// The four measurement eigenstates over (particle 1, particle 2) = (qubit 0,
// qubit 1), in order:
//   a'|00> + b'|11>,  b'|00> - a'|11>,  a'|10> + b'|01>,  b'|10> - a'|01>.
std::array<PureState, 4> measurement_basis(const MeasurementFamily& f);

// Collapsed coefficients of the receiver's qubit for all four outcomes.
std::array<OutcomeBranch, 4> collapsed_branches(const InputQubit& q,
                                                const SchmidtPair& channel,
                                                const MeasurementFamily& f);

// Correction for branch m (1..4). Depends only on public parameters, never
// on the unknown input. For the zero-probability corner x = y = 0 (possible
// only when b = b' = 0) a well-formed identity-ratio correction is returned
// so degenerate sweeps keep running.
BobCorrection bob_correction(int m, const SchmidtPair& channel,
                             const MeasurementFamily& f);

// Applies the pipeline (Pauli-Z, Pauli-X, amplitude equalizer with a fresh
// |0> ancilla, ancilla readout) to the given branch. The failure state is
// canonicalized to |1> by a classically conditioned flip when the equalizer
// scaled the one-axis.
BranchRun run_branch(const InputQubit& q, const OutcomeBranch& branch,
                     const BobCorrection& corr);

// Closed form P = 2 min(b, b')^2, independent of the input qubit.
double success_probability(const SchmidtPair& channel, const MeasurementFamily& f);

MatchReport matching_report(const SchmidtPair& channel, const MeasurementFamily& f,
                            double tol = kMatchTol);

// Full protocol over all four branches.
ProtocolReport teleport_exact(const InputQubit& q, const SchmidtPair& channel,
                              const MeasurementFamily& f);

// The 4x4 amplitude-equalization unitary with ratio r on (qubit, ancilla).
CMatrix amplitude_equalizer(double r, ScaleTarget target);

// Single-qubit Pauli matrices.
CMatrix pauli_x_matrix();
CMatrix pauli_z_matrix();

}  // namespace telesim
