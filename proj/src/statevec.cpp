#include "telesim/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace telesim {

namespace {

bool all_finite(std::span<const Cplx> amps) {
  for (const Cplx& a : amps) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  }
  return true;
}

double norm_sq_of(std::span<const Cplx> amps) {
  double s = 0.0;
  for (const Cplx& a : amps) s += std::norm(a);
  return s;
}

// Positions of the register bits not listed in targets, ascending.
std::vector<int> complement_of(int num_qubits, std::span<const int> targets) {
  std::vector<bool> used(static_cast<std::size_t>(num_qubits), false);
  for (int t : targets) used[static_cast<std::size_t>(t)] = true;
  std::vector<int> comp;
  comp.reserve(static_cast<std::size_t>(num_qubits) - targets.size());
  for (int q = 0; q < num_qubits; ++q) {
    if (!used[static_cast<std::size_t>(q)]) comp.push_back(q);
  }
  return comp;
}

// Scatters bit j of `bits` to register position positions[j].
inline std::uint64_t scatter(std::uint64_t bits, std::span<const int> positions) {
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    out |= ((bits >> j) & 1ull) << positions[j];
  }
  return out;
}

void check_targets(int num_qubits, std::span<const int> targets) {
  if (targets.empty()) throw std::invalid_argument("target list is empty");
  std::vector<bool> seen(static_cast<std::size_t>(num_qubits), false);
  for (int t : targets) {
    if (t < 0 || t >= num_qubits) {
      throw std::invalid_argument("target qubit " + std::to_string(t) + " out of range");
    }
    if (seen[static_cast<std::size_t>(t)]) {
      throw std::invalid_argument("duplicate target qubit " + std::to_string(t));
    }
    seen[static_cast<std::size_t>(t)] = true;
  }
}

void check_unitary(const CMatrix& u, std::span<const int> targets) {
  const std::uint64_t d = 1ull << targets.size();
  if (static_cast<std::uint64_t>(u.dim) != d) {
    throw std::invalid_argument("matrix dimension does not match target count");
  }
  if (u.unitarity_defect() > kUnitarityTol) {
    throw std::invalid_argument("matrix is not unitary within tolerance");
  }
}

void check_projection_args(const PureState& state, std::span<const int> targets,
                           const PureState& outcome_vector) {
  check_targets(state.num_qubits(), targets);
  if (targets.size() >= static_cast<std::size_t>(state.num_qubits())) {
    throw std::invalid_argument("targets must be a strict subset of the register");
  }
  if (outcome_vector.num_qubits() != static_cast<int>(targets.size())) {
    throw std::invalid_argument("outcome vector width does not match target count");
  }
  if (!outcome_vector.normalized()) {
    throw std::invalid_argument("outcome vector must be normalized");
  }
}

}  // namespace

// Internal factory: builds states whose invariants are guaranteed by the
// calling operation, skipping re-validation.
class StateAccess {
 public:
  static PureState make(int num_qubits, std::vector<Cplx> amps, bool normalized) {
    return PureState(num_qubits, std::move(amps), normalized);
  }
};

// --- CMatrix ---------------------------------------------------------------

CMatrix::CMatrix(int d, std::vector<Cplx> entries) : dim(d), data(std::move(entries)) {
  if (data.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
    throw std::invalid_argument("matrix entry count does not match dimension");
  }
}

CMatrix CMatrix::identity(int d) {
  CMatrix m(d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m.at(c, r) = std::conj(at(r, c));
  }
  return m;
}

CMatrix CMatrix::mul(const CMatrix& rhs) const {
  if (dim != rhs.dim) throw std::invalid_argument("matrix dimension mismatch");
  CMatrix m(dim);
  for (int r = 0; r < dim; ++r) {
    for (int k = 0; k < dim; ++k) {
      const Cplx v = at(r, k);
      if (v == Cplx{}) continue;
      for (int c = 0; c < dim; ++c) m.at(r, c) += v * rhs.at(k, c);
    }
  }
  return m;
}

double CMatrix::unitarity_defect() const {
  const CMatrix gram = adjoint().mul(*this);
  double worst = 0.0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      const Cplx want = (r == c) ? Cplx{1.0, 0.0} : Cplx{};
      worst = std::max(worst, std::abs(gram.at(r, c) - want));
    }
  }
  return worst;
}

// --- PureState -------------------------------------------------------------

PureState PureState::basis(int num_qubits, std::uint64_t index) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count out of range");
  }
  const std::uint64_t d = 1ull << num_qubits;
  if (index >= d) throw std::invalid_argument("basis index out of range");
  std::vector<Cplx> amps(d);
  amps[index] = 1.0;
  return PureState(num_qubits, std::move(amps), true);
}

PureState PureState::from_amps(int num_qubits, std::vector<Cplx> amps, bool normalized) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count out of range");
  }
  if (amps.size() != (1ull << num_qubits)) {
    throw std::invalid_argument("amplitude vector length is not 2^num_qubits");
  }
  if (!all_finite(amps)) throw std::invalid_argument("non-finite amplitude");
  if (normalized && std::abs(norm_sq_of(amps) - 1.0) > kNormTol) {
    throw std::invalid_argument("state marked normalized but squared norm is not 1");
  }
  return PureState(num_qubits, std::move(amps), normalized);
}

double PureState::norm_sq() const { return norm_sq_of(amps_); }

PureState PureState::normalized_copy() const {
  const double n2 = norm_sq();
  if (n2 <= 0.0 || !std::isfinite(n2)) {
    throw std::runtime_error("cannot normalize a zero-norm state");
  }
  const double inv = 1.0 / std::sqrt(n2);
  std::vector<Cplx> amps(amps_);
  for (Cplx& a : amps) a *= inv;
  return PureState(num_qubits_, std::move(amps), true);
}

UnnormalizedBranch UnnormalizedBranch::make(int num_qubits, std::vector<Cplx> amps) {
  const double w = norm_sq_of(amps);
  return UnnormalizedBranch{StateAccess::make(num_qubits, std::move(amps), false), w};
}

// --- tensor ------------------------------------------------------------------

namespace {

struct TensorPlan {
  int total_qubits = 0;
  std::vector<int> offsets;  // low-bit offset of each factor
  std::vector<std::uint64_t> masks;
  bool normalized = true;
};

TensorPlan plan_tensor(std::span<const PureState> states) {
  if (states.empty()) throw std::invalid_argument("tensor of an empty state list");
  TensorPlan plan;
  for (const PureState& s : states) {
    plan.offsets.push_back(plan.total_qubits);
    plan.masks.push_back(s.dim() - 1);
    plan.total_qubits += s.num_qubits();
    plan.normalized = plan.normalized && s.normalized();
  }
  if (plan.total_qubits > kMaxQubits) {
    throw std::invalid_argument("tensor product exceeds the maximum register size");
  }
  return plan;
}

inline Cplx tensor_amp(std::span<const PureState> states, const TensorPlan& plan,
                       std::uint64_t idx) {
  Cplx v = 1.0;
  for (std::size_t f = 0; f < states.size(); ++f) {
    v *= states[f].amp((idx >> plan.offsets[f]) & plan.masks[f]);
    if (v == Cplx{}) break;
  }
  return v;
}

}  // namespace

PureState tensor(std::span<const PureState> states) {
  const TensorPlan plan = plan_tensor(states);
  const std::uint64_t dim = 1ull << plan.total_qubits;
  std::vector<Cplx> out(dim);
#pragma omp parallel for if (dim >= kOmpMinDim)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(dim); ++i) {
    out[static_cast<std::size_t>(i)] =
        tensor_amp(states, plan, static_cast<std::uint64_t>(i));
  }
  return StateAccess::make(plan.total_qubits, std::move(out), plan.normalized);
}

PureState tensor(std::initializer_list<PureState> states) {
  return tensor(std::span<const PureState>(states.begin(), states.size()));
}

// --- apply_unitary -----------------------------------------------------------

PureState apply_unitary(const PureState& state, const CMatrix& u,
                        std::span<const int> targets) {
  check_targets(state.num_qubits(), targets);
  check_unitary(u, targets);

  const std::vector<int> comp = complement_of(state.num_qubits(), targets);
  const int d = u.dim;
  const std::uint64_t groups = 1ull << comp.size();
  std::vector<Cplx> out(state.dim());

#pragma omp parallel if (state.dim() >= kOmpMinDim)
  {
    std::vector<Cplx> in_local(static_cast<std::size_t>(d));
#pragma omp for
    for (std::int64_t g = 0; g < static_cast<std::int64_t>(groups); ++g) {
      const std::uint64_t base = scatter(static_cast<std::uint64_t>(g), comp);
      for (int l = 0; l < d; ++l) {
        in_local[static_cast<std::size_t>(l)] =
            state.amp(base | scatter(static_cast<std::uint64_t>(l), targets));
      }
      for (int r = 0; r < d; ++r) {
        Cplx acc = 0.0;
        for (int c = 0; c < d; ++c) acc += u.at(r, c) * in_local[static_cast<std::size_t>(c)];
        out[base | scatter(static_cast<std::uint64_t>(r), targets)] = acc;
      }
    }
  }
  return StateAccess::make(state.num_qubits(), std::move(out), state.normalized());
}

// --- project -----------------------------------------------------------------

UnnormalizedBranch project(const PureState& state, std::span<const int> targets,
                           const PureState& outcome_vector) {
  check_projection_args(state, targets, outcome_vector);

  const std::vector<int> comp = complement_of(state.num_qubits(), targets);
  const std::uint64_t sub_dim = outcome_vector.dim();
  const std::uint64_t res_dim = 1ull << comp.size();
  std::vector<Cplx> residual(res_dim);

#pragma omp parallel for if (res_dim >= kOmpMinDim)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(res_dim); ++r) {
    const std::uint64_t base = scatter(static_cast<std::uint64_t>(r), comp);
    Cplx acc = 0.0;
    for (std::uint64_t l = 0; l < sub_dim; ++l) {
      acc += std::conj(outcome_vector.amp(l)) * state.amp(base | scatter(l, targets));
    }
    residual[static_cast<std::size_t>(r)] = acc;
  }
  return UnnormalizedBranch::make(static_cast<int>(comp.size()), std::move(residual));
}

// --- sample_measurement --------------------------------------------------------

std::pair<int, PureState> sample_measurement(const PureState& state,
                                             std::span<const int> targets,
                                             std::span<const PureState> basis,
                                             RngStream& rng) {
  check_targets(state.num_qubits(), targets);
  if (!state.normalized()) {
    throw std::invalid_argument("sampling requires a normalized state");
  }
  const std::uint64_t sub_dim = 1ull << targets.size();
  if (basis.size() != sub_dim) {
    throw std::invalid_argument("basis does not span the measured subspace");
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(std::abs(inner_product(basis[i], basis[j])) - want) > kNormTol) {
        throw std::invalid_argument("measurement basis is not orthonormal");
      }
    }
  }

  std::vector<UnnormalizedBranch> branches;
  branches.reserve(basis.size());
  for (const PureState& b : basis) branches.push_back(project(state, targets, b));

  const double u = rng.next_unit();
  double cum = 0.0;
  int outcome = -1;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    cum += branches[i].weight;
    if (u < cum) {
      outcome = static_cast<int>(i);
      break;
    }
  }
  if (outcome < 0) {
    // u landed in the rounding slack past the last cumulative weight.
    for (std::size_t i = branches.size(); i-- > 0;) {
      if (branches[i].weight > 0.0) {
        outcome = static_cast<int>(i);
        break;
      }
    }
  }
  if (outcome < 0 || branches[static_cast<std::size_t>(outcome)].weight <= 0.0) {
    throw std::runtime_error("drew a zero-weight measurement outcome");
  }
  return {outcome, branches[static_cast<std::size_t>(outcome)].state.normalized_copy()};
}

// --- inner product / fidelity ---------------------------------------------------

Cplx inner_product(const PureState& lhs, const PureState& rhs) {
  if (lhs.num_qubits() != rhs.num_qubits()) {
    throw std::invalid_argument("state dimension mismatch");
  }
  const std::uint64_t dim = lhs.dim();
  double acc_re = 0.0;
  double acc_im = 0.0;
#pragma omp parallel for reduction(+ : acc_re, acc_im) if (dim >= kOmpMinDim)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(dim); ++i) {
    const Cplx term =
        std::conj(lhs.amp(static_cast<std::uint64_t>(i))) * rhs.amp(static_cast<std::uint64_t>(i));
    acc_re += term.real();
    acc_im += term.imag();
  }
  return {acc_re, acc_im};
}

double fidelity(const PureState& lhs, const PureState& rhs) {
  if (!lhs.normalized() || !rhs.normalized()) {
    throw std::invalid_argument("fidelity requires normalized states");
  }
  return std::norm(inner_product(lhs, rhs));
}

PureState random_state(int num_qubits, RngStream& rng) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("qubit count out of range");
  }
  std::vector<Cplx> amps(1ull << num_qubits);
  for (Cplx& a : amps) a = {rng.next_normal(), rng.next_normal()};
  return StateAccess::make(num_qubits, std::move(amps), false).normalized_copy();
}

// --- serial reference kernels -----------------------------------------------

namespace serial {

PureState tensor(std::span<const PureState> states) {
  const TensorPlan plan = plan_tensor(states);
  const std::uint64_t dim = 1ull << plan.total_qubits;
  std::vector<Cplx> out(dim);
  for (std::uint64_t i = 0; i < dim; ++i) out[i] = tensor_amp(states, plan, i);
  return StateAccess::make(plan.total_qubits, std::move(out), plan.normalized);
}

PureState apply_unitary(const PureState& state, const CMatrix& u,
                        std::span<const int> targets) {
  check_targets(state.num_qubits(), targets);
  check_unitary(u, targets);

  const std::vector<int> comp = complement_of(state.num_qubits(), targets);
  const int d = u.dim;
  const std::uint64_t groups = 1ull << comp.size();
  std::vector<Cplx> out(state.dim());
  std::vector<Cplx> in_local(static_cast<std::size_t>(d));
  for (std::uint64_t g = 0; g < groups; ++g) {
    const std::uint64_t base = scatter(g, comp);
    for (int l = 0; l < d; ++l) {
      in_local[static_cast<std::size_t>(l)] =
          state.amp(base | scatter(static_cast<std::uint64_t>(l), targets));
    }
    for (int r = 0; r < d; ++r) {
      Cplx acc = 0.0;
      for (int c = 0; c < d; ++c) acc += u.at(r, c) * in_local[static_cast<std::size_t>(c)];
      out[base | scatter(static_cast<std::uint64_t>(r), targets)] = acc;
    }
  }
  return StateAccess::make(state.num_qubits(), std::move(out), state.normalized());
}

UnnormalizedBranch project(const PureState& state, std::span<const int> targets,
                           const PureState& outcome_vector) {
  check_projection_args(state, targets, outcome_vector);

  const std::vector<int> comp = complement_of(state.num_qubits(), targets);
  const std::uint64_t sub_dim = outcome_vector.dim();
  const std::uint64_t res_dim = 1ull << comp.size();
  std::vector<Cplx> residual(res_dim);
  for (std::uint64_t r = 0; r < res_dim; ++r) {
    const std::uint64_t base = scatter(r, comp);
    Cplx acc = 0.0;
    for (std::uint64_t l = 0; l < sub_dim; ++l) {
      acc += std::conj(outcome_vector.amp(l)) * state.amp(base | scatter(l, targets));
    }
    residual[r] = acc;
  }
  return UnnormalizedBranch::make(static_cast<int>(comp.size()), std::move(residual));
}

Cplx inner_product(const PureState& lhs, const PureState& rhs) {
  if (lhs.num_qubits() != rhs.num_qubits()) {
    throw std::invalid_argument("state dimension mismatch");
  }
  Cplx acc = 0.0;
  for (std::uint64_t i = 0; i < lhs.dim(); ++i) {
    acc += std::conj(lhs.amp(i)) * rhs.amp(i);
  }
  return acc;
}

}  // namespace serial

}  // namespace telesim
