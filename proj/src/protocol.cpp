#include "telesim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace telesim {

namespace {

// Branch magnitudes (x, y) for outcome m given channel (a, b) and family
// (a', b'): rows 1 and 3 carry (aa', bb'), rows 2 and 4 carry (ab', ba').
std::pair<double, double> branch_magnitudes(int m, const SchmidtPair& ch,
                                            const MeasurementFamily& f) {
  if (m == 1 || m == 3) return {ch.a() * f.a_prime(), ch.b() * f.b_prime()};
  return {ch.a() * f.b_prime(), ch.b() * f.a_prime()};
}

// c_ij is the coefficient of |i>_qubit0 |j>_qubit1, stored at index i + 2j.
PureState two_qubit(double c00, double c01, double c10, double c11) {
  return PureState::from_amps(2, {Cplx{c00}, Cplx{c10}, Cplx{c01}, Cplx{c11}}, true);
}

void check_branch_index(int m) {
  if (m < 1 || m > 4) throw std::invalid_argument("branch index must be 1..4");
}

}  // namespace

InputQubit::InputQubit(Cplx alpha, Cplx beta) : alpha_(alpha), beta_(beta) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (std::abs(n - 1.0) > kNormTol) {
    throw std::invalid_argument("input qubit must be normalized");
  }
}

InputQubit InputQubit::random(RngStream& rng) {
  const PureState s = random_state(1, rng);
  return InputQubit(s.amp(0), s.amp(1));
}

PureState InputQubit::state() const {
  return PureState::from_amps(1, {alpha_, beta_}, true);
}

std::array<PureState, 4> measurement_basis(const MeasurementFamily& f) {
  const double ap = f.a_prime();
  const double bp = f.b_prime();
  // |ij> with i on qubit 0 (particle 1), j on qubit 1 (particle 2).
  return {
      two_qubit(ap, 0.0, 0.0, bp),    // a'|00> + b'|11>
      two_qubit(bp, 0.0, 0.0, -ap),   // b'|00> - a'|11>
      two_qubit(0.0, bp, ap, 0.0),    // a'|10> + b'|01>
      two_qubit(0.0, -ap, bp, 0.0),   // b'|10> - a'|01>
  };
}

std::array<OutcomeBranch, 4> collapsed_branches(const InputQubit& q,
                                                const SchmidtPair& channel,
                                                const MeasurementFamily& f) {
  std::array<OutcomeBranch, 4> out;
  for (int m = 1; m <= 4; ++m) {
    const auto [x, y] = branch_magnitudes(m, channel, f);
    OutcomeBranch& br = out[static_cast<std::size_t>(m - 1)];
    br.index = m;
    br.x = x;
    br.y = y;
    br.flip_x = (m == 3 || m == 4);
    br.sign_z = (m == 2 || m == 4);
    const double pa = std::norm(q.alpha());
    const double pb = std::norm(q.beta());
    br.born_weight = br.flip_x ? (pb * x * x + pa * y * y) : (pa * x * x + pb * y * y);
  }
  return out;
}

CMatrix amplitude_equalizer(double r, ScaleTarget target) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("equalizer ratio must lie in [0, 1]");
  }
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  // Basis order |q=0,aux=0>, |1,0>, |0,1>, |1,1>.
  CMatrix u(4, {
                   Cplx{r}, Cplx{}, Cplx{s}, Cplx{},
                   Cplx{}, Cplx{1.0}, Cplx{}, Cplx{},
                   Cplx{}, Cplx{}, Cplx{}, Cplx{-1.0},
                   Cplx{s}, Cplx{}, Cplx{-r}, Cplx{},
               });
  if (target == ScaleTarget::zero_axis) return u;
  // Conjugate by X on the data qubit: swaps basis states 0<->1 and 2<->3.
  CMatrix x2(4);
  x2.at(0, 1) = x2.at(1, 0) = x2.at(2, 3) = x2.at(3, 2) = 1.0;
  return x2.mul(u).mul(x2);
}

CMatrix pauli_x_matrix() {
  CMatrix x(2);
  x.at(0, 1) = x.at(1, 0) = 1.0;
  return x;
}

CMatrix pauli_z_matrix() {
  CMatrix z(2);
  z.at(0, 0) = 1.0;
  z.at(1, 1) = -1.0;
  return z;
}

BobCorrection bob_correction(int m, const SchmidtPair& channel,
                             const MeasurementFamily& f) {
  check_branch_index(m);
  const auto [x, y] = branch_magnitudes(m, channel, f);
  const bool flip = (m == 3 || m == 4);

  BobCorrection corr;
  corr.branch_index = m;
  corr.pauli_x = flip;
  corr.pauli_z = (m == 2 || m == 4);

  // After the Pauli frame the collapsed state is alpha*u|0> + beta*v|1>.
  const double u = flip ? y : x;
  const double v = flip ? x : y;
  if (u == 0.0 && v == 0.0) {
    // Zero-probability outcome (only when b = b' = 0); keep the report
    // machinery well formed.
    corr.ratio = 1.0;
    corr.scale_target = ScaleTarget::zero_axis;
  } else if (u >= v) {
    corr.ratio = (u == v) ? 1.0 : v / u;
    corr.scale_target = ScaleTarget::zero_axis;
  } else {
    corr.ratio = u / v;
    corr.scale_target = ScaleTarget::one_axis;
  }
  corr.u_sim = amplitude_equalizer(corr.ratio, corr.scale_target);
  return corr;
}

BranchRun run_branch(const InputQubit& q, const OutcomeBranch& branch,
                     const BobCorrection& corr) {
  check_branch_index(branch.index);
  if (corr.branch_index != branch.index) {
    throw std::invalid_argument("correction does not belong to this branch");
  }

  // Unnormalized collapsed state of the receiver's qubit.
  const double sign = branch.sign_z ? -1.0 : 1.0;
  const Cplx c0 = (branch.flip_x ? q.beta() : q.alpha()) * branch.x;
  const Cplx c1 = (branch.flip_x ? q.alpha() : q.beta()) * branch.y * sign;

  std::vector<Cplx> amps{c0, c1, Cplx{}, Cplx{}};  // qubit 0 = data, qubit 1 = aux
  UnnormalizedBranch work = UnnormalizedBranch::make(2, std::move(amps));

  const int data[] = {0};
  const int both[] = {0, 1};
  const int aux[] = {1};
  PureState state = work.state;
  if (corr.pauli_z) state = apply_unitary(state, pauli_z_matrix(), data);
  if (corr.pauli_x) state = apply_unitary(state, pauli_x_matrix(), data);
  state = apply_unitary(state, corr.u_sim, both);

  // project() requires a normalized input only through the outcome vector;
  // the state here is the unnormalized branch, so weights are absolute
  // contributions to the trial probability.
  UnnormalizedBranch succ = project(state, aux, PureState::basis(1, 0));
  UnnormalizedBranch fail = project(state, aux, PureState::basis(1, 1));

  BranchRun run;
  run.contribution = succ.weight;
  run.success_possible = succ.weight > 0.0;
  run.success_state =
      run.success_possible ? succ.state.normalized_copy() : PureState::basis(1, 0);
  if (fail.weight > 0.0) {
    PureState f = fail.state.normalized_copy();
    if (corr.scale_target == ScaleTarget::one_axis) {
      f = apply_unitary(f, pauli_x_matrix(), data);
    }
    run.failure_state = f;
  } else {
    run.failure_state = PureState::basis(1, 1);
  }
  return run;
}

double success_probability(const SchmidtPair& channel, const MeasurementFamily& f) {
  const double c = std::min(channel.b(), f.b_prime());
  return 2.0 * c * c;
}

MatchReport matching_report(const SchmidtPair& channel, const MeasurementFamily& f,
                            double tol) {
  if (tol < 0.0) throw std::invalid_argument("matching tolerance must be >= 0");
  const double b = channel.b();
  const double bp = f.b_prime();
  MatchReport rep;
  rep.matched = std::abs(b - bp) <= tol;
  rep.limiting_side = rep.matched ? LimitingSide::matched
                      : (b < bp ? LimitingSide::channel : LimitingSide::measurement);
  rep.wasted = std::abs(channel_width(channel) - channel_width(f.coeffs()));
  return rep;
}

ProtocolReport teleport_exact(const InputQubit& q, const SchmidtPair& channel,
                              const MeasurementFamily& f) {
  const auto branches = collapsed_branches(q, channel, f);
  const PureState target = q.state();

  ProtocolReport rep;
  rep.total = 0.0;
  double min_fidelity = 1.0;
  bool any_success = false;
  for (const OutcomeBranch& br : branches) {
    const BobCorrection corr = bob_correction(br.index, channel, f);
    const BranchRun run = run_branch(q, br, corr);
    rep.contributions[static_cast<std::size_t>(br.index - 1)] = run.contribution;
    rep.total += run.contribution;
    if (run.success_possible) {
      any_success = true;
      min_fidelity = std::min(min_fidelity, fidelity(run.success_state, target));
    }
  }
  rep.success_fidelity = any_success ? min_fidelity : 1.0;
  rep.matched = matching_report(channel, f).matched;
  rep.failure_state_index = 1;
  return rep;
}

}  // namespace telesim
