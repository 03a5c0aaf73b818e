#include "telesim/multiqubit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace telesim {

namespace {

void check_bank_sizes(const ChannelBank& ch, const MeasurementBank& mb) {
  if (ch.size() != mb.size()) {
    throw std::invalid_argument("channel and measurement banks differ in length");
  }
}

}  // namespace

ChannelBank::ChannelBank(std::vector<SchmidtPair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty() || pairs_.size() > static_cast<std::size_t>(kMaxClosedFormPairs)) {
    throw std::invalid_argument("channel bank length must be 1..16");
  }
}

ChannelBank ChannelBank::from_b_squared(const std::vector<double>& b2) {
  std::vector<SchmidtPair> pairs;
  pairs.reserve(b2.size());
  for (double v : b2) pairs.push_back(SchmidtPair::from_b_squared(v));
  return ChannelBank(std::move(pairs));
}

MeasurementBank::MeasurementBank(std::vector<MeasurementFamily> families)
    : families_(std::move(families)) {
  if (families_.empty() ||
      families_.size() > static_cast<std::size_t>(kMaxClosedFormPairs)) {
    throw std::invalid_argument("measurement bank length must be 1..16");
  }
}

MeasurementBank MeasurementBank::from_b_squared(const std::vector<double>& b2) {
  std::vector<MeasurementFamily> families;
  families.reserve(b2.size());
  for (double v : b2) families.push_back(MeasurementFamily::from_b_squared(v));
  return MeasurementBank(std::move(families));
}

MultiInput MultiInput::from_amps(std::vector<Cplx> amps) {
  if (amps.size() < 2 || !std::has_single_bit(amps.size())) {
    throw std::invalid_argument("input amplitude count must be a power of two >= 2");
  }
  const int k = std::countr_zero(amps.size());
  return MultiInput(PureState::from_amps(k, std::move(amps), true));
}

MultiInput MultiInput::from_qubit(const InputQubit& q) {
  return MultiInput(q.state());
}

MultiInput MultiInput::random(int k, RngStream& rng) {
  return MultiInput(random_state(k, rng));
}

double multi_success_probability(const ChannelBank& ch, const MeasurementBank& mb) {
  check_bank_sizes(ch, mb);
  double p = 1.0;
  for (int i = 0; i < ch.size(); ++i) {
    const double c = std::min(ch.pair(i).b(), mb.family(i).b_prime());
    p *= 2.0 * c * c;
  }
  return p;
}

PureState build_total_state(const MultiInput& q, const ChannelBank& ch) {
  const int k = ch.size();
  if (q.num_qubits() != k) {
    throw std::invalid_argument("input width does not match the channel bank");
  }
  if (3 * k > kMaxQubits) {
    throw std::invalid_argument("register would exceed the maximum size");
  }
  const std::uint64_t input_dim = 1ull << k;
  std::vector<Cplx> amps(1ull << (3 * k));
  // Channel pairs force A_i == B_i; the nonzero entries are indexed by the
  // input bits p and the shared pair bits s.
  for (std::uint64_t p = 0; p < input_dim; ++p) {
    const Cplx in_amp = q.state().amp(p);
    if (in_amp == Cplx{}) continue;
    for (std::uint64_t s = 0; s < input_dim; ++s) {
      double w = 1.0;
      for (int i = 0; i < k; ++i) {
        w *= ((s >> i) & 1ull) ? ch.pair(i).b() : ch.pair(i).a();
      }
      if (w == 0.0) continue;
      amps[p | (s << k) | (s << (2 * k))] = in_amp * w;
    }
  }
  return PureState::from_amps(3 * k, std::move(amps), true);
}

MultiReport multi_teleport_exact(const MultiInput& q, const ChannelBank& ch,
                                 const MeasurementBank& mb) {
  check_bank_sizes(ch, mb);
  const int k = ch.size();
  if (k > kMaxFullVectorPairs) {
    throw std::invalid_argument("full-vector path supports at most 3 pairs");
  }

  const PureState total = build_total_state(q, ch);

  // Per-pair measurement eigenbases and projection targets (P_i, A_i).
  std::vector<std::array<PureState, 4>> bases;
  bases.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) bases.push_back(measurement_basis(mb.family(i)));

  std::vector<int> targets;
  for (int i = 0; i < k; ++i) {
    targets.push_back(i);      // P_i
    targets.push_back(k + i);  // A_i
  }

  const std::uint64_t outcome_count = 1ull << (2 * k);  // 4^k
  MultiReport rep;
  rep.num_pairs = k;
  rep.contributions.assign(outcome_count, 0.0);
  double min_fidelity = 1.0;
  bool any_success = false;

  const PureState want = q.state();
  const CMatrix px = pauli_x_matrix();
  const CMatrix pz = pauli_z_matrix();
  const PureState aux0 = PureState::basis(1, 0);

  for (std::uint64_t oc = 0; oc < outcome_count; ++oc) {
    // Joint outcome vector: pair i's eigenstate occupies qubits (2i, 2i+1)
    // of the outcome register, matching the (P_i, A_i) order in targets.
    std::vector<PureState> factors;
    factors.reserve(static_cast<std::size_t>(k));
    std::vector<int> ms(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const int m = static_cast<int>((oc >> (2 * i)) & 3ull) + 1;
      ms[static_cast<std::size_t>(i)] = m;
      factors.push_back(bases[static_cast<std::size_t>(i)][static_cast<std::size_t>(m - 1)]);
    }
    const PureState outcome_vec = tensor(factors);
    UnnormalizedBranch collapsed = project(total, targets, outcome_vec);
    if (collapsed.weight <= 0.0) continue;

    // Receiver side: B_i is now qubit i of the residual. Pauli frame, then
    // one ancilla per pair, equalize, keep the ancilla-0 component.
    PureState work = collapsed.state;
    for (int i = 0; i < k; ++i) {
      const BobCorrection corr = bob_correction(ms[static_cast<std::size_t>(i)],
                                                ch.pair(i), mb.family(i));
      const int data[] = {i};
      if (corr.pauli_z) work = apply_unitary(work, pz, data);
      if (corr.pauli_x) work = apply_unitary(work, px, data);
      work = tensor({work, aux0});
      const int pair_targets[] = {i, k};
      work = apply_unitary(work, corr.u_sim, pair_targets);
      const int aux_target[] = {k};
      work = project(work, aux_target, aux0).state;
    }

    const double contribution = work.norm_sq();
    rep.contributions[oc] = contribution;
    rep.total += contribution;
    if (contribution > 0.0) {
      any_success = true;
      min_fidelity = std::min(min_fidelity, fidelity(work.normalized_copy(), want));
    }
  }
  rep.reconstruction_fidelity = any_success ? min_fidelity : 1.0;
  return rep;
}

}  // namespace telesim
