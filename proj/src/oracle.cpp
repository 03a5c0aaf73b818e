#include "telesim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace telesim {

// Everything in here is rebuilt from the raw (a, b, a', b') parameters so
// the enumeration shares no probability math with the protocol module.
namespace {

PureState real_two_qubit(double amp0, double amp1, double amp2, double amp3) {
  return PureState::from_amps(2, {Cplx{amp0}, Cplx{amp1}, Cplx{amp2}, Cplx{amp3}},
                              true);
}

// Eigenstates over (P_i, A_i) with P_i on qubit 0: amplitude order is
// |00>, |10>, |01>, |11> in particle labels.
std::array<PureState, 4> local_eigenbasis(double ap, double bp) {
  return {
      real_two_qubit(ap, 0.0, 0.0, bp),
      real_two_qubit(bp, 0.0, 0.0, -ap),
      real_two_qubit(0.0, ap, bp, 0.0),
      real_two_qubit(0.0, bp, -ap, 0.0),
  };
}

CMatrix local_pauli_x() {
  CMatrix x(2);
  x.at(0, 1) = x.at(1, 0) = 1.0;
  return x;
}

CMatrix local_pauli_z() {
  CMatrix z(2);
  z.at(0, 0) = 1.0;
  z.at(1, 1) = -1.0;
  return z;
}

struct LocalCorrection {
  bool pauli_x = false;
  bool pauli_z = false;
  bool scales_one_axis = false;
  CMatrix u_sim;
};

// Receiver correction for outcome m, derived from the published bank
// parameters alone.
LocalCorrection local_correction(int m, const SchmidtPair& ch,
                                 const MeasurementFamily& f) {
  const double x = (m == 1 || m == 3) ? ch.a() * f.a_prime() : ch.a() * f.b_prime();
  const double y = (m == 1 || m == 3) ? ch.b() * f.b_prime() : ch.b() * f.a_prime();
  LocalCorrection corr;
  corr.pauli_x = (m == 3 || m == 4);
  corr.pauli_z = (m == 2 || m == 4);
  const double u = corr.pauli_x ? y : x;
  const double v = corr.pauli_x ? x : y;
  double r = 1.0;
  if (u > v) {
    r = v / u;
  } else if (v > u && v > 0.0) {
    r = u / v;
    corr.scales_one_axis = true;
  }
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  CMatrix usim(4, {
                      Cplx{r}, Cplx{}, Cplx{s}, Cplx{},
                      Cplx{}, Cplx{1.0}, Cplx{}, Cplx{},
                      Cplx{}, Cplx{}, Cplx{}, Cplx{-1.0},
                      Cplx{s}, Cplx{}, Cplx{-r}, Cplx{},
                  });
  if (corr.scales_one_axis) {
    CMatrix x2(4);
    x2.at(0, 1) = x2.at(1, 0) = x2.at(2, 3) = x2.at(3, 2) = 1.0;
    usim = x2.mul(usim).mul(x2);
  }
  corr.u_sim = std::move(usim);
  return corr;
}

// |psi_in> |pairs> on 3k qubits, layout [P block, A block, B block].
PureState oracle_total_state(const MultiInput& q, const ChannelBank& ch) {
  const int k = ch.size();
  const std::uint64_t block = 1ull << k;
  std::vector<Cplx> amps(1ull << (3 * k));
  for (std::uint64_t p = 0; p < block; ++p) {
    for (std::uint64_t s = 0; s < block; ++s) {
      double w = 1.0;
      for (int i = 0; i < k; ++i) {
        w *= ((s >> i) & 1ull) ? ch.pair(i).b() : ch.pair(i).a();
      }
      amps[p | (s << k) | (s << (2 * k))] = q.state().amp(p) * w;
    }
  }
  return PureState::from_amps(3 * k, std::move(amps), true);
}

std::uint64_t flat_outcome_index(const std::vector<int>& ms) {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    idx |= static_cast<std::uint64_t>(ms[i] - 1) << (2 * i);
  }
  return idx;
}

}  // namespace

std::vector<EnumerationRecord> enumerate_outcomes(const MultiInput& q,
                                                  const ChannelBank& ch,
                                                  const MeasurementBank& mb) {
  if (ch.size() != mb.size()) {
    throw std::invalid_argument("channel and measurement banks differ in length");
  }
  const int k = ch.size();
  if (k > kMaxFullVectorPairs) {
    throw std::invalid_argument("enumeration supports at most 3 pairs");
  }
  if (q.num_qubits() != k) {
    throw std::invalid_argument("input width does not match the banks");
  }

  const PureState total = oracle_total_state(q, ch);

  std::vector<std::array<PureState, 4>> bases;
  std::vector<std::array<LocalCorrection, 4>> corrections;
  for (int i = 0; i < k; ++i) {
    bases.push_back(local_eigenbasis(mb.family(i).a_prime(), mb.family(i).b_prime()));
    corrections.push_back({local_correction(1, ch.pair(i), mb.family(i)),
                           local_correction(2, ch.pair(i), mb.family(i)),
                           local_correction(3, ch.pair(i), mb.family(i)),
                           local_correction(4, ch.pair(i), mb.family(i))});
  }

  std::vector<int> alice_targets;
  for (int i = 0; i < k; ++i) {
    alice_targets.push_back(i);
    alice_targets.push_back(k + i);
  }

  const PureState aux_zero_block = PureState::basis(k, 0);
  const PureState blank = PureState::basis(k, (1ull << k) - 1);  // |1...1>
  const CMatrix px = local_pauli_x();
  const CMatrix pz = local_pauli_z();

  const std::uint64_t outcome_count = 1ull << (2 * k);
  const std::uint64_t ancilla_count = 1ull << k;

  std::vector<EnumerationRecord> records;
  records.reserve(outcome_count * ancilla_count);

  // Lexicographic order of the outcome label (m_1 is the major digit).
  std::vector<int> ms(static_cast<std::size_t>(k), 1);
  for (std::uint64_t lex = 0; lex < outcome_count; ++lex) {
    for (int i = 0; i < k; ++i) {
      ms[static_cast<std::size_t>(i)] =
          static_cast<int>((lex >> (2 * (k - 1 - i))) & 3ull) + 1;
    }

    // Alice's joint projection.
    std::vector<PureState> factors;
    for (int i = 0; i < k; ++i) {
      factors.push_back(
          bases[static_cast<std::size_t>(i)][static_cast<std::size_t>(ms[static_cast<std::size_t>(i)] - 1)]);
    }
    const UnnormalizedBranch collapsed =
        project(total, alice_targets, tensor(factors));

    // Bob's corrections with all k ancillas attached at once; ancilla i is
    // qubit k+i of the working register.
    PureState work = tensor({collapsed.state, aux_zero_block});
    for (int i = 0; i < k; ++i) {
      const LocalCorrection& corr =
          corrections[static_cast<std::size_t>(i)][static_cast<std::size_t>(ms[static_cast<std::size_t>(i)] - 1)];
      const int data[] = {i};
      if (corr.pauli_z) work = apply_unitary(work, pz, data);
      if (corr.pauli_x) work = apply_unitary(work, px, data);
      const int pair_targets[] = {i, k + i};
      work = apply_unitary(work, corr.u_sim, pair_targets);
    }

    // Analytic ancilla enumeration: project every readout pattern.
    std::vector<int> aux_targets;
    for (int i = 0; i < k; ++i) aux_targets.push_back(k + i);
    for (std::uint64_t bits = 0; bits < ancilla_count; ++bits) {
      const UnnormalizedBranch leaf =
          project(work, aux_targets, PureState::basis(k, bits));

      EnumerationRecord rec;
      rec.alice_outcomes = ms;
      rec.ancilla_bits.resize(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        rec.ancilla_bits[static_cast<std::size_t>(i)] =
            static_cast<int>((bits >> i) & 1ull);
      }
      rec.probability = leaf.weight;
      if (leaf.weight > 0.0) {
        PureState cond = leaf.state.normalized_copy();
        // Blank-state canonicalization for failed pairs whose equalizer
        // scaled the one-axis.
        for (int i = 0; i < k; ++i) {
          const LocalCorrection& corr =
              corrections[static_cast<std::size_t>(i)][static_cast<std::size_t>(ms[static_cast<std::size_t>(i)] - 1)];
          if (((bits >> i) & 1ull) && corr.scales_one_axis) {
            const int data[] = {i};
            cond = apply_unitary(cond, px, data);
          }
        }
        rec.bob_state = cond;
      } else {
        rec.bob_state = blank;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<EnumerationRecord> enumerate_outcomes(const InputQubit& q,
                                                  const SchmidtPair& channel,
                                                  const MeasurementFamily& f) {
  return enumerate_outcomes(MultiInput::from_qubit(q),
                            ChannelBank({channel}), MeasurementBank({f}));
}

double oracle_success_total(const std::vector<EnumerationRecord>& records) {
  double total = 0.0;
  for (const EnumerationRecord& r : records) {
    if (std::all_of(r.ancilla_bits.begin(), r.ancilla_bits.end(),
                    [](int b) { return b == 0; })) {
      total += r.probability;
    }
  }
  return total;
}

double oracle_probability_total(const std::vector<EnumerationRecord>& records) {
  double total = 0.0;
  for (const EnumerationRecord& r : records) total += r.probability;
  return total;
}

namespace {

CrosscheckResult crosscheck_contributions(const std::vector<double>& expected,
                                          double expected_total,
                                          const std::vector<EnumerationRecord>& records,
                                          double tol) {
  CrosscheckResult res;
  res.branch_deltas.assign(expected.size(), 0.0);

  std::vector<double> oracle_contrib(expected.size(), 0.0);
  double oracle_total = 0.0;
  for (const EnumerationRecord& r : records) {
    const bool success = std::all_of(r.ancilla_bits.begin(), r.ancilla_bits.end(),
                                     [](int b) { return b == 0; });
    if (!success) continue;
    const std::uint64_t idx = flat_outcome_index(r.alice_outcomes);
    if (idx >= oracle_contrib.size()) {
      throw std::invalid_argument("records do not match the report configuration");
    }
    oracle_contrib[idx] += r.probability;
    oracle_total += r.probability;
  }

  for (std::size_t i = 0; i < expected.size(); ++i) {
    res.branch_deltas[i] = oracle_contrib[i] - expected[i];
    res.max_delta = std::max(res.max_delta, std::abs(res.branch_deltas[i]));
  }
  res.total_delta = oracle_total - expected_total;
  res.max_delta = std::max(res.max_delta, std::abs(res.total_delta));
  res.pass = res.max_delta <= tol;
  return res;
}

}  // namespace

CrosscheckResult crosscheck(const ProtocolReport& report,
                            const std::vector<EnumerationRecord>& records,
                            double tol) {
  if (records.size() != 8) {
    throw std::invalid_argument("records do not describe a single-pair run");
  }
  const std::vector<double> expected(report.contributions.begin(),
                                     report.contributions.end());
  return crosscheck_contributions(expected, report.total, records, tol);
}

CrosscheckResult crosscheck(const MultiReport& report,
                            const std::vector<EnumerationRecord>& records,
                            double tol) {
  const std::size_t want =
      report.contributions.size() * (1ull << report.num_pairs);
  if (records.size() != want) {
    throw std::invalid_argument("records do not match the report configuration");
  }
  return crosscheck_contributions(report.contributions, report.total, records, tol);
}

void dump_records_csv(const std::vector<EnumerationRecord>& records,
                      const PureState& input, std::ostream& out) {
  out << "outcome_label,ancilla_bits,probability,fidelity\n";
  char buf[64];
  for (const EnumerationRecord& r : records) {
    std::string label;
    for (int m : r.alice_outcomes) label += static_cast<char>('0' + m);
    std::string bits;
    for (int b : r.ancilla_bits) bits += static_cast<char>('0' + b);
    const double fid =
        r.probability > 0.0 ? fidelity(r.bob_state, input) : 0.0;
    std::snprintf(buf, sizeof(buf), "%.17g", r.probability);
    out << label << ',' << bits << ',' << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", fid);
    out << buf << '\n';
  }
}

}  // namespace telesim
