// Independent brute-force verifier. Enumerates every joint measurement and
// ancilla outcome directly from state vectors, rebuilding the eigenbases
// and correction unitaries locally from the bank parameters; none of the
// closed-form probability operations are used, so an agreement between the
// two routes is meaningful.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "telesim/multiqubit.hpp"

namespace telesim {

struct EnumerationRecord {
  std::vector<int> alice_outcomes;  // m_i in 1..4, one per pair
  std::vector<int> ancilla_bits;    // 0 = success, 1 = failure, one per pair
  double probability = 0.0;         // joint probability of this record
  PureState bob_state;              // conditional state on the receiver block;
                                    // the canonical blank state for
                                    // zero-probability records
};

// All 4^k * 2^k records in lexicographic order of (alice_outcomes,
// ancilla_bits). Requires k <= kMaxFullVectorPairs.
std::vector<EnumerationRecord> enumerate_outcomes(const MultiInput& q,
                                                  const ChannelBank& ch,
                                                  const MeasurementBank& mb);

// Single-pair convenience wrapper.
std::vector<EnumerationRecord> enumerate_outcomes(const InputQubit& q,
                                                  const SchmidtPair& channel,
                                                  const MeasurementFamily& f);

// Sum of all-ancillas-zero record probabilities.
double oracle_success_total(const std::vector<EnumerationRecord>& records);

// Sum over every record (should be 1 for a normalized input).
double oracle_probability_total(const std::vector<EnumerationRecord>& records);

struct CrosscheckResult {
  bool pass = false;
  double max_delta = 0.0;
  std::vector<double> branch_deltas;  // per outcome, flattened base-4 index
  double total_delta = 0.0;
};

// Compares per-branch contributions and the total against the success
// records. The report and records must describe the same configuration.
CrosscheckResult crosscheck(const ProtocolReport& report,
                            const std::vector<EnumerationRecord>& records,
                            double tol);
CrosscheckResult crosscheck(const MultiReport& report,
                            const std::vector<EnumerationRecord>& records,
                            double tol);

// CSV dump, columns: outcome_label, ancilla_bits, probability, fidelity
// (fidelity of the conditional state with the given input). Outcome labels
// are the digits m_1..m_k, ancilla bits likewise.
void dump_records_csv(const std::vector<EnumerationRecord>& records,
                      const PureState& input, std::ostream& out);

}  // namespace telesim
