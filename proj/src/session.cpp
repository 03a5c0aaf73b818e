#include "telesim/session.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace telesim {

// --- wire encoding -----------------------------------------------------------

std::string encode_message(const WireMessage& msg) {
  nlohmann::json j;
  if (const auto* out = std::get_if<OutcomeMessage>(&msg)) {
    j["type"] = "outcome";
    j["pair"] = out->pair;
    j["m"] = out->m;
  } else {
    j["type"] = "report";
    j["success"] = std::get<SessionReportMessage>(msg).success;
  }
  return j.dump();
}

WireMessage decode_message(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
    throw TransportError("malformed message: " + std::string(line));
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "outcome") {
    if (!j.contains("pair") || !j.contains("m") || !j["pair"].is_number_integer() ||
        !j["m"].is_number_integer()) {
      throw TransportError("malformed outcome message: " + std::string(line));
    }
    OutcomeMessage out{j["pair"].get<int>(), j["m"].get<int>()};
    if (out.m < 1 || out.m > 4 || out.pair < 0) {
      throw TransportError("outcome message fields out of range");
    }
    return out;
  }
  if (type == "report") {
    if (!j.contains("success") || !j["success"].is_boolean()) {
      throw TransportError("malformed report message: " + std::string(line));
    }
    return SessionReportMessage{j["success"].get<bool>()};
  }
  throw TransportError("unknown message type: " + type);
}

// --- duplex channel -----------------------------------------------------------

void DuplexChannel::Endpoint::send(const WireMessage& msg) {
  if (owner_->closed_) throw TransportError("send on closed channel");
  (is_alice_ ? owner_->to_bob_ : owner_->to_alice_).push_back(encode_message(msg));
}

WireMessage DuplexChannel::Endpoint::recv() {
  if (owner_->closed_) throw TransportError("recv on closed channel");
  auto& queue = is_alice_ ? owner_->to_alice_ : owner_->to_bob_;
  if (queue.empty()) throw TransportError("recv with no message in flight");
  const std::string line = std::move(queue.front());
  queue.pop_front();
  return decode_message(line);
}

void DuplexChannel::close() {
  closed_ = true;
  to_bob_.clear();
  to_alice_.clear();
}

// --- shared register -----------------------------------------------------------

QubitRegister::QubitRegister(PureState state) : state_(std::move(state)) {
  labels_.resize(static_cast<std::size_t>(state_.num_qubits()));
  for (std::size_t i = 0; i < labels_.size(); ++i) labels_[i] = static_cast<int>(i);
}

std::vector<int> QubitRegister::positions(const std::vector<int>& labels) const {
  std::vector<int> pos;
  pos.reserve(labels.size());
  for (int label : labels) {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
      throw std::invalid_argument("qubit label not present in the register");
    }
    pos.push_back(static_cast<int>(it - labels_.begin()));
  }
  return pos;
}

void QubitRegister::apply(const CMatrix& u, const std::vector<int>& labels) {
  state_ = apply_unitary(state_, u, positions(labels));
}

int QubitRegister::measure(const std::vector<int>& labels,
                           std::span<const PureState> basis, RngStream& rng) {
  const std::vector<int> pos = positions(labels);
  auto [outcome, collapsed] = sample_measurement(state_, pos, basis, rng);
  state_ = std::move(collapsed);

  // Retire the measured labels, preserving the order of the rest (matching
  // the residual's ascending-position convention).
  std::vector<int> keep;
  keep.reserve(labels_.size() - pos.size());
  for (std::size_t p = 0; p < labels_.size(); ++p) {
    if (std::find(pos.begin(), pos.end(), static_cast<int>(p)) == pos.end()) {
      keep.push_back(labels_[p]);
    }
  }
  labels_ = std::move(keep);
  return outcome;
}

void QubitRegister::append(const PureState& extra, const std::vector<int>& new_labels) {
  if (extra.num_qubits() != static_cast<int>(new_labels.size())) {
    throw std::invalid_argument("label count does not match the appended state");
  }
  for (int label : new_labels) {
    if (std::find(labels_.begin(), labels_.end(), label) != labels_.end()) {
      throw std::invalid_argument("appended label already in use");
    }
  }
  state_ = tensor({state_, extra});
  labels_.insert(labels_.end(), new_labels.begin(), new_labels.end());
}

// --- machines -------------------------------------------------------------------

namespace {

// Label scheme for a k-pair session over the [P, A, B] layout.
int label_p(int i) { return i; }
int label_a(int k, int i) { return k + i; }
int label_b(int k, int i) { return 2 * k + i; }
int label_aux(int k) { return 3 * k; }

}  // namespace

AliceMachine::AliceMachine(QubitRegister& reg, const MeasurementBank& mb)
    : reg_(reg), mb_(mb) {}

void AliceMachine::run(DuplexChannel::Endpoint& out, RngStream& rng) {
  if (state_ != State::ready) throw std::logic_error("Alice already ran");
  const int k = mb_.size();
  outcomes_.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto basis = measurement_basis(mb_.family(i));
    const int outcome = reg_.measure({label_p(i), label_a(k, i)}, basis, rng);
    outcomes_.push_back(outcome + 1);
  }
  state_ = State::measured;
  for (int i = 0; i < k; ++i) {
    out.send(OutcomeMessage{i, outcomes_[static_cast<std::size_t>(i)]});
  }
  state_ = State::done;
}

BobMachine::BobMachine(QubitRegister& reg, const ChannelBank& ch,
                       const MeasurementBank& mb)
    : reg_(reg), ch_(ch), mb_(mb) {}

bool BobMachine::run(DuplexChannel::Endpoint& io, RngStream& rng) {
  if (state_ != State::waiting) throw std::logic_error("Bob already ran");
  const int k = ch_.size();

  // Corrections start only once every outcome message has arrived.
  std::vector<int> ms(static_cast<std::size_t>(k), 0);
  for (int received = 0; received < k; ++received) {
    const WireMessage msg = io.recv();
    const auto* out = std::get_if<OutcomeMessage>(&msg);
    if (out == nullptr) throw TransportError("unexpected message before outcomes");
    if (out->pair >= k || ms[static_cast<std::size_t>(out->pair)] != 0) {
      throw TransportError("duplicate or out-of-range pair index");
    }
    ms[static_cast<std::size_t>(out->pair)] = out->m;
  }

  const std::array<PureState, 2> readout = {PureState::basis(1, 0),
                                            PureState::basis(1, 1)};
  bool all_zero = true;
  for (int i = 0; i < k; ++i) {
    const BobCorrection corr =
        bob_correction(ms[static_cast<std::size_t>(i)], ch_.pair(i), mb_.family(i));
    const int b = label_b(k, i);
    const int aux = label_aux(k);
    if (corr.pauli_z) reg_.apply(pauli_z_matrix(), {b});
    if (corr.pauli_x) reg_.apply(pauli_x_matrix(), {b});
    reg_.append(PureState::basis(1, 0), {aux});
    reg_.apply(corr.u_sim, {b, aux});
    const int bit = reg_.measure({aux}, readout, rng);
    if (bit == 1) {
      all_zero = false;
      if (corr.scale_target == ScaleTarget::one_axis) {
        reg_.apply(pauli_x_matrix(), {b});
      }
    }
  }
  state_ = State::corrected;

  io.send(SessionReportMessage{all_zero});
  state_ = State::reported;
  return all_zero;
}

// --- sessions ---------------------------------------------------------------------

TrialRecord run_session(const MultiInput& q, const ChannelBank& ch,
                        const MeasurementBank& mb, std::uint64_t base_seed,
                        std::uint64_t trial) {
  if (ch.size() != mb.size()) {
    throw std::invalid_argument("channel and measurement banks differ in length");
  }

  RngStream rng(base_seed, trial);
  QubitRegister reg(build_total_state(q, ch));
  DuplexChannel channel;
  AliceMachine alice(reg, mb);
  BobMachine bob(reg, ch, mb);

  alice.run(channel.alice_end(), rng);
  bob.run(channel.bob_end(), rng);

  // Alice learns the verdict from Bob's report line.
  const WireMessage verdict = channel.alice_end().recv();
  const auto* rep = std::get_if<SessionReportMessage>(&verdict);
  if (rep == nullptr) throw TransportError("expected a report message");

  TrialRecord rec;
  rec.trial_id = trial;
  rec.outcomes = alice.outcomes();
  rec.success = rep->success;
  rec.fidelity = fidelity(reg.state(), q.state());
  return rec;
}

TrialRecord run_session(const InputQubit& q, const SchmidtPair& channel,
                        const MeasurementFamily& f, std::uint64_t base_seed,
                        std::uint64_t trial) {
  return run_session(MultiInput::from_qubit(q), ChannelBank({channel}),
                     MeasurementBank({f}), base_seed, trial);
}

MonteCarloResult monte_carlo(const MultiInput& q, const ChannelBank& ch,
                             const MeasurementBank& mb, std::uint64_t n_trials,
                             std::uint64_t base_seed) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  const int k = ch.size();
  const std::uint64_t outcome_count = 1ull << (2 * k);

  // Per-trial results land in preallocated slots; aggregation below is a
  // fixed-order pass, so thread count cannot change the result.
  std::vector<std::uint32_t> outcome_of(n_trials, 0);
  std::vector<std::uint8_t> success_of(n_trials, 0);
  std::vector<double> fidelity_of(n_trials, 1.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_trials); ++t) {
    const TrialRecord rec =
        run_session(q, ch, mb, base_seed, static_cast<std::uint64_t>(t));
    std::uint32_t idx = 0;
    for (std::size_t i = 0; i < rec.outcomes.size(); ++i) {
      idx |= static_cast<std::uint32_t>(rec.outcomes[i] - 1) << (2 * i);
    }
    outcome_of[static_cast<std::size_t>(t)] = idx;
    success_of[static_cast<std::size_t>(t)] = rec.success ? 1 : 0;
    fidelity_of[static_cast<std::size_t>(t)] = rec.fidelity;
  }

  MonteCarloResult res;
  res.trials = n_trials;
  res.outcome_histogram.assign(outcome_count, 0);
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    res.outcome_histogram[outcome_of[t]] += 1;
    if (success_of[t]) {
      res.successes += 1;
      res.min_success_fidelity = std::min(res.min_success_fidelity, fidelity_of[t]);
    }
  }
  res.frequency = static_cast<double>(res.successes) / static_cast<double>(n_trials);
  res.halfwidth =
      3.0 * std::sqrt(res.frequency * (1.0 - res.frequency) /
                      static_cast<double>(n_trials));
  return res;
}

}  // namespace telesim
