// Two-party execution of the protocol: Alice and Bob state machines
// exchanging classical outcome messages over an ordered, reliable duplex
// channel, plus a seeded Monte Carlo runner.
//
// Wire encoding (used verbatim by any transport): one message per line,
// UTF-8 JSON, {"type":"outcome","pair":<int>,"m":<int 1..4>} from Alice and
// a final {"type":"report","success":<bool>} from Bob.

#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "telesim/multiqubit.hpp"

namespace telesim {

struct OutcomeMessage {
  int pair = 0;  // 0-based pair index
  int m = 0;     // measurement result, 1..4
};

struct SessionReportMessage {
  bool success = false;
};

using WireMessage = std::variant<OutcomeMessage, SessionReportMessage>;

// One JSON line without the trailing newline.
std::string encode_message(const WireMessage& msg);
// Throws TransportError on malformed input.
WireMessage decode_message(std::string_view line);

class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Ordered, reliable, in-process duplex line channel. recv on an empty or
// closed queue throws rather than dropping or blocking; trials run the two
// machines in strict alternation so a missing message is a protocol bug or
// an injected fault, never a race.
class DuplexChannel {
 public:
  class Endpoint {
   public:
    void send(const WireMessage& msg);
    WireMessage recv();

   private:
    friend class DuplexChannel;
    Endpoint(DuplexChannel* owner, bool is_alice) : owner_(owner), is_alice_(is_alice) {}
    DuplexChannel* owner_;
    bool is_alice_;
  };

  DuplexChannel() : alice_(this, true), bob_(this, false) {}

  Endpoint& alice_end() { return alice_; }
  Endpoint& bob_end() { return bob_; }

  // Simulated transport failure: everything in flight is dropped and any
  // further send/recv throws TransportError.
  void close();
  bool closed() const { return closed_; }

 private:
  friend class Endpoint;
  std::deque<std::string> to_bob_;
  std::deque<std::string> to_alice_;
  bool closed_ = false;
  Endpoint alice_;
  Endpoint bob_;
};

// Shared quantum register with stable qubit labels; labels disappear as
// qubits are measured out. Both machines act on the same register (the
// shared physics) but only ever touch their own labels.
class QubitRegister {
 public:
  explicit QubitRegister(PureState state);

  int live_qubits() const { return state_.num_qubits(); }
  const PureState& state() const { return state_; }

  void apply(const CMatrix& u, const std::vector<int>& labels);
  // Projective measurement in the given basis; collapses the state and
  // retires the labels. Returns the outcome index.
  int measure(const std::vector<int>& labels, std::span<const PureState> basis,
              RngStream& rng);
  // Appends fresh qubits in the given state under new labels.
  void append(const PureState& extra, const std::vector<int>& new_labels);

 private:
  std::vector<int> positions(const std::vector<int>& labels) const;
  PureState state_;
  std::vector<int> labels_;  // labels_[position] = label
};

class AliceMachine {
 public:
  enum class State { ready, measured, done };

  AliceMachine(QubitRegister& reg, const MeasurementBank& mb);

  // Measures every pair, sending one outcome message per pair, then halts.
  void run(DuplexChannel::Endpoint& out, RngStream& rng);

  State state() const { return state_; }
  const std::vector<int>& outcomes() const { return outcomes_; }

 private:
  QubitRegister& reg_;
  const MeasurementBank& mb_;
  State state_ = State::ready;
  std::vector<int> outcomes_;
};

class BobMachine {
 public:
  enum class State { waiting, corrected, reported };

  // The correction policy is derived from (ch, mb), which both parties know
  // a priori; only outcome indices cross the wire.
  BobMachine(QubitRegister& reg, const ChannelBank& ch, const MeasurementBank& mb);

  // Receives all outcome messages, applies corrections and ancilla
  // readouts, then reports success to Alice. Returns the local verdict.
  bool run(DuplexChannel::Endpoint& io, RngStream& rng);

  State state() const { return state_; }

 private:
  QubitRegister& reg_;
  const ChannelBank& ch_;
  const MeasurementBank& mb_;
  State state_ = State::waiting;
};

struct TrialRecord {
  std::uint64_t trial_id = 0;
  std::vector<int> outcomes;  // m_i per pair
  bool success = false;
  double fidelity = 0.0;  // of Bob's final state with the input
};

// One full session: Born-rule sampling on Alice's side, classical messages,
// Bob's corrections and readout. Identical (base_seed, trial) gives an
// identical record.
TrialRecord run_session(const MultiInput& q, const ChannelBank& ch,
                        const MeasurementBank& mb, std::uint64_t base_seed,
                        std::uint64_t trial = 0);
TrialRecord run_session(const InputQubit& q, const SchmidtPair& channel,
                        const MeasurementFamily& f, std::uint64_t base_seed,
                        std::uint64_t trial = 0);

struct MonteCarloResult {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double frequency = 0.0;
  double halfwidth = 0.0;  // 3 * sqrt(freq * (1 - freq) / trials)
  std::vector<std::uint64_t> outcome_histogram;  // 4^k joint outcomes
  double min_success_fidelity = 1.0;
};

// n_trials independent sessions on substreams (base_seed, t). Aggregates
// are integer counts plus a min-reduction, so the result is identical for
// any worker count.
MonteCarloResult monte_carlo(const MultiInput& q, const ChannelBank& ch,
                             const MeasurementBank& mb, std::uint64_t n_trials,
                             std::uint64_t base_seed);

}  // namespace telesim
