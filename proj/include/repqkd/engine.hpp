#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "repqkd/qkd_channel.hpp"
#include "repqkd/repcode.hpp"
#include "repqkd/sharing.hpp"

namespace repqkd::engine {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompleteRun : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DecryptMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProtocolConfig {
  std::uint64_t p = 11;
  std::uint32_t t = 3;
  std::uint32_t n = 0;  // 0: defaults to t
  std::uint32_t h = 0;  // 0: defaults to t(t-1)+1
  std::uint32_t m = 0;  // 0: defaults to floor(p/3)
  double eps1 = 0.5;
  double eps2 = 0.1;
  std::uint32_t max_rounds = 16;
  std::int64_t window = 0;
  std::uint64_t seed = 0;
  qkd::ChannelConfig channel;
  // per-hop channel overrides, hop 1 = dealer -> first holder
  std::map<std::uint32_t, qkd::ChannelConfig> hop_channels;
};

// Append-only run record. One line per event:
// seq, tick, event, actor, peer, payload, qudits sent, classical payload
// symbols (monitoring traffic excluded), tab-separated in that order.
class Transcript {
 public:
  void event(std::int64_t tick, std::string_view type, std::string_view actor,
             std::string_view peer, std::string_view payload);
  void add_qudits(std::uint64_t n) { qudits_ += n; }
  void add_payload_symbols(std::uint64_t n) { payload_symbols_ += n; }

  std::uint64_t qudits() const noexcept { return qudits_; }
  std::uint64_t payload_symbols() const noexcept { return payload_symbols_; }
  const std::vector<std::string>& lines() const noexcept { return lines_; }
  std::string text() const;

 private:
  std::vector<std::string> lines_;
  std::uint64_t seq_ = 0;
  std::uint64_t qudits_ = 0;
  std::uint64_t payload_symbols_ = 0;
};

struct Party {
  field::Fe identity;
  sharing::SharePair share;
  bool dealer = false;
  field::Fe secret;  // reconstructed s; meaningful once the classical phase ran
  std::map<std::uint32_t, field::Fe> key_map;  // 1-based key index -> value
  std::int64_t expected_frame_tick = -1;
};

// Identification payload: the routing header travels in clear, the tuple
// (sender identity, frame tick, F(receiver, sender)) rides the pad stream
// keyed with F(sender, receiver). Field elements pad mod p, the tick pads
// as a raw 64-bit word.
struct IdentMessage {
  field::Fe from;
  field::Fe to;
  std::uint64_t enc_identity = 0;
  std::uint64_t enc_tick = 0;
  std::uint64_t enc_proof = 0;
};

IdentMessage seal_identification(const Party& sender, const Party& receiver,
                                 std::int64_t frame_tick);
// Checks the decrypted identity and key value against the receiver's own
// derivation; on success records the announced frame tick.
bool accept_identification(Party& receiver, const IdentMessage& msg);

struct RoundOutcome {
  enum class Kind {
    Keep,
    AbortThreshold,
    AbortTiming,
    AbortVerification,
    AbortAuth,
  };
  Kind kind = Kind::AbortAuth;
  std::size_t s1 = 0;
  std::size_t s2 = 0;
  std::size_t s3 = 0;
  std::map<std::uint32_t, field::Fe> recovered;
  std::optional<double> eve_recovery;
};

struct HopResult {
  enum class Status { Completed, AuthRejected, MaxRoundsExceeded };
  Status status = Status::MaxRoundsExceeded;
  std::uint32_t rounds_used = 0;
};

struct ChainResult {
  bool completed = false;
  std::uint32_t failed_hop = 0;  // 1-based, 0 when completed
  HopResult::Status failure = HopResult::Status::Completed;
  std::vector<std::uint32_t> rounds_per_hop;
};

// Single-threaded orchestrator: one logical clock, one seeded generator,
// all party interactions mediated here and recorded in the transcript.
class Engine {
 public:
  explicit Engine(const ProtocolConfig& cfg);

  const ProtocolConfig& config() const noexcept { return cfg_; }
  field::PrimeModulus modulus() const noexcept { return p_; }
  const sharing::DealerSetup& setup() const noexcept { return deal_.setup; }
  std::span<const field::Fe> true_key() const noexcept { return true_key_; }
  std::uint32_t key_length() const noexcept {
    return static_cast<std::uint32_t>(true_key_.size());
  }
  Party& party(std::size_t idx) { return parties_.at(idx); }  // 0 = dealer
  const Party& party(std::size_t idx) const { return parties_.at(idx); }
  std::size_t party_count() const noexcept { return parties_.size(); }
  const Transcript& transcript() const noexcept { return transcript_; }
  CounterRng& rng() noexcept { return rng_; }
  std::int64_t now() const noexcept { return now_; }

  bool run_identification(Party& sender, Party& receiver,
                          std::int64_t frame_tick);
  std::vector<field::Fe> broadcast_r_sequence(const Party& sender,
                                              const Party& receiver);
  RoundOutcome run_distribution_round(Party& sender, Party& receiver,
                                      std::span<const std::uint32_t> residual,
                                      const qkd::ChannelConfig& channel);
  HopResult run_full_distribution(Party& sender, Party& receiver,
                                  const qkd::ChannelConfig& channel);
  ChainResult run_chain();

  // Cabello ratio from the transcript counters: shared key symbols over
  // qudits plus non-monitoring classical symbols.
  double efficiency() const;

  qkd::ChannelConfig channel_for_hop(std::uint32_t hop) const;

  // Test hook: dealer stops answering digest queries; pending candidates
  // then time out and are dropped.
  void set_verifier_withheld(bool withheld) { verifier_withheld_ = withheld; }

  static ProtocolConfig normalized(ProtocolConfig cfg);

 private:
  void run_classical_phase();
  bool dealer_confirms(const Party& receiver,
                       const repcode::HarvestView& claimed,
                       std::span<const std::uint32_t> cell_index,
                       std::uint32_t m_round) const;

  ProtocolConfig cfg_;
  field::PrimeModulus p_;
  CounterRng rng_;
  sharing::DealResult deal_;
  Transcript transcript_;
  std::vector<Party> parties_;
  std::vector<field::Fe> true_key_;
  std::int64_t now_ = 0;
  bool chain_completed_ = false;
  bool verifier_withheld_ = false;
};

// Digest a harvest claim: message is tuple(receiver, S triples, I values),
// keyed with the classical secret.
wire::Digest harvest_digest(field::Fe secret, field::Fe receiver,
                            const repcode::HarvestView& view);

}  // namespace repqkd::engine
