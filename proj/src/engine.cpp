#include "repqkd/engine.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>

namespace repqkd::engine {

namespace {

constexpr std::int64_t kHonestDelay = 1;

std::string fe_str(field::Fe x) { return std::to_string(x.value()); }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

sharing::DealResult make_deal(const ProtocolConfig& cfg,
                              field::PrimeModulus p, CounterRng& rng) {
  std::vector<field::Fe> identities;
  identities.reserve(cfg.n + 1);
  identities.emplace_back(cfg.n + 1, p);  // dealer
  for (std::uint32_t i = 1; i <= cfg.n; ++i) identities.emplace_back(i, p);

  const field::Fe secret = field::uniform_element(p, rng);
  if (cfg.t == 1) {
    // Single-holder chain: the sharing layer degenerates to a polynomial
    // constant in x so the lone component already equals the secret.
    return sharing::setup_with_polynomial(
        field::BiPoly::random(secret, 1, cfg.h, rng), 1, cfg.h, cfg.n,
        std::move(identities));
  }
  return sharing::deal(secret, cfg.t, cfg.h, cfg.n, std::move(identities),
                       rng);
}

}  // namespace

void Transcript::event(std::int64_t tick, std::string_view type,
                       std::string_view actor, std::string_view peer,
                       std::string_view payload) {
  std::string line;
  line.reserve(64 + payload.size());
  line += std::to_string(seq_++);
  line += '\t';
  line += std::to_string(tick);
  line += '\t';
  line += type;
  line += '\t';
  line += actor;
  line += '\t';
  line += peer;
  line += '\t';
  line += payload;
  line += '\t';
  line += std::to_string(qudits_);
  line += '\t';
  line += std::to_string(payload_symbols_);
  lines_.push_back(std::move(line));
}

std::string Transcript::text() const {
  std::string out;
  for (const std::string& line : lines_) {
    out += line;
    out += '\n';
  }
  return out;
}

IdentMessage seal_identification(const Party& sender, const Party& receiver,
                                 std::int64_t frame_tick) {
  const auto keys = sharing::derive_session_keys(sender.share, receiver.identity);
  const field::Fe k = keys.to_peer;  // F(sender, receiver)
  const field::Fe proof = keys.from_peer;  // F(receiver, sender)
  const field::PrimeModulus p = k.modulus();
  IdentMessage msg;
  msg.from = sender.identity;
  msg.to = receiver.identity;
  msg.enc_identity =
      (sender.identity + field::Fe(sharing::pad_word(k, 0), p)).value();
  msg.enc_tick = static_cast<std::uint64_t>(frame_tick) + sharing::pad_word(k, 1);
  msg.enc_proof = (proof + field::Fe(sharing::pad_word(k, 2), p)).value();
  return msg;
}

bool accept_identification(Party& receiver, const IdentMessage& msg) {
  const auto keys = sharing::derive_session_keys(receiver.share, msg.from);
  const field::Fe k = keys.from_peer;  // F(claimed sender, receiver)
  const field::PrimeModulus p = k.modulus();
  const field::Fe identity =
      field::Fe(msg.enc_identity, p) - field::Fe(sharing::pad_word(k, 0), p);
  const std::uint64_t tick = msg.enc_tick - sharing::pad_word(k, 1);
  const field::Fe proof =
      field::Fe(msg.enc_proof, p) - field::Fe(sharing::pad_word(k, 2), p);
  if (!(identity == msg.from) || !(proof == keys.to_peer)) {
    return false;
  }
  receiver.expected_frame_tick = static_cast<std::int64_t>(tick);
  return true;
}

wire::Digest harvest_digest(field::Fe secret, field::Fe receiver,
                            const repcode::HarvestView& view) {
  std::vector<std::uint64_t> words;
  words.reserve(1 + 4 * view.size());
  words.push_back(receiver.value());
  for (const auto& [triple, value] : view) {
    words.push_back(triple.k);
    words.push_back(triple.i);
    words.push_back(triple.j);
  }
  for (const auto& [triple, value] : view) {
    words.push_back(value.value());
  }
  const field::Fe key_elems[] = {secret};
  return sharing::keyed_digest(key_elems, wire::serialize_words(words));
}

ProtocolConfig Engine::normalized(ProtocolConfig cfg) {
  if (cfg.t < 1) throw ConfigError("need at least one holder");
  if (cfg.n == 0) cfg.n = cfg.t;
  if (cfg.n < cfg.t) throw ConfigError("n must be at least t");
  if (cfg.h == 0) cfg.h = cfg.t * (cfg.t - 1) + 1;
  if (cfg.m == 0) cfg.m = static_cast<std::uint32_t>(cfg.p / 3);
  if (cfg.m == 0) throw ConfigError("m must be positive (p too small)");
  if (cfg.eps1 < 0.0 || cfg.eps1 > 1.0 || cfg.eps2 < 0.0 || cfg.eps2 > 1.0) {
    throw ConfigError("thresholds must lie in [0, 1]");
  }
  if (cfg.max_rounds < 1) throw ConfigError("max_rounds must be positive");
  if (cfg.window < 0) throw ConfigError("window must be non-negative");
  if (static_cast<std::uint64_t>(cfg.n) + 1 >= cfg.p) {
    throw ConfigError("identities 1..n+1 must be distinct nonzero mod p");
  }
  return cfg;
}

Engine::Engine(const ProtocolConfig& cfg)
    : cfg_(normalized(cfg)),
      p_(cfg_.p),
      rng_(cfg_.seed),
      deal_(make_deal(cfg_, p_, rng_)) {
  std::string config_line = "p=" + std::to_string(cfg_.p) +
                            " t=" + std::to_string(cfg_.t) +
                            " n=" + std::to_string(cfg_.n) +
                            " h=" + std::to_string(cfg_.h) +
                            " m=" + std::to_string(cfg_.m) +
                            " eps1=" + format_double(cfg_.eps1) +
                            " eps2=" + format_double(cfg_.eps2) +
                            " noise=" + format_double(cfg_.channel.noise_rate) +
                            " delay=" + std::to_string(cfg_.channel.delay) +
                            " eve=" +
                            (cfg_.channel.adversary
                                 ? format_double(cfg_.channel.adversary->fraction)
                                 : std::string("0")) +
                            " window=" + std::to_string(cfg_.window) +
                            " max_rounds=" + std::to_string(cfg_.max_rounds) +
                            " seed=" + std::to_string(cfg_.seed);
  transcript_.event(now_, "config", "-", "-", config_line);
  if (!deal_.setup.meets_confidentiality_bound()) {
    transcript_.event(now_, "warn_confidentiality", "-", "-",
                      "h=" + std::to_string(cfg_.h) + " needs h>t(t-1)");
  }

  parties_.reserve(deal_.shares.size());
  for (std::size_t i = 0; i < deal_.shares.size(); ++i) {
    parties_.push_back(Party{deal_.shares[i].owner, deal_.shares[i], i == 0,
                             field::Fe(0, p_), {}, -1});
    transcript_.event(now_, "share_issued", fe_str(parties_.front().identity),
                      fe_str(parties_.back().identity),
                      "row_terms=" + std::to_string(cfg_.t) +
                          " col_terms=" + std::to_string(cfg_.h));
  }

  run_classical_phase();

  // the dealer's fresh key sequence for this run
  const std::uint32_t total = cfg_.m * static_cast<std::uint32_t>(cfg_.p);
  true_key_.reserve(total);
  for (std::uint32_t i = 0; i < total; ++i) {
    true_key_.push_back(field::uniform_element(p_, rng_));
  }
  for (std::uint32_t i = 0; i < total; ++i) {
    parties_[0].key_map.emplace(i + 1, true_key_[i]);
  }
  transcript_.event(now_, "key_generated", fe_str(parties_[0].identity), "-",
                    "symbols=" + std::to_string(total));
}

void Engine::run_classical_phase() {
  std::vector<field::Fe> active;
  active.reserve(cfg_.t);
  for (std::uint32_t i = 1; i <= cfg_.t; ++i) {
    active.push_back(parties_[i].identity);
  }

  // every active holder computes its component and sends it, one-time
  // padded, to each other active holder
  std::vector<sharing::LagrangeComponent> components;
  components.reserve(cfg_.t);
  for (std::uint32_t i = 1; i <= cfg_.t; ++i) {
    components.push_back(sharing::lagrange_component(parties_[i].share, active));
  }
  for (std::uint32_t i = 1; i <= cfg_.t; ++i) {
    for (std::uint32_t j = 1; j <= cfg_.t; ++j) {
      if (i == j) continue;
      const auto keys =
          sharing::derive_session_keys(parties_[i].share, parties_[j].identity);
      const field::Fe cipher =
          sharing::otp_encrypt(components[i - 1].delta, keys.to_peer);
      transcript_.event(now_, "msg_delta", fe_str(parties_[i].identity),
                        fe_str(parties_[j].identity), "c=" + fe_str(cipher));
      now_ += 1;
    }
  }

  const sharing::DealerVerifier dealer_check(deal_.setup, active);
  const field::Fe dealer_id = parties_[0].identity;
  for (std::uint32_t i = 1; i <= cfg_.t; ++i) {
    Party& holder = parties_[i];
    const auto verify = [&](const sharing::VerifyRequest& request) {
      transcript_.event(now_, "digest_report", fe_str(holder.identity),
                        fe_str(dealer_id), "owner=" + fe_str(request.owner));
      const bool ok = dealer_check(request);
      now_ += 1;
      transcript_.event(now_, "verify_verdict", fe_str(dealer_id),
                        fe_str(holder.identity),
                        std::string("owner=") + fe_str(request.owner) +
                            (ok ? " accept" : " reject"));
      now_ += 1;
      return ok;
    };
    holder.secret = sharing::reconstruct(holder.share, components, cfg_.t, verify);
    transcript_.event(now_, "reconstructed", fe_str(holder.identity), "-",
                      "s=" + fe_str(holder.secret));
    now_ += 1;
  }
  parties_[0].secret = deal_.setup.secret();
}

bool Engine::run_identification(Party& sender, Party& receiver,
                                std::int64_t frame_tick) {
  const IdentMessage msg = seal_identification(sender, receiver, frame_tick);
  transcript_.event(now_, "msg_ident", fe_str(sender.identity),
                    fe_str(receiver.identity),
                    "frame_tick=" + std::to_string(frame_tick));
  now_ += 1;
  const bool ok = accept_identification(receiver, msg);
  transcript_.event(now_, ok ? "ident_ok" : "ident_reject",
                    fe_str(receiver.identity), fe_str(sender.identity), "-");
  now_ += 1;
  return ok;
}

std::vector<field::Fe> Engine::broadcast_r_sequence(const Party& sender,
                                                    const Party& receiver) {
  std::vector<field::Fe> r_vec;
  r_vec.reserve(cfg_.p);
  for (std::uint64_t i = 0; i < cfg_.p; ++i) {
    r_vec.push_back(field::uniform_element(p_, rng_));
  }
  const auto sender_keys =
      sharing::derive_session_keys(sender.share, receiver.identity);
  const auto cipher = sharing::otp_stream_encrypt(r_vec, sender_keys.to_peer);
  const auto receiver_keys =
      sharing::derive_session_keys(receiver.share, sender.identity);
  const auto plain = sharing::otp_stream_decrypt(cipher, receiver_keys.from_peer);
  if (plain != r_vec) {
    throw DecryptMismatch("session keys disagree on the broadcast channel");
  }
  transcript_.event(now_, "msg_rvec", fe_str(sender.identity),
                    fe_str(receiver.identity),
                    "len=" + std::to_string(r_vec.size()));
  now_ += 1;
  return r_vec;
}

bool Engine::dealer_confirms(const Party& receiver,
                             const repcode::HarvestView& claimed,
                             std::span<const std::uint32_t> cell_index,
                             std::uint32_t m_round) const {
  repcode::HarvestView expected;
  for (const auto& [triple, value] : claimed) {
    const std::uint32_t flat = repcode::key_index(triple.k, triple.i, m_round);
    if (flat == 0 || flat > cell_index.size()) return false;
    const std::uint32_t original = cell_index[flat - 1];
    if (original == 0) return false;  // padding cells are never key material
    expected.emplace(triple, true_key_[original - 1]);
  }
  const field::Fe dealer_secret = deal_.setup.secret();
  return harvest_digest(receiver.secret, receiver.identity, claimed) ==
         harvest_digest(dealer_secret, receiver.identity, expected);
}

RoundOutcome Engine::run_distribution_round(
    Party& sender, Party& receiver, std::span<const std::uint32_t> residual,
    const qkd::ChannelConfig& channel) {
  RoundOutcome out;
  // the frame leaves four ticks after round start: identification message
  // and ack, then the basis broadcast and the cell map
  if (!run_identification(sender, receiver, now_ + 4)) {
    out.kind = RoundOutcome::Kind::AbortAuth;
    return out;
  }
  const std::vector<field::Fe> r_vec = broadcast_r_sequence(sender, receiver);

  std::vector<field::Fe> values;
  values.reserve(residual.size());
  for (const std::uint32_t idx : residual) {
    values.push_back(sender.key_map.at(idx));
  }
  const repcode::PackedRound pack = repcode::pack_residual(
      residual, values, static_cast<std::uint32_t>(cfg_.p), p_, rng_);
  const std::uint32_t m_round = pack.sequence.m;
  const std::size_t padding =
      pack.cell_index.size() - residual.size();
  transcript_.event(now_, "msg_cellmap", fe_str(sender.identity),
                    fe_str(receiver.identity),
                    "cells=" + std::to_string(pack.cell_index.size()) +
                        " padding=" + std::to_string(padding));
  now_ += 1;

  const std::int64_t frame_tick = now_;
  const repcode::EncodedGrid grid = repcode::encode(pack.sequence);
  const auto sender_keys =
      sharing::derive_session_keys(sender.share, receiver.identity);
  const field::Fe offset = sender_keys.from_peer;  // F(receiver, sender)
  const qkd::QuantumFrame frame =
      qkd::prepare_frame(grid, r_vec, offset, frame_tick);
  transcript_.add_qudits(frame.states.size());
  transcript_.event(frame_tick, "frame_sent", fe_str(sender.identity),
                    fe_str(receiver.identity),
                    "cells=" + std::to_string(frame.states.size()));

  const qkd::TransmitResult tx = qkd::transmit(frame, channel, rng_);
  if (tx.eve) {
    out.eve_recovery = qkd::eve_key_recovery_rate(*tx.eve, grid, offset);
  }

  const auto receiver_keys =
      sharing::derive_session_keys(receiver.share, sender.identity);
  repcode::MeasurementTable table(1, 1, field::Fe(0, p_));
  try {
    table = qkd::receive_measure(tx.delivered, r_vec, receiver_keys.to_peer,
                                 receiver.expected_frame_tick + kHonestDelay,
                                 cfg_.window, channel.noise_rate, rng_);
  } catch (const qkd::TimingViolation&) {
    transcript_.event(tx.arrival, "timing_reject", fe_str(receiver.identity),
                      fe_str(sender.identity),
                      "arrival=" + std::to_string(tx.arrival) + " expected=" +
                          std::to_string(receiver.expected_frame_tick +
                                         kHonestDelay));
    now_ = tx.arrival + 1;
    out.kind = RoundOutcome::Kind::AbortTiming;
    return out;
  }

  const repcode::TripleClassification classes = repcode::classify(table);
  out.s1 = classes.all_distinct.size();
  out.s2 = classes.two_equal.size();
  out.s3 = classes.all_equal.size();
  transcript_.event(tx.arrival, "measured", fe_str(receiver.identity),
                    fe_str(sender.identity),
                    "s1=" + std::to_string(out.s1) + " s2=" +
                        std::to_string(out.s2) + " s3=" +
                        std::to_string(out.s3));

  const repcode::RoundDecision decision =
      repcode::threshold_decision(classes, cfg_.eps1, cfg_.eps2);
  now_ = tx.arrival + 1;
  if (decision == repcode::RoundDecision::Abort) {
    transcript_.event(now_, "decision", fe_str(receiver.identity),
                      fe_str(sender.identity), "abort_threshold");
    now_ += 1;
    out.kind = RoundOutcome::Kind::AbortThreshold;
    return out;
  }
  transcript_.event(now_, "decision", fe_str(receiver.identity),
                    fe_str(sender.identity), "keep");
  now_ += 1;

  repcode::HarvestState harvest = repcode::harvest_s3(classes, table);
  // padding cells are broadcast as such; the receiver drops them before
  // any dealer exchange
  std::erase_if(harvest.pending, [&](const auto& entry) {
    const std::uint32_t flat =
        repcode::key_index(entry.first.k, entry.first.i, m_round);
    return pack.cell_index[flat - 1] == 0;
  });
  std::erase_if(harvest.entries, [&](const auto& entry) {
    const std::uint32_t flat =
        repcode::key_index(entry.first.k, entry.first.i, m_round);
    return pack.cell_index[flat - 1] == 0;
  });

  const auto verifier = [&](const repcode::HarvestView& view) {
    transcript_.event(now_, "harvest_digest", fe_str(receiver.identity),
                      fe_str(parties_[0].identity),
                      "entries=" + std::to_string(view.size()));
    now_ += 1;
    if (verifier_withheld_) {
      transcript_.event(now_, "harvest_verdict", fe_str(parties_[0].identity),
                        fe_str(receiver.identity), "no_response");
      now_ += 1;
      return repcode::VerifierReply::NoResponse;
    }
    const bool ok = dealer_confirms(receiver, view, pack.cell_index, m_round);
    transcript_.event(now_, "harvest_verdict", fe_str(parties_[0].identity),
                      fe_str(receiver.identity), ok ? "accept" : "reject");
    now_ += 1;
    return ok ? repcode::VerifierReply::Confirmed
              : repcode::VerifierReply::Rejected;
  };
  repcode::extend(harvest, verifier);

  // whole-harvest check before anything enters the receiver's key map
  if (verifier(harvest.entries) != repcode::VerifierReply::Confirmed) {
    transcript_.event(now_, "round_outcome", fe_str(receiver.identity),
                      fe_str(sender.identity), "abort_verification");
    now_ += 1;
    out.kind = RoundOutcome::Kind::AbortVerification;
    return out;
  }

  for (const auto& [triple, value] : harvest.entries) {
    const std::uint32_t flat = repcode::key_index(triple.k, triple.i, m_round);
    out.recovered.emplace(pack.cell_index[flat - 1], value);
  }
  transcript_.event(now_, "round_outcome", fe_str(receiver.identity),
                    fe_str(sender.identity),
                    "keep recovered=" + std::to_string(out.recovered.size()));
  now_ += 1;
  out.kind = RoundOutcome::Kind::Keep;
  return out;
}

HopResult Engine::run_full_distribution(Party& sender, Party& receiver,
                                        const qkd::ChannelConfig& channel) {
  const std::uint32_t total = key_length();
  std::vector<std::uint32_t> residual;
  for (std::uint32_t idx = 1; idx <= total; ++idx) {
    if (!receiver.key_map.contains(idx)) residual.push_back(idx);
  }

  for (std::uint32_t round = 1; round <= cfg_.max_rounds; ++round) {
    const RoundOutcome out =
        run_distribution_round(sender, receiver, residual, channel);
    if (out.kind == RoundOutcome::Kind::AbortAuth) {
      return HopResult{HopResult::Status::AuthRejected, round};
    }
    if (out.kind == RoundOutcome::Kind::Keep) {
      for (const auto& [idx, value] : out.recovered) {
        receiver.key_map.insert_or_assign(idx, value);
      }
      std::erase_if(residual, [&](std::uint32_t idx) {
        return out.recovered.contains(idx);
      });
      if (residual.empty()) {
        return HopResult{HopResult::Status::Completed, round};
      }
    }
  }
  return HopResult{HopResult::Status::MaxRoundsExceeded, cfg_.max_rounds};
}

qkd::ChannelConfig Engine::channel_for_hop(std::uint32_t hop) const {
  const auto it = cfg_.hop_channels.find(hop);
  return it == cfg_.hop_channels.end() ? cfg_.channel : it->second;
}

ChainResult Engine::run_chain() {
  ChainResult result;
  for (std::uint32_t hop = 1; hop <= cfg_.t; ++hop) {
    now_ += 1;
    Party& sender = parties_[hop - 1];
    Party& receiver = parties_[hop];
    transcript_.event(now_, "hop_start", fe_str(sender.identity),
                      fe_str(receiver.identity), "hop=" + std::to_string(hop));
    const HopResult hr =
        run_full_distribution(sender, receiver, channel_for_hop(hop));
    result.rounds_per_hop.push_back(hr.rounds_used);
    if (hr.status != HopResult::Status::Completed) {
      transcript_.event(now_, "hop_failed", fe_str(sender.identity),
                        fe_str(receiver.identity),
                        hr.status == HopResult::Status::AuthRejected
                            ? "auth_reject"
                            : "max_rounds");
      result.failed_hop = hop;
      result.failure = hr.status;
      return result;
    }
    transcript_.event(now_, "hop_complete", fe_str(sender.identity),
                      fe_str(receiver.identity),
                      "rounds=" + std::to_string(hr.rounds_used));
  }
  chain_completed_ = true;
  transcript_.event(now_, "chain_complete", fe_str(parties_[0].identity), "-",
                    "hops=" + std::to_string(cfg_.t));
  result.completed = true;
  return result;
}

double Engine::efficiency() const {
  if (!chain_completed_) {
    throw IncompleteRun("efficiency is defined for completed chains only");
  }
  const double shared = static_cast<double>(key_length());
  const double spent = static_cast<double>(transcript_.qudits()) +
                       static_cast<double>(transcript_.payload_symbols());
  return shared / spent;
}

}  // namespace repqkd::engine
