#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "repqkd/field.hpp"
#include "repqkd/rng.hpp"
#include "repqkd/wire.hpp"

namespace repqkd::sharing {

struct BadThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadIdentity : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SelfPeer : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotInActiveSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadActiveSize : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadComponentCount : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerificationFailed : std::runtime_error {
  VerificationFailed(std::uint64_t owner_value, const std::string& what)
      : std::runtime_error(what), owner(owner_value) {}
  std::uint64_t owner;  // identity of the party whose component failed
};

// Dealer-side state: the bivariate polynomial with secret F(0,0), the
// degree bounds (x up to t-1, y up to h-1) and the public identities,
// identities[0] being the dealer's own.
struct DealerSetup {
  field::BiPoly polynomial;
  std::uint32_t t = 0;
  std::uint32_t h = 0;
  std::uint32_t n = 0;
  std::vector<field::Fe> identities;

  field::Fe secret() const;
  // Coalition confidentiality needs h > t(t-1); smaller h stays legal but
  // callers should surface a warning.
  bool meets_confidentiality_bound() const { return h > t * (t - 1); }
};

// One participant's paired sub-shares: row = F(x, x_i) in x,
// col = F(x_i, y) in y. Both agree at x_i.
struct SharePair {
  field::Fe owner;
  field::UniPoly row;
  field::UniPoly col;
};

// Directed pairwise keys: to_peer = F(mine, peer) protects traffic this
// party sends to the peer, from_peer = F(peer, mine) traffic it receives.
struct SessionKeyPair {
  field::Fe to_peer;
  field::Fe from_peer;
};

struct LagrangeComponent {
  field::Fe owner;
  field::Fe delta;
};

struct DealResult {
  DealerSetup setup;
  std::vector<SharePair> shares;  // aligned with setup.identities
};

// Validates parameters and identities, then derives every share pair from
// the given polynomial. Used by deal() and by test-vector injection.
DealResult setup_with_polynomial(field::BiPoly polynomial, std::uint32_t t,
                                 std::uint32_t h, std::uint32_t n,
                                 std::vector<field::Fe> identities);

// Fresh random polynomial with constant term s; coefficients drawn row by
// row from the injected generator. Requires 2 <= t <= n.
DealResult deal(field::Fe s, std::uint32_t t, std::uint32_t h, std::uint32_t n,
                std::vector<field::Fe> identities, CounterRng& rng);

SessionKeyPair derive_session_keys(const SharePair& mine, field::Fe peer);

// delta_i = F(x_i, 0) * lagrange_weight(i, active); the active set must
// contain the owner and be duplicate-free.
LagrangeComponent lagrange_component(const SharePair& mine,
                                     std::span<const field::Fe> active);

field::Fe otp_encrypt(field::Fe m, field::Fe key);
field::Fe otp_decrypt(field::Fe c, field::Fe key);

// HMAC-SHA256 with key = concatenated canonical bytes of key_elems.
wire::Digest keyed_digest(std::span<const field::Fe> key_elems,
                          std::span<const std::uint8_t> message);

// Deterministic pad stream for tuple encryption: word i is the leading
// 8 bytes of keyed_digest([key], tuple(i)). Field elements add the word
// mod p; raw 64-bit payloads (e.g. logical ticks) add it mod 2^64.
std::uint64_t pad_word(field::Fe key, std::uint64_t counter);
std::vector<field::Fe> otp_stream_encrypt(std::span<const field::Fe> m,
                                          field::Fe key);
std::vector<field::Fe> otp_stream_decrypt(std::span<const field::Fe> c,
                                          field::Fe key);

// Digest a reconstruction report: message is tuple(reporter, delta), key
// is the session key F(owner, reporter).
wire::Digest component_digest(field::Fe session_key, field::Fe reporter,
                              const LagrangeComponent& component);

struct VerifyRequest {
  field::Fe reporter;
  field::Fe owner;
  wire::Digest digest;
};
using DealerVerify = std::function<bool(const VerifyRequest&)>;

// Dealer-side check: recomputes the true component and session key from
// the setup and compares digests.
class DealerVerifier {
 public:
  DealerVerifier(DealerSetup setup, std::vector<field::Fe> active);
  bool operator()(const VerifyRequest& request) const;

 private:
  DealerSetup setup_;
  std::vector<field::Fe> active_;
};

// Run by the holder of my_share once all components are in hand. Every
// peer component is digest-checked through the dealer callback before the
// sum is formed; a rejected component names its owner.
field::Fe reconstruct(const SharePair& my_share,
                      std::span<const LagrangeComponent> components,
                      std::uint32_t threshold, const DealerVerify& dealer);

}  // namespace repqkd::sharing
