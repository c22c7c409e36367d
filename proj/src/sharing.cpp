#include "repqkd/sharing.hpp"

#include <algorithm>
#include <string>

namespace repqkd::sharing {

namespace {

std::size_t index_in(std::span<const field::Fe> set, field::Fe x) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] == x) return i;
  }
  return set.size();
}

}  // namespace

field::Fe DealerSetup::secret() const {
  const field::Fe zero(0, polynomial.modulus());
  return polynomial.eval(zero, zero);
}

DealResult setup_with_polynomial(field::BiPoly polynomial, std::uint32_t t,
                                 std::uint32_t h, std::uint32_t n,
                                 std::vector<field::Fe> identities) {
  if (t < 1 || t > n) {
    throw BadThreshold("threshold must satisfy 1 <= t <= n");
  }
  if (identities.size() != static_cast<std::size_t>(n) + 1) {
    throw BadIdentity("need n+1 identities (dealer first)");
  }
  for (std::size_t a = 0; a < identities.size(); ++a) {
    field::require_same_modulus(identities[a], identities.front());
    if (identities[a].value() == 0) {
      throw BadIdentity("identities must be nonzero");
    }
    for (std::size_t b = a + 1; b < identities.size(); ++b) {
      if (identities[a] == identities[b]) {
        throw BadIdentity("identities must be distinct");
      }
    }
  }
  if (polynomial.x_degree_bound() != t || polynomial.y_degree_bound() != h) {
    throw BadThreshold("polynomial degree bounds do not match (t, h)");
  }

  DealerSetup setup{std::move(polynomial), t, h, n, std::move(identities)};
  std::vector<SharePair> shares;
  shares.reserve(setup.identities.size());
  for (const field::Fe& x : setup.identities) {
    shares.push_back(SharePair{x, setup.polynomial.restrict_y(x),
                               setup.polynomial.restrict_x(x)});
  }
  return DealResult{std::move(setup), std::move(shares)};
}

DealResult deal(field::Fe s, std::uint32_t t, std::uint32_t h, std::uint32_t n,
                std::vector<field::Fe> identities, CounterRng& rng) {
  if (t < 2) {
    throw BadThreshold("dealing requires a threshold of at least 2");
  }
  if (t > n) {
    throw BadThreshold("threshold exceeds participant count");
  }
  if (h < 1) {
    throw BadThreshold("y-degree bound must be positive");
  }
  return setup_with_polynomial(field::BiPoly::random(s, t, h, rng), t, h, n,
                               std::move(identities));
}

SessionKeyPair derive_session_keys(const SharePair& mine, field::Fe peer) {
  if (peer == mine.owner) {
    throw SelfPeer("cannot derive session keys with oneself");
  }
  return SessionKeyPair{mine.col.eval(peer), mine.row.eval(peer)};
}

LagrangeComponent lagrange_component(const SharePair& mine,
                                     std::span<const field::Fe> active) {
  if (active.empty()) {
    throw BadActiveSize("active set is empty");
  }
  const std::size_t idx = index_in(active, mine.owner);
  if (idx == active.size()) {
    throw NotInActiveSet("share owner is not in the active set");
  }
  const field::Fe at_zero = mine.col.eval(field::Fe(0, mine.owner.modulus()));
  return LagrangeComponent{mine.owner,
                           at_zero * field::lagrange_weight(idx, active)};
}

field::Fe otp_encrypt(field::Fe m, field::Fe key) { return m + key; }
field::Fe otp_decrypt(field::Fe c, field::Fe key) { return c - key; }

wire::Digest keyed_digest(std::span<const field::Fe> key_elems,
                          std::span<const std::uint8_t> message) {
  wire::Bytes key;
  key.reserve(8 * key_elems.size());
  for (const field::Fe& e : key_elems) {
    const auto b = e.to_bytes();
    key.insert(key.end(), b.begin(), b.end());
  }
  return wire::hmac_sha256(key, message);
}

std::uint64_t pad_word(field::Fe key, std::uint64_t counter) {
  const std::uint64_t words[] = {counter};
  const wire::Bytes message = wire::serialize_words(words);
  const field::Fe keys[] = {key};
  const wire::Digest d = keyed_digest(keys, message);
  return wire::read_u64_be(std::span(d).first(8));
}

std::vector<field::Fe> otp_stream_encrypt(std::span<const field::Fe> m,
                                          field::Fe key) {
  std::vector<field::Fe> out;
  out.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.push_back(m[i] + field::Fe(pad_word(key, i), key.modulus()));
  }
  return out;
}

std::vector<field::Fe> otp_stream_decrypt(std::span<const field::Fe> c,
                                          field::Fe key) {
  std::vector<field::Fe> out;
  out.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.push_back(c[i] - field::Fe(pad_word(key, i), key.modulus()));
  }
  return out;
}

wire::Digest component_digest(field::Fe session_key, field::Fe reporter,
                              const LagrangeComponent& component) {
  const field::Fe payload[] = {reporter, component.delta};
  const wire::Bytes message = wire::serialize_elements(payload);
  const field::Fe keys[] = {session_key};
  return keyed_digest(keys, message);
}

DealerVerifier::DealerVerifier(DealerSetup setup, std::vector<field::Fe> active)
    : setup_(std::move(setup)), active_(std::move(active)) {}

bool DealerVerifier::operator()(const VerifyRequest& request) const {
  const std::size_t idx = index_in(active_, request.owner);
  if (idx == active_.size()) return false;
  const field::Fe zero(0, request.owner.modulus());
  const field::Fe true_delta = setup_.polynomial.eval(request.owner, zero) *
                               field::lagrange_weight(idx, active_);
  const field::Fe true_key =
      setup_.polynomial.eval(request.owner, request.reporter);
  const wire::Digest expected = component_digest(
      true_key, request.reporter, LagrangeComponent{request.owner, true_delta});
  return expected == request.digest;
}

field::Fe reconstruct(const SharePair& my_share,
                      std::span<const LagrangeComponent> components,
                      std::uint32_t threshold, const DealerVerify& dealer) {
  if (components.size() != threshold || components.empty()) {
    throw BadComponentCount("expected exactly " + std::to_string(threshold) +
                            " components, got " +
                            std::to_string(components.size()));
  }
  bool own_seen = false;
  for (std::size_t a = 0; a < components.size(); ++a) {
    if (components[a].owner == my_share.owner) own_seen = true;
    for (std::size_t b = a + 1; b < components.size(); ++b) {
      if (components[a].owner == components[b].owner) {
        throw BadComponentCount("duplicate component owner");
      }
    }
  }
  if (!own_seen) {
    throw BadComponentCount("own component missing from the set");
  }

  field::Fe sum(0, my_share.owner.modulus());
  for (const LagrangeComponent& c : components) {
    if (!(c.owner == my_share.owner)) {
      const SessionKeyPair keys = derive_session_keys(my_share, c.owner);
      const VerifyRequest request{
          my_share.owner, c.owner,
          component_digest(keys.from_peer, my_share.owner, c)};
      if (!dealer(request)) {
        throw VerificationFailed(c.owner.value(),
                                 "component rejected by the dealer");
      }
    }
    sum = sum + c.delta;
  }
  return sum;
}

}  // namespace repqkd::sharing
