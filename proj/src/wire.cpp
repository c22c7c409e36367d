#include "repqkd/wire.hpp"

#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <stdexcept>

namespace repqkd::wire {

void append_u32_be(Bytes& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void append_u64_be(Bytes& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

std::uint64_t read_u64_be(std::span<const std::uint8_t> bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  }
  return v;
}

Bytes serialize_words(std::span<const std::uint64_t> words) {
  Bytes out;
  out.reserve(4 + 8 * words.size());
  append_u32_be(out, static_cast<std::uint32_t>(words.size()));
  for (std::uint64_t w : words) append_u64_be(out, w);
  return out;
}

Bytes serialize_elements(std::span<const field::Fe> elements) {
  Bytes out;
  out.reserve(4 + 8 * elements.size());
  append_u32_be(out, static_cast<std::uint32_t>(elements.size()));
  for (const field::Fe& e : elements) append_u64_be(out, e.value());
  return out;
}

Digest hmac_sha256(std::span<const std::uint8_t> key,
                   std::span<const std::uint8_t> message) {
  Digest out{};
  unsigned int out_len = 0;
  const unsigned char* result =
      HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           message.data(), message.size(), out.data(), &out_len);
  if (result == nullptr || out_len != out.size()) {
    throw std::runtime_error("HMAC-SHA256 failed");
  }
  return out;
}

}  // namespace repqkd::wire
