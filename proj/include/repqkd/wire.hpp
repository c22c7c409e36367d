#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "repqkd/field.hpp"

namespace repqkd::wire {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

void append_u32_be(Bytes& out, std::uint32_t v);
void append_u64_be(Bytes& out, std::uint64_t v);
std::uint64_t read_u64_be(std::span<const std::uint8_t> bytes);

// Canonical tuple form: 4-byte big-endian word count, then each word as
// 8 bytes big-endian. Field elements contribute their canonical value;
// index triples contribute three consecutive words.
Bytes serialize_words(std::span<const std::uint64_t> words);
Bytes serialize_elements(std::span<const field::Fe> elements);

Digest hmac_sha256(std::span<const std::uint8_t> key,
                   std::span<const std::uint8_t> message);

}  // namespace repqkd::wire
