#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "repqkd/mub.hpp"
#include "repqkd/repcode.hpp"
#include "repqkd/rng.hpp"

namespace repqkd::qkd {

struct TimingViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoAdversary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ordered rows x 3m grid of qudits. Honest preparation gives every row a
// uniform basis; a transmitted frame may lose that property.
struct QuantumFrame {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;  // 3m
  std::vector<mub::QuditState> states;  // row-major
  std::int64_t send_time = 0;
  std::int64_t arrival_time = 0;

  const mub::QuditState& at(std::uint32_t row, std::uint32_t col) const {
    return states[static_cast<std::size_t>(row) * cols + col];
  }
  mub::QuditState& at(std::uint32_t row, std::uint32_t col) {
    return states[static_cast<std::size_t>(row) * cols + col];
  }
};

enum class EveBasisPool { EqThreeFamily, EqThreeFamilyPlusComputational };

struct InterceptResend {
  double fraction = 1.0;
  EveBasisPool pool = EveBasisPool::EqThreeFamily;
  // Test-only cheats: guess the true row basis / the true level offset
  // instead of drawing uniformly.
  bool cheat_bases = false;
  std::optional<std::uint64_t> cheat_offset;
};

struct ChannelConfig {
  double noise_rate = 0.0;  // applied as outcome replacement at measurement
  std::int64_t delay = 1;
  std::optional<InterceptResend> adversary;
};

struct EveInterception {
  std::uint32_t row = 0;  // 0-based frame coordinates
  std::uint32_t col = 0;
  mub::MeasureBasis guessed_basis;
  field::Fe true_basis;
  field::Fe measured_level;
};

struct EveRecord {
  field::Fe offset_guess;  // one uniform guess per frame
  std::vector<EveInterception> cells;
};

struct TransmitResult {
  QuantumFrame delivered;
  std::optional<EveRecord> eve;
  std::int64_t arrival = 0;
};

// Cell (k, i, j) of the grid becomes a qudit with basis r_vec[row] and
// level grid value + offset.
QuantumFrame prepare_frame(const repcode::EncodedGrid& grid,
                           std::span<const field::Fe> r_vec, field::Fe offset,
                           std::int64_t t_send);

// Applies the configured adversary cell by cell, then stamps the arrival
// tick. Channel noise is deferred to measurement.
TransmitResult transmit(const QuantumFrame& frame, const ChannelConfig& cfg,
                        CounterRng& rng);

// Undoes the level shift, measures each row in its announced basis, and
// replaces outcomes uniformly with probability noise_rate. Frames outside
// the timing window are rejected before any measurement.
repcode::MeasurementTable receive_measure(const QuantumFrame& frame,
                                          std::span<const field::Fe> r_vec,
                                          field::Fe offset,
                                          std::int64_t expected_time,
                                          std::int64_t window,
                                          double noise_rate, CounterRng& rng);

// Fraction of key elements where some repetition was intercepted in the
// true basis and the offset-adjusted reading equals the key value.
double eve_key_recovery_rate(const EveRecord& record,
                             const repcode::EncodedGrid& truth,
                             field::Fe offset);

}  // namespace repqkd::qkd
