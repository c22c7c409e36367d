#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "repqkd/field.hpp"
#include "repqkd/rng.hpp"

namespace repqkd::repcode {

struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerifierUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All protocol coordinates are 1-based: row k in 1..rows, block i in 1..m,
// repetition j in 1..3. Key element (k, i) sits at global index (k-1)m + i.
struct IndexTriple {
  std::uint32_t k = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  friend auto operator<=>(const IndexTriple&, const IndexTriple&) = default;
};

inline std::uint32_t key_index(std::uint32_t k, std::uint32_t i,
                               std::uint32_t m) {
  return (k - 1) * m + i;
}
inline std::pair<std::uint32_t, std::uint32_t> cell_of_index(std::uint32_t idx,
                                                             std::uint32_t m) {
  return {(idx - 1) / m + 1, (idx - 1) % m + 1};
}

struct KeySequence {
  std::vector<field::Fe> elements;  // length m * rows, index (k-1)m + i
  std::uint32_t m = 0;
  std::uint32_t rows = 0;
};

// rows x m blocks of three repetitions; at()/set() take the 1-based
// protocol coordinates above.
class Grid {
 public:
  Grid(std::uint32_t rows, std::uint32_t m, field::Fe fill);

  field::Fe at(std::uint32_t k, std::uint32_t i, std::uint32_t j) const {
    return cells_[offset(k, i, j)];
  }
  void set(std::uint32_t k, std::uint32_t i, std::uint32_t j, field::Fe v) {
    cells_[offset(k, i, j)] = v;
  }
  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t blocks() const noexcept { return m_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  field::PrimeModulus modulus() const noexcept {
    return cells_.front().modulus();
  }

 private:
  std::size_t offset(std::uint32_t k, std::uint32_t i, std::uint32_t j) const;

  std::uint32_t rows_;
  std::uint32_t m_;
  std::vector<field::Fe> cells_;
};

using EncodedGrid = Grid;
using MeasurementTable = Grid;

EncodedGrid encode(const KeySequence& key);
// Majority vote per triple (first repetition on a three-way tie); the
// round-trip inverse of encode on clean grids.
KeySequence decode(const EncodedGrid& grid);

enum class TripleClass { AllDistinct, TwoEqual, AllEqual };
TripleClass classify_triple(field::Fe a, field::Fe b, field::Fe c);

struct TripleClassification {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all_distinct;  // S1
  std::vector<std::pair<std::uint32_t, std::uint32_t>> two_equal;     // S2
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all_equal;     // S3
  std::size_t total() const {
    return all_distinct.size() + two_equal.size() + all_equal.size();
  }
};

TripleClassification classify(const MeasurementTable& table);

enum class RoundDecision { Keep, Abort };

// Keep iff |S3|/total >= eps1 and |S1|/total <= eps2 (both non-strict).
RoundDecision threshold_decision(const TripleClassification& c, double eps1,
                                 double eps2);

enum class VerifierReply { Confirmed, Rejected, NoResponse };

// Sorted harvested set: keys are the index set S, values the sequence I.
using HarvestView = std::map<IndexTriple, field::Fe>;

struct HarvestState {
  HarvestView entries;
  // candidates from two-equal triples, lexicographic (k, i, j) order
  std::vector<std::pair<IndexTriple, field::Fe>> pending;

  std::vector<IndexTriple> index_set() const;
  std::vector<field::Fe> value_list() const;
};

// Unanimous triples enter directly as (k, i, 1); each two-equal triple
// queues its majority value at the least repetition index holding it.
HarvestState harvest_s3(const TripleClassification& c,
                        const MeasurementTable& table);

using ExtendVerifier = std::function<VerifierReply(const HarvestView&)>;

// Processes pending candidates in order: each is tentatively added and
// kept only when the verifier confirms the grown set; no reply counts as
// rejection. Verified entries are never removed.
void extend(HarvestState& state, const ExtendVerifier& verifier);

std::map<std::uint32_t, field::Fe> harvested_values(const HarvestState& state,
                                                    std::uint32_t m);
std::vector<std::uint32_t> residual_indices(const HarvestState& state,
                                            std::uint32_t m,
                                            std::uint32_t total);

// Row-major packing of residual elements into a fresh rows x m' grid with
// m' = ceil(count / rows); tail cells carry generator filler. cell_index
// maps each flat cell (1-based) to its original key index, 0 for padding.
struct PackedRound {
  KeySequence sequence;
  std::vector<std::uint32_t> cell_index;
};

PackedRound pack_residual(std::span<const std::uint32_t> indices,
                          std::span<const field::Fe> values,
                          std::uint32_t rows, field::PrimeModulus p,
                          CounterRng& rng);

}  // namespace repqkd::repcode
