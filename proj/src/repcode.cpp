#include "repqkd/repcode.hpp"

#include <algorithm>

namespace repqkd::repcode {

Grid::Grid(std::uint32_t rows, std::uint32_t m, field::Fe fill)
    : rows_(rows), m_(m) {
  if (rows == 0 || m == 0) {
    throw ShapeMismatch("grid needs at least one row and one block");
  }
  cells_.assign(static_cast<std::size_t>(rows) * m * 3, fill);
}

std::size_t Grid::offset(std::uint32_t k, std::uint32_t i,
                         std::uint32_t j) const {
  if (k < 1 || k > rows_ || i < 1 || i > m_ || j < 1 || j > 3) {
    throw ShapeMismatch("cell coordinates out of range");
  }
  return (static_cast<std::size_t>(k - 1) * m_ + (i - 1)) * 3 + (j - 1);
}

EncodedGrid encode(const KeySequence& key) {
  if (key.elements.size() !=
      static_cast<std::size_t>(key.m) * key.rows) {
    throw LengthMismatch("key length must equal m * rows");
  }
  EncodedGrid grid(key.rows, key.m, key.elements.front());
  for (std::uint32_t k = 1; k <= key.rows; ++k) {
    for (std::uint32_t i = 1; i <= key.m; ++i) {
      const field::Fe v = key.elements[key_index(k, i, key.m) - 1];
      for (std::uint32_t j = 1; j <= 3; ++j) grid.set(k, i, j, v);
    }
  }
  return grid;
}

KeySequence decode(const EncodedGrid& grid) {
  KeySequence key;
  key.m = grid.blocks();
  key.rows = grid.rows();
  key.elements.reserve(static_cast<std::size_t>(key.m) * key.rows);
  for (std::uint32_t k = 1; k <= key.rows; ++k) {
    for (std::uint32_t i = 1; i <= key.m; ++i) {
      const field::Fe a = grid.at(k, i, 1);
      const field::Fe b = grid.at(k, i, 2);
      const field::Fe c = grid.at(k, i, 3);
      key.elements.push_back(b == c ? b : a);  // majority, ties to first
    }
  }
  return key;
}

TripleClass classify_triple(field::Fe a, field::Fe b, field::Fe c) {
  const int equal_pairs = (a == b) + (a == c) + (b == c);
  if (equal_pairs == 3) return TripleClass::AllEqual;
  if (equal_pairs == 1) return TripleClass::TwoEqual;
  return TripleClass::AllDistinct;
}

TripleClassification classify(const MeasurementTable& table) {
  TripleClassification out;
  for (std::uint32_t k = 1; k <= table.rows(); ++k) {
    for (std::uint32_t i = 1; i <= table.blocks(); ++i) {
      switch (classify_triple(table.at(k, i, 1), table.at(k, i, 2),
                              table.at(k, i, 3))) {
        case TripleClass::AllEqual:
          out.all_equal.emplace_back(k, i);
          break;
        case TripleClass::TwoEqual:
          out.two_equal.emplace_back(k, i);
          break;
        case TripleClass::AllDistinct:
          out.all_distinct.emplace_back(k, i);
          break;
      }
    }
  }
  return out;
}

RoundDecision threshold_decision(const TripleClassification& c, double eps1,
                                 double eps2) {
  const double total = static_cast<double>(c.total());
  if (c.total() == 0) {
    throw ShapeMismatch("cannot decide on an empty classification");
  }
  const double unanimous = static_cast<double>(c.all_equal.size()) / total;
  const double distinct = static_cast<double>(c.all_distinct.size()) / total;
  return (unanimous >= eps1 && distinct <= eps2) ? RoundDecision::Keep
                                                 : RoundDecision::Abort;
}

std::vector<IndexTriple> HarvestState::index_set() const {
  std::vector<IndexTriple> out;
  out.reserve(entries.size());
  for (const auto& [triple, value] : entries) out.push_back(triple);
  return out;
}

std::vector<field::Fe> HarvestState::value_list() const {
  std::vector<field::Fe> out;
  out.reserve(entries.size());
  for (const auto& [triple, value] : entries) out.push_back(value);
  return out;
}

HarvestState harvest_s3(const TripleClassification& c,
                        const MeasurementTable& table) {
  HarvestState state;
  for (const auto& [k, i] : c.all_equal) {
    state.entries.emplace(IndexTriple{k, i, 1}, table.at(k, i, 1));
  }
  for (const auto& [k, i] : c.two_equal) {
    const field::Fe a = table.at(k, i, 1);
    const field::Fe b = table.at(k, i, 2);
    const field::Fe c3 = table.at(k, i, 3);
    // majority value and the least repetition index holding it
    if (a == b || a == c3) {
      state.pending.push_back({IndexTriple{k, i, 1}, a});
    } else {
      state.pending.push_back({IndexTriple{k, i, 2}, b});
    }
  }
  std::sort(state.pending.begin(), state.pending.end(),
            [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });
  return state;
}

void extend(HarvestState& state, const ExtendVerifier& verifier) {
  if (!verifier) {
    throw VerifierUnavailable("no dealer confirmation callback");
  }
  for (const auto& [triple, candidate] : state.pending) {
    HarvestView tentative = state.entries;
    tentative.emplace(triple, candidate);
    if (verifier(tentative) == VerifierReply::Confirmed) {
      state.entries = std::move(tentative);
    }
  }
  state.pending.clear();
}

std::map<std::uint32_t, field::Fe> harvested_values(const HarvestState& state,
                                                    std::uint32_t m) {
  std::map<std::uint32_t, field::Fe> out;
  for (const auto& [triple, value] : state.entries) {
    out.emplace(key_index(triple.k, triple.i, m), value);
  }
  return out;
}

std::vector<std::uint32_t> residual_indices(const HarvestState& state,
                                            std::uint32_t m,
                                            std::uint32_t total) {
  const auto have = harvested_values(state, m);
  std::vector<std::uint32_t> out;
  for (std::uint32_t idx = 1; idx <= total; ++idx) {
    if (!have.contains(idx)) out.push_back(idx);
  }
  return out;
}

PackedRound pack_residual(std::span<const std::uint32_t> indices,
                          std::span<const field::Fe> values,
                          std::uint32_t rows, field::PrimeModulus p,
                          CounterRng& rng) {
  if (indices.empty() || indices.size() != values.size()) {
    throw LengthMismatch("residual indices and values must align");
  }
  const std::uint32_t m =
      static_cast<std::uint32_t>((indices.size() + rows - 1) / rows);
  const std::size_t cells = static_cast<std::size_t>(m) * rows;

  PackedRound out;
  out.sequence.m = m;
  out.sequence.rows = rows;
  out.sequence.elements.reserve(cells);
  out.cell_index.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    if (c < indices.size()) {
      out.sequence.elements.push_back(values[c]);
      out.cell_index.push_back(indices[c]);
    } else {
      out.sequence.elements.push_back(field::uniform_element(p, rng));
      out.cell_index.push_back(0);
    }
  }
  return out;
}

}  // namespace repqkd::repcode
