#include "repqkd/field.hpp"

#include <utility>

namespace repqkd::field {

namespace {

bool is_odd_prime(std::uint64_t p) {
  if (p < 3 || p % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= p; d += 2) {
    if (p % d == 0) return false;
  }
  return true;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % p);
}

}  // namespace

PrimeModulus::PrimeModulus(std::uint64_t p) : p_(p) {
  if (p >= (1ULL << 63)) {
    throw BadModulus("modulus must fit in 63 bits");
  }
  if (!is_odd_prime(p)) {
    throw BadModulus("modulus must be an odd prime >= 3, got " +
                     std::to_string(p));
  }
}

Fe Fe::from_int(std::int64_t value, PrimeModulus m) {
  const auto p = static_cast<std::int64_t>(m.value());
  std::int64_t r = value % p;
  if (r < 0) r += p;
  return Fe(static_cast<std::uint64_t>(r), m);
}

void require_same_modulus(const Fe& a, const Fe& b) {
  if (!(a.modulus() == b.modulus())) {
    throw ModulusMismatch("operands use different moduli");
  }
}

Fe operator+(Fe a, Fe b) {
  require_same_modulus(a, b);
  return Fe(a.v_ + b.v_, a.m_);  // both < p < 2^63, no overflow
}

Fe operator-(Fe a, Fe b) {
  require_same_modulus(a, b);
  return Fe(a.v_ + a.m_.value() - b.v_, a.m_);
}

Fe operator*(Fe a, Fe b) {
  require_same_modulus(a, b);
  return Fe(mul_mod(a.v_, b.v_, a.m_.value()), a.m_);
}

Fe Fe::operator-() const { return Fe(m_.value() - v_, m_); }

Fe Fe::inverse() const {
  if (v_ == 0) {
    throw ZeroInverse("zero has no multiplicative inverse");
  }
  // Extended Euclid on (p, v): maintains t-coefficients only.
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(m_.value());
  std::int64_t new_r = static_cast<std::int64_t>(v_);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (t < 0) t += static_cast<std::int64_t>(m_.value());
  return Fe(static_cast<std::uint64_t>(t), m_);
}

std::array<std::uint8_t, 8> Fe::to_bytes() const {
  std::array<std::uint8_t, 8> out{};
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(v_ >> (8 * (7 - i)));
  }
  return out;
}

UniPoly::UniPoly(std::vector<Fe> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) {
    throw FieldError("polynomial needs at least one coefficient");
  }
  for (const Fe& c : coeffs_) require_same_modulus(c, coeffs_.front());
}

Fe UniPoly::eval(Fe x) const {
  require_same_modulus(x, coeffs_.front());
  Fe acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

BiPoly::BiPoly(std::vector<std::vector<Fe>> coefficients)
    : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty() || coeffs_.front().empty()) {
    throw FieldError("coefficient matrix must be non-empty");
  }
  const std::size_t width = coeffs_.front().size();
  for (const auto& row : coeffs_) {
    if (row.size() != width) {
      throw FieldError("coefficient matrix must be rectangular");
    }
    for (const Fe& c : row) require_same_modulus(c, coeffs_.front().front());
  }
}

BiPoly BiPoly::random(Fe constant_term, std::size_t x_terms,
                      std::size_t y_terms, CounterRng& rng) {
  if (x_terms == 0 || y_terms == 0) {
    throw FieldError("degree bounds must be positive");
  }
  const PrimeModulus m = constant_term.modulus();
  std::vector<std::vector<Fe>> rows;
  rows.reserve(x_terms);
  for (std::size_t i = 0; i < x_terms; ++i) {
    std::vector<Fe> row;
    row.reserve(y_terms);
    for (std::size_t j = 0; j < y_terms; ++j) {
      if (i == 0 && j == 0) {
        row.push_back(constant_term);
      } else {
        row.push_back(uniform_element(m, rng));
      }
    }
    rows.push_back(std::move(row));
  }
  return BiPoly(std::move(rows));
}

Fe BiPoly::eval(Fe x, Fe y) const {
  // Horner in x over rows, each row Horner-evaluated in y.
  Fe acc = UniPoly(coeffs_.back()).eval(y);
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
    acc = acc * x + UniPoly(*it).eval(y);
  }
  return acc;
}

UniPoly BiPoly::restrict_x(Fe x0) const {
  require_same_modulus(x0, coeffs_.front().front());
  std::vector<Fe> out;
  out.reserve(y_degree_bound());
  for (std::size_t j = 0; j < y_degree_bound(); ++j) {
    Fe acc = coeffs_.back()[j];
    for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
      acc = acc * x0 + coeffs_[i][j];
    }
    out.push_back(acc);
  }
  return UniPoly(std::move(out));
}

UniPoly BiPoly::restrict_y(Fe y0) const {
  std::vector<Fe> out;
  out.reserve(x_degree_bound());
  for (const auto& row : coeffs_) {
    out.push_back(UniPoly(row).eval(y0));
  }
  return UniPoly(std::move(out));
}

Fe lagrange_weight(std::size_t i, std::span<const Fe> nodes) {
  if (i >= nodes.size()) {
    throw FieldError("node index out of range");
  }
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (nodes[a].value() == 0) throw ZeroNode("nodes must be nonzero");
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (nodes[a] == nodes[b]) throw DuplicateNode("nodes must be distinct");
    }
  }
  Fe w(1, nodes[i].modulus());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j == i) continue;
    w = w * (-nodes[j]) * (nodes[i] - nodes[j]).inverse();
  }
  return w;
}

Fe interpolate_at_zero(std::span<const std::pair<Fe, Fe>> points) {
  if (points.empty()) {
    throw FieldError("need at least one point");
  }
  std::vector<Fe> xs;
  xs.reserve(points.size());
  for (const auto& [x, y] : points) xs.push_back(x);
  Fe acc(0, points.front().first.modulus());
  for (std::size_t i = 0; i < points.size(); ++i) {
    acc = acc + points[i].second * lagrange_weight(i, xs);
  }
  return acc;
}

Fe uniform_element(PrimeModulus m, CounterRng& rng) {
  return Fe(rng.next_below(m.value()), m);
}

}  // namespace repqkd::field
