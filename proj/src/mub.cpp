#include "repqkd/mub.hpp"

#include <cmath>
#include <numbers>

namespace repqkd::mub {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % p);
}

bool in_basis(const QuditState& s, const MeasureBasis& b) {
  if (s.computational != b.computational) return false;
  return s.computational || s.basis == b.family;
}

}  // namespace

OmegaTable::OmegaTable(field::PrimeModulus p) : p_(p.value()) {
  powers_.reserve(p_);
  for (std::uint64_t k = 0; k < p_; ++k) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p_);
    powers_.emplace_back(std::cos(angle), std::sin(angle));
  }
}

StateVector mub_vector(field::Fe j, field::Fe l) {
  field::require_same_modulus(j, l);
  const std::uint64_t p = j.modulus().value();
  const OmegaTable omega(j.modulus());
  const double norm = 1.0 / std::sqrt(static_cast<double>(p));
  StateVector v;
  v.reserve(p);
  for (std::uint64_t k = 0; k < p; ++k) {
    // exponent k(l + jk), reduced mod p before the table lookup
    const std::uint64_t e = mul_mod(k, (l.value() + mul_mod(j.value(), k, p)) % p, p);
    v.push_back(norm * omega.power(e));
  }
  return v;
}

StateVector computational_vector(field::Fe l) {
  StateVector v(l.modulus().value(), {0.0, 0.0});
  v[static_cast<std::size_t>(l.value())] = {1.0, 0.0};
  return v;
}

StateVector to_vector(const QuditState& s) {
  return s.computational ? computational_vector(s.level)
                         : mub_vector(s.basis, s.level);
}

double overlap_magnitude(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("state vectors have different dimensions");
  }
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += std::conj(a[k]) * b[k];
  }
  return std::abs(acc);
}

QuditState apply_shift(const QuditState& s, const ShiftOperator& op) {
  if (s.computational) {
    throw ComputationalBasisUnsupported(
        "index shift law only covers the family bases");
  }
  return {s.basis + op.y, s.level + op.x, false};
}

StateVector apply_shift_numeric(const StateVector& v, const ShiftOperator& op) {
  const std::uint64_t p = op.x.modulus().value();
  if (v.size() != p) {
    throw DimensionMismatch("vector dimension does not match operator modulus");
  }
  const OmegaTable omega(op.x.modulus());
  StateVector out;
  out.reserve(p);
  for (std::uint64_t k = 0; k < p; ++k) {
    const std::uint64_t e =
        (mul_mod(op.x.value(), k, p) + mul_mod(op.y.value(), mul_mod(k, k, p), p)) % p;
    out.push_back(v[static_cast<std::size_t>(k)] * omega.power(e));
  }
  return out;
}

std::vector<double> measurement_distribution(const QuditState& s,
                                             const MeasureBasis& basis) {
  const std::uint64_t p = s.level.modulus().value();
  if (in_basis(s, basis)) {
    std::vector<double> dist(p, 0.0);
    dist[static_cast<std::size_t>(s.level.value())] = 1.0;
    return dist;
  }
  return std::vector<double>(p, 1.0 / static_cast<double>(p));
}

std::vector<double> measurement_distribution(const QuditState& s,
                                             field::Fe family_basis) {
  return measurement_distribution(s, MeasureBasis{family_basis, false});
}

field::Fe sample_measurement(const QuditState& s, const MeasureBasis& basis,
                             CounterRng& rng) {
  if (in_basis(s, basis)) return s.level;
  return field::uniform_element(s.level.modulus(), rng);
}

}  // namespace repqkd::mub
