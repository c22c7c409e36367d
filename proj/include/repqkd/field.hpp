#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "repqkd/rng.hpp"

namespace repqkd::field {

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadModulus : FieldError {
  using FieldError::FieldError;
};
struct ModulusMismatch : FieldError {
  using FieldError::FieldError;
};
struct ZeroInverse : FieldError {
  using FieldError::FieldError;
};
struct DuplicateNode : FieldError {
  using FieldError::FieldError;
};
struct ZeroNode : FieldError {
  using FieldError::FieldError;
};

// An odd prime p >= 3, checked by deterministic trial division at
// construction. Intended for small simulation moduli; construction cost
// grows as sqrt(p).
class PrimeModulus {
 public:
  explicit PrimeModulus(std::uint64_t p);

  std::uint64_t value() const noexcept { return p_; }
  friend bool operator==(const PrimeModulus&, const PrimeModulus&) = default;

 private:
  std::uint64_t p_;
};

// Residue mod p, always held as the canonical representative in [0, p-1].
class Fe {
 public:
  Fe(std::uint64_t value, PrimeModulus m) : v_(value % m.value()), m_(m) {}

  static Fe from_int(std::int64_t value, PrimeModulus m);

  std::uint64_t value() const noexcept { return v_; }
  PrimeModulus modulus() const noexcept { return m_; }

  Fe inverse() const;  // extended Euclid; throws ZeroInverse on 0

  // Canonical byte form: 8-byte big-endian value. Hash inputs and wire
  // payloads use exactly this encoding.
  std::array<std::uint8_t, 8> to_bytes() const;

  friend Fe operator+(Fe a, Fe b);
  friend Fe operator-(Fe a, Fe b);
  friend Fe operator*(Fe a, Fe b);
  Fe operator-() const;

  friend bool operator==(const Fe& a, const Fe& b) {
    return a.v_ == b.v_ && a.m_ == b.m_;
  }

 private:
  std::uint64_t v_;
  PrimeModulus m_;
};

void require_same_modulus(const Fe& a, const Fe& b);

// Univariate polynomial, coefficients low degree first (never empty; the
// zero polynomial is {0}). All coefficients share one modulus.
class UniPoly {
 public:
  explicit UniPoly(std::vector<Fe> coefficients);

  Fe eval(Fe x) const;  // Horner

  const std::vector<Fe>& coefficients() const noexcept { return coeffs_; }
  PrimeModulus modulus() const noexcept { return coeffs_.front().modulus(); }
  std::size_t degree_bound() const noexcept { return coeffs_.size(); }

  friend bool operator==(const UniPoly&, const UniPoly&) = default;

 private:
  std::vector<Fe> coeffs_;
};

// Bivariate polynomial with coefficient matrix a[i][j] on x^i y^j,
// i < x_degree_bound, j < y_degree_bound. Rows must be rectangular.
class BiPoly {
 public:
  explicit BiPoly(std::vector<std::vector<Fe>> coefficients);

  static BiPoly random(Fe constant_term, std::size_t x_terms,
                       std::size_t y_terms, CounterRng& rng);

  Fe eval(Fe x, Fe y) const;
  UniPoly restrict_x(Fe x0) const;  // F(x0, y), polynomial in y
  UniPoly restrict_y(Fe y0) const;  // F(x, y0), polynomial in x

  Fe at(std::size_t i, std::size_t j) const { return coeffs_[i][j]; }
  std::size_t x_degree_bound() const noexcept { return coeffs_.size(); }
  std::size_t y_degree_bound() const noexcept { return coeffs_.front().size(); }
  PrimeModulus modulus() const noexcept {
    return coeffs_.front().front().modulus();
  }

  friend bool operator==(const BiPoly&, const BiPoly&) = default;

 private:
  std::vector<std::vector<Fe>> coeffs_;
};

// Product over j != i of (-x_j) * (x_i - x_j)^-1. Nodes must be pairwise
// distinct and nonzero.
Fe lagrange_weight(std::size_t i, std::span<const Fe> nodes);

// Value at zero of the unique interpolating polynomial through the given
// points (distinct nonzero abscissas).
Fe interpolate_at_zero(std::span<const std::pair<Fe, Fe>> points);

Fe uniform_element(PrimeModulus m, CounterRng& rng);

}  // namespace repqkd::field
