#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "repqkd/field.hpp"
#include "repqkd/rng.hpp"

namespace repqkd::mub {

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ComputationalBasisUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Symbolic qudit: the level-index vector of one of the p shift-family
// bases, or a computational-basis vector when the flag is set. The
// channel simulation runs entirely on this form; complex vectors exist
// for validation.
struct QuditState {
  field::Fe basis;  // family index j (ignored when computational)
  field::Fe level;  // level index l
  bool computational = false;
};

using StateVector = std::vector<std::complex<double>>;

// Diagonal phase operator X^x Y^y: maps family state (j, l) to
// (j + y, l + x). Composition adds componentwise.
struct ShiftOperator {
  field::Fe x;  // level shift
  field::Fe y;  // basis shift

  ShiftOperator composed(const ShiftOperator& other) const {
    return {x + other.x, y + other.y};
  }
  ShiftOperator inverted() const { return {-x, -y}; }
};

// p-th roots of unity, built once per modulus and indexed mod p so
// exponents can be reduced exactly before any floating-point lookup.
class OmegaTable {
 public:
  explicit OmegaTable(field::PrimeModulus p);
  std::complex<double> power(std::uint64_t exponent) const {
    return powers_[static_cast<std::size_t>(exponent % p_)];
  }
  std::uint64_t dimension() const noexcept { return p_; }

 private:
  std::uint64_t p_;
  std::vector<std::complex<double>> powers_;
};

// Amplitude at k is omega^{k(l + jk)} / sqrt(p).
StateVector mub_vector(field::Fe j, field::Fe l);
StateVector computational_vector(field::Fe l);
StateVector to_vector(const QuditState& s);

double overlap_magnitude(const StateVector& a, const StateVector& b);

QuditState apply_shift(const QuditState& s, const ShiftOperator& op);

// Multiplies amplitude k by omega^{x k + y k^2}; exact identity with the
// index-level shift on family vectors.
StateVector apply_shift_numeric(const StateVector& v, const ShiftOperator& op);

// Which basis a measurement projects onto.
struct MeasureBasis {
  field::Fe family;
  bool computational = false;
};

// Outcome distribution over F_p: a point mass when the state lives in the
// measurement basis, uniform otherwise (unbiasedness).
std::vector<double> measurement_distribution(const QuditState& s,
                                             const MeasureBasis& basis);
std::vector<double> measurement_distribution(const QuditState& s,
                                             field::Fe family_basis);

field::Fe sample_measurement(const QuditState& s, const MeasureBasis& basis,
                             CounterRng& rng);

}  // namespace repqkd::mub
