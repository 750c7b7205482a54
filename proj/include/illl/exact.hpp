#pragma once

// Exact integer/rational arithmetic on top of GMP, plus the handful of
// primitives the rest of the library needs: nearest-integer distance,
// dyadic rounding, integer roots and comparisons of fractional powers.
//
// No floating point is used in this module except in the explicitly named
// *_to_double reporting helpers.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace illl {

using Integer = mpz_class;
using Rational = mpq_class;

using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// rows x cols grid with dimensions fixed at construction.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Grid<Integer>;
using RatMatrix = Grid<Rational>;

Rational make_rational(const Integer& num, const Integer& den);

/// Parses "a", "-a" or "a/b" (canonicalizes; rejects zero denominators).
Rational parse_rational(const std::string& text);
Integer parse_integer(const std::string& text);
std::string to_string(const Integer& x);
std::string to_string(const Rational& x);

Integer floor(const Rational& x);
Integer ceil(const Rational& x);

/// ‖x‖: distance from x to the nearest integer, in [0, 1/2].
Rational nearest_integer_distance(const Rational& x);

/// Nearest integer; a fractional part of exactly 1/2 rounds to the even neighbour.
Integer nearest_integer(const Rational& x);

Integer pow2(unsigned long e);
/// 2^e for any machine-size e (negative exponents give 1/2^-e).
Rational pow2q(long e);
/// x^e for any machine-size exponent; x must be nonzero when e < 0.
Rational pow(const Rational& x, long e);
Integer pow(const Integer& x, long e);  // e >= 0

/// ⌈2^M x⌉ / 2^M for x > 0.
Rational dyadic_ceil(const Rational& x, unsigned long M);

/// Largest N ≥ 0 with N^k ≤ x, for x ≥ 0 and k ≥ 1.
Integer floor_root(const Rational& x, unsigned long k);
/// Smallest N ≥ 0 with N^k ≥ x, for x ≥ 0 and k ≥ 1.
Integer ceil_root(const Rational& x, unsigned long k);

/// ⌈2^(M + e_num/e_den)⌉ computed by integer root isolation.
Integer ceil_pow2_rational_exponent(const Integer& e_num, const Integer& e_den, unsigned long M);

/// Compares a^(1/p) with b^(1/q) for a, b ≥ 0 by comparing a^q with b^p.
std::strong_ordering cmp_power(const Rational& a, unsigned long p, const Rational& b,
                               unsigned long q);

/// A nonnegative real stored as the pair (base, degree) with value^degree == base.
/// Used to carry quantities such as 2^(5/4)·γ^(3/2) without rounding.
struct PoweredValue {
  Rational base;
  unsigned long degree = 1;

  static PoweredValue exact(const Rational& x);
  /// 2^(num/den) as a powered value.
  static PoweredValue pow2(long num, unsigned long den);

  /// Product of two powered values (degrees combined through their lcm).
  PoweredValue operator*(const PoweredValue& other) const;
  /// value^(num/den) for num possibly negative.
  PoweredValue raised(long num, unsigned long den) const;

  /// Same value expressed with degree multiplied by `factor`.
  PoweredValue with_degree_multiple(unsigned long factor) const;

  bool is_zero() const { return sgn(base) == 0; }
  /// Lower and upper dyadic bounds with `bits` fractional bits.
  Rational lower_bound(unsigned long bits) const;
  Rational upper_bound(unsigned long bits) const;
  /// True when the value is rational; `out` then receives it.
  bool as_rational(Rational& out) const;

  double to_double() const;
};

std::strong_ordering compare(const PoweredValue& a, const PoweredValue& b);

/// Exact comparison of a single powered value against a sum of powered values.
/// Irrational terms are bracketed by dyadic bounds refined until the order is
/// decided; all-rational inputs are compared directly.
std::strong_ordering compare_with_sum(const PoweredValue& x, std::span<const PoweredValue> terms);

double to_double(const Rational& x);
double to_double(const Integer& x);
/// Natural logarithm of a positive integer of any size.
double log_abs(const Integer& x);

}  // namespace illl
