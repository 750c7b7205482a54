#include "illl/exact.hpp"

#include <cmath>
#include <numeric>

namespace illl {

namespace {

bool parse_mpz(const std::string& text, Integer& out) {
  if (text.empty()) return false;
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) return false;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  std::string digits = text[0] == '+' ? text.substr(1) : text;
  return out.set_str(digits, 10) == 0;
}

// Exact k-th root of a nonnegative integer if there is one.
bool exact_root(const Integer& x, unsigned long k, Integer& root) {
  return mpz_root(root.get_mpz_t(), x.get_mpz_t(), k) != 0;
}

}  // namespace

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw ContractViolation("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer parse_integer(const std::string& text) {
  Integer out;
  if (!parse_mpz(text, out)) throw Error("not an integer: '" + text + "'");
  return out;
}

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_integer(text));
  Integer num = parse_integer(text.substr(0, slash));
  Integer den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw Error("zero denominator in '" + text + "'");
  return make_rational(num, den);
}

std::string to_string(const Integer& x) { return x.get_str(10); }

std::string to_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str(10);
  return x.get_num().get_str(10) + "/" + x.get_den().get_str(10);
}

Integer floor(const Rational& x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& x) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Rational nearest_integer_distance(const Rational& x) {
  Rational frac = x - Rational(floor(x));
  Rational other = 1 - frac;
  return frac <= other ? frac : other;
}

Integer nearest_integer(const Rational& x) {
  Integer base = floor(x);
  Rational twice_frac = 2 * (x - Rational(base));
  int c = cmp(twice_frac, 1);
  if (c < 0) return base;
  if (c > 0) return base + 1;
  return mpz_even_p(base.get_mpz_t()) ? base : Integer(base + 1);
}

Integer pow2(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

Rational pow2q(long e) {
  if (e >= 0) return Rational(pow2(static_cast<unsigned long>(e)));
  return Rational(Integer(1), pow2(static_cast<unsigned long>(-e)));
}

Integer pow(const Integer& x, long e) {
  if (e < 0) throw ContractViolation("negative exponent for an integer power");
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

Rational pow(const Rational& x, long e) {
  unsigned long ae = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  Integer num = pow(Integer(x.get_num()), static_cast<long>(ae));
  Integer den = pow(Integer(x.get_den()), ae);
  if (e < 0) {
    if (num == 0) throw ContractViolation("negative power of zero");
    return make_rational(den, num);
  }
  return make_rational(num, den);
}

Rational dyadic_ceil(const Rational& x, unsigned long M) {
  if (sgn(x) <= 0) throw ContractViolation("dyadic_ceil requires x > 0");
  Integer scale = pow2(M);
  return make_rational(ceil(x * scale), scale);
}

Integer floor_root(const Rational& x, unsigned long k) {
  if (sgn(x) < 0 || k == 0) throw ContractViolation("floor_root requires x >= 0 and k >= 1");
  Integer t = floor(x);
  Integer r;
  mpz_root(r.get_mpz_t(), t.get_mpz_t(), k);
  return r;
}

Integer ceil_root(const Rational& x, unsigned long k) {
  if (sgn(x) < 0 || k == 0) throw ContractViolation("ceil_root requires x >= 0 and k >= 1");
  // N^k >= x  <=>  N^k >= ceil(x) since N^k is an integer.
  Integer t = ceil(x);
  Integer r;
  if (exact_root(t, k, r)) return r;
  return r + 1;
}

Integer ceil_pow2_rational_exponent(const Integer& e_num, const Integer& e_den, unsigned long M) {
  if (e_den < 1) throw ContractViolation("exponent denominator must be >= 1");
  if (!e_num.fits_slong_p() || !e_den.fits_ulong_p()) {
    throw ContractViolation("exponent out of machine range");
  }
  unsigned long den = e_den.get_ui();
  long exponent = static_cast<long>(M * den) + e_num.get_si();
  return ceil_root(pow2q(exponent), den);
}

std::strong_ordering cmp_power(const Rational& a, unsigned long p, const Rational& b,
                               unsigned long q) {
  if (sgn(a) < 0 || sgn(b) < 0 || p == 0 || q == 0) {
    throw ContractViolation("cmp_power requires a, b >= 0 and p, q >= 1");
  }
  Rational lhs = pow(a, static_cast<long>(q));
  Rational rhs = pow(b, static_cast<long>(p));
  int c = cmp(lhs, rhs);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

PoweredValue PoweredValue::exact(const Rational& x) {
  if (sgn(x) < 0) throw ContractViolation("powered values are nonnegative");
  return {x, 1};
}

PoweredValue PoweredValue::pow2(long num, unsigned long den) {
  if (den == 0) throw ContractViolation("zero exponent denominator");
  long g = std::gcd(num < 0 ? -num : num, static_cast<long>(den));
  if (g == 0) g = 1;
  return {pow2q(num / g), den / static_cast<unsigned long>(g)};
}

PoweredValue PoweredValue::operator*(const PoweredValue& other) const {
  unsigned long l = std::lcm(degree, other.degree);
  Rational b = pow(base, static_cast<long>(l / degree)) *
               pow(other.base, static_cast<long>(l / other.degree));
  return {b, l};
}

PoweredValue PoweredValue::raised(long num, unsigned long den) const {
  if (den == 0) throw ContractViolation("zero exponent denominator");
  if (num < 0 && is_zero()) throw ContractViolation("negative power of zero");
  return {pow(base, num), degree * den};
}

PoweredValue PoweredValue::with_degree_multiple(unsigned long factor) const {
  return {pow(base, static_cast<long>(factor)), degree * factor};
}

Rational PoweredValue::lower_bound(unsigned long bits) const {
  Rational scaled = base * Rational(illl::pow2(bits * degree));
  return make_rational(floor_root(scaled, degree), illl::pow2(bits));
}

Rational PoweredValue::upper_bound(unsigned long bits) const {
  Rational scaled = base * Rational(illl::pow2(bits * degree));
  return make_rational(ceil_root(scaled, degree), illl::pow2(bits));
}

bool PoweredValue::as_rational(Rational& out) const {
  if (degree == 1) {
    out = base;
    return true;
  }
  Integer rn, rd;
  Integer num = base.get_num();
  Integer den = base.get_den();
  if (!exact_root(num, degree, rn) || !exact_root(den, degree, rd)) return false;
  out = make_rational(rn, rd);
  return true;
}

double PoweredValue::to_double() const {
  if (is_zero()) return 0.0;
  double lg = log_abs(Integer(base.get_num())) - log_abs(Integer(base.get_den()));
  return std::exp(lg / static_cast<double>(degree));
}

std::strong_ordering compare(const PoweredValue& a, const PoweredValue& b) {
  return cmp_power(a.base, a.degree, b.base, b.degree);
}

std::strong_ordering compare_with_sum(const PoweredValue& x, std::span<const PoweredValue> terms) {
  if (terms.empty()) return compare(x, PoweredValue::exact(0));
  if (terms.size() == 1) return compare(x, terms[0]);

  Rational xr;
  bool all_rational = x.as_rational(xr);
  Rational sum = 0;
  for (const auto& t : terms) {
    Rational tr;
    if (!t.as_rational(tr)) {
      all_rational = false;
      break;
    }
    sum += tr;
  }
  if (all_rational) {
    int c = cmp(xr, sum);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  for (unsigned long bits = 64; bits <= (1ul << 16); bits *= 2) {
    Rational lo = 0, hi = 0;
    for (const auto& t : terms) {
      lo += t.lower_bound(bits);
      hi += t.upper_bound(bits);
    }
    if (x.upper_bound(bits) < lo) return std::strong_ordering::less;
    if (x.lower_bound(bits) > hi) return std::strong_ordering::greater;
  }
  throw Error("compare_with_sum: order not decided at 65536 bits");
}

double to_double(const Rational& x) { return x.get_d(); }
double to_double(const Integer& x) { return x.get_d(); }

double log_abs(const Integer& x) {
  if (x == 0) throw ContractViolation("log of zero");
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace illl
