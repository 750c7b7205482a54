#include "illl/illl.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace illl {

namespace {

bool is_power_of_two(const Integer& x, unsigned long& exponent) {
  if (x <= 0 || mpz_popcount(x.get_mpz_t()) != 1) return false;
  exponent = mpz_scan1(x.get_mpz_t(), 0);
  return true;
}

Integer scaled_chat(const Rational& chat, const ProblemInstance& instance) {
  Rational scaled = chat * Rational(pow2(instance.M));
  if (scaled.get_den() != 1 || sgn(scaled) <= 0) {
    throw ContractViolation("ĉ must be a positive multiple of 2^-M");
  }
  return scaled.get_num();
}

}  // namespace

Rational ProblemInstance::a(std::size_t i, std::size_t j) const {
  return make_rational(P(i, j), pow2(M));
}

Integer ApproxRecord::height() const {
  Integer h = 0;
  for (const auto& x : q) {
    if (abs(x) > h) h = abs(x);
  }
  return h;
}

void validate(const ProblemInstance& instance) {
  if (instance.m < 1 || instance.n < 1) throw InvalidInstance("m and n must be positive");
  if (instance.M < 1) throw InvalidInstance("M must be positive");
  if (instance.P.rows() != static_cast<std::size_t>(instance.n) ||
      instance.P.cols() != static_cast<std::size_t>(instance.m)) {
    throw InvalidInstance("A must have n rows and m columns");
  }
  const Integer top = pow2(instance.M);
  for (std::size_t i = 0; i < instance.P.rows(); ++i) {
    for (std::size_t j = 0; j < instance.P.cols(); ++j) {
      const Integer& p = instance.P(i, j);
      if (p < 1 || p > top) {
        throw InvalidInstance("entry p_" + std::to_string(i + 1) + std::to_string(j + 1) + " = " +
                              to_string(p) + " outside [1, 2^M]");
      }
    }
  }
  if (instance.q_max <= 1) throw InvalidInstance("q_max must exceed 1");
  if (instance.q_max >= top) {
    throw InvalidInstance("q_max must be below 2^M (M = " + std::to_string(instance.M) +
                          " is too small for q_max = " + to_string(instance.q_max) + ")");
  }
  if (instance.d <= 1) throw InvalidInstance("d must exceed 1");
}

unsigned long recommended_precision(int m, int n, const Rational& d) {
  double log2d = (log_abs(Integer(d.get_num())) - log_abs(Integer(d.get_den()))) / std::log(2.0);
  double r = m + n;
  double value = 4.0 * (r * r / m + r / m * log2d) + 64.0;
  return static_cast<unsigned long>(std::ceil(value - 1e-9));
}

std::vector<std::string> precision_warnings(const ProblemInstance& instance) {
  std::vector<std::string> out;
  unsigned long rec = recommended_precision(instance.m, instance.n, instance.d);
  if (instance.M < rec) {
    out.push_back("M = " + std::to_string(instance.M) + " is below the recommended precision " +
                  std::to_string(rec) + "; rounding slack is not negligible");
  }
  Schedule s = make_schedule(instance);
  if (s.stalled_at) {
    out.push_back("ĉ schedule stalls at k = " + std::to_string(*s.stalled_at) +
                  " (precision exhausted; later iterations reuse the same lattice scale)");
  }
  return out;
}

Rational initial_chat(const ProblemInstance& instance) {
  const long m = instance.m;
  const long r = instance.m + instance.n;
  const Integer dn = instance.d.get_num();
  const Integer dd = instance.d.get_den();
  unsigned long t = 0;
  Integer numer;
  if (dd == 1 && is_power_of_two(dn, t)) {
    // c = 2^(-((m+n-1)(m+n) + 4t(m+n)) / (4m))
    Integer e_num = -((r - 1) * r + 4 * static_cast<long>(t) * r);
    numer = ceil_pow2_rational_exponent(e_num, Integer(4 * m), instance.M);
  } else {
    // N^(4m) ≥ 2^(4mM) · dd^(4(m+n)) / (dn^(4(m+n)) · 2^((m+n-1)(m+n)))
    Rational target = Rational(pow2(4 * m * instance.M)) * Rational(pow(dd, 4 * r)) /
                      (Rational(pow(dn, 4 * r)) * Rational(pow2((r - 1) * r)));
    numer = ceil_root(target, 4 * m);
  }
  return make_rational(numer, pow2(instance.M));
}

Rational step_chat(const Rational& chat_prev, const ProblemInstance& instance) {
  const long m = instance.m;
  const long r = instance.m + instance.n;
  Integer C = scaled_chat(chat_prev, instance);
  // N^m ≥ C^m · (dd/dn)^(m+n)
  Rational target = Rational(pow(C, m)) * pow(instance.d, -r);
  return make_rational(ceil_root(target, m), pow2(instance.M));
}

int num_iterations(const ProblemInstance& instance) {
  const long m = instance.m;
  const long n = instance.n;
  const long r = m + n;
  // Smallest k ≥ 1 with 2^((m+n-1)(m+n)) · dn^(4kn) ≥ q_max^(4m) · dd^(4kn).
  const Integer step_l = pow(Integer(instance.d.get_num()), 4 * n);
  const Integer step_r = pow(Integer(instance.d.get_den()), 4 * n);
  Integer lhs = pow2((r - 1) * r) * step_l;
  Integer rhs = pow(instance.q_max, 4 * m) * step_r;
  int k = 1;
  while (lhs < rhs) {
    lhs *= step_l;
    rhs *= step_r;
    ++k;
  }
  return k;
}

Schedule make_schedule(const ProblemInstance& instance) {
  Schedule s;
  s.kprime = num_iterations(instance);
  s.chat.reserve(s.kprime);
  s.chat.push_back(initial_chat(instance));
  for (int k = 2; k <= s.kprime; ++k) {
    Rational next = step_chat(s.chat.back(), instance);
    if (next == s.chat.back() && !s.stalled_at) s.stalled_at = k;
    s.chat.push_back(std::move(next));
  }
  return s;
}

PoweredValue ideal_c(const ProblemInstance& instance, int k) {
  const long r = instance.m + instance.n;
  Rational base = pow2q(-(r - 1) * r) * pow(instance.d, -4L * k * r);
  return {base, static_cast<unsigned long>(4 * instance.m)};
}

IntBasis build_embedding(const ProblemInstance& instance, const Rational& chat) {
  const std::size_t m = instance.m;
  const std::size_t n = instance.n;
  const std::size_t r = m + n;
  const Integer scale = pow2(instance.M);
  const Integer C = scaled_chat(chat, instance);
  IntBasis basis(r, IntVector(r));
  for (std::size_t i = 0; i < n; ++i) basis[i][i] = scale;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) basis[n + j][i] = instance.P(i, j);
    basis[n + j][n + j] = C;
  }
  return basis;
}

ApproxRecord extract_record(const IntVector& vector, const Rational& chat,
                            const ProblemInstance& instance, int k) {
  const std::size_t m = instance.m;
  const std::size_t n = instance.n;
  if (vector.size() != m + n) throw ContractViolation("lattice vector has wrong length");
  const Integer C = scaled_chat(chat, instance);
  const Integer scale = pow2(instance.M);

  ApproxRecord rec;
  rec.k = k;
  rec.q.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (!mpz_divisible_p(vector[n + j].get_mpz_t(), C.get_mpz_t())) {
      throw InvariantViolation("lattice vector coordinate not divisible by 2^M·ĉ");
    }
    mpz_divexact(rec.q[j].get_mpz_t(), vector[n + j].get_mpz_t(), C.get_mpz_t());
  }
  bool all_zero = true;
  for (const auto& x : rec.q) all_zero = all_zero && x == 0;
  if (all_zero) throw InvariantViolation("first reduced vector has zero q-part");

  // Canonical sign: first nonzero q_j positive.
  int sign = 1;
  for (const auto& x : rec.q) {
    if (x != 0) {
      sign = sgn(x);
      break;
    }
  }

  rec.p.resize(n);
  rec.residuals.resize(n);
  rec.maxerr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Integer lin = 0;
    for (std::size_t j = 0; j < m; ++j) lin += instance.P(i, j) * rec.q[j];
    Integer diff = lin - vector[i];
    if (!mpz_divisible_p(diff.get_mpz_t(), scale.get_mpz_t())) {
      throw InvariantViolation("lattice vector top coordinate inconsistent with A");
    }
    mpz_divexact(rec.p[i].get_mpz_t(), diff.get_mpz_t(), scale.get_mpz_t());
    if (sign < 0) {
      lin = -lin;
      rec.p[i] = -rec.p[i];
    }
    Rational value = make_rational(lin, scale);
    rec.residuals[i] = value - Rational(rec.p[i]);
    Rational err = nearest_integer_distance(value);
    if (err > rec.maxerr) rec.maxerr = err;
  }
  if (sign < 0) {
    for (auto& x : rec.q) x = -x;
  }

  Integer g = 0;
  for (const auto& x : rec.q) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  rec.coprime = g == 1;
  return rec;
}

void dedup(std::vector<ApproxRecord>& records) {
  std::set<IntVector> seen;
  for (auto& rec : records) {
    IntVector key = rec.q;
    auto lead = std::find_if(key.begin(), key.end(), [](const Integer& x) { return x != 0; });
    if (lead != key.end() && *lead < 0) {
      for (auto& x : key) x = -x;
    }
    rec.duplicate = !seen.insert(std::move(key)).second;
  }
}

RunResult run_illl(const ProblemInstance& instance, const RunOptions& options) {
  validate(instance);
  RunResult result;
  result.instance = instance;
  result.schedule = make_schedule(instance);
  result.diagnostics = precision_warnings(instance);

  const std::size_t m = instance.m;
  const std::size_t n = instance.n;
  const int kprime = result.schedule.kprime;
  const auto& chat = result.schedule.chat;

  IntBasis basis = build_embedding(instance, chat[0]);
  result.records.reserve(kprime);
  for (int k = 1; k <= kprime; ++k) {
    bool reduce = true;
    if (options.fault == FaultInjection::skip_last_reduction && k == kprime && k > 1) reduce = false;
    if (options.fault == FaultInjection::freeze_after_first && k > 1) reduce = false;

    LllStats stats;
    if (reduce) stats = lll_reduce_in_place(basis, nullptr, options.lll);
    result.stats += stats;
    result.per_iteration.push_back(stats);
    result.records.push_back(extract_record(basis[0], chat[k - 1], instance, k));

    if (k == kprime) break;
    if (options.warm_start) {
      // Last m coordinates of every column are 2^M·ĉ(k)·q_j; move them to ĉ(k+1).
      const Integer C_now = scaled_chat(chat[k - 1], instance);
      const Integer C_next = scaled_chat(chat[k], instance);
      for (auto& col : basis) {
        for (std::size_t j = 0; j < m; ++j) {
          Integer& x = col[n + j];
          if (!mpz_divisible_p(x.get_mpz_t(), C_now.get_mpz_t())) {
            throw InvariantViolation("basis coordinate not divisible by 2^M·ĉ during rescale");
          }
          mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), C_now.get_mpz_t());
          x *= C_next;
        }
      }
    } else {
      basis = build_embedding(instance, chat[k]);
    }
  }
  dedup(result.records);
  return result;
}

}  // namespace illl
