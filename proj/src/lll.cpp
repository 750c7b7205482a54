#include "illl/lll.hpp"

#include <algorithm>
#include <utility>

namespace illl {

namespace {

GramSchmidtData gram_schmidt_columns(const Basis& basis) {
  const std::size_t r = basis.size();
  GramSchmidtData gs;
  gs.bstar.reserve(r);
  gs.mu = RatMatrix(r, r);
  gs.bnorm.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    RatVector v = basis[i];
    for (std::size_t j = 0; j < i; ++j) {
      Rational mu = dot(basis[i], gs.bstar[j]) / gs.bnorm[j];
      gs.mu(i, j) = mu;
      for (std::size_t t = 0; t < v.size(); ++t) v[t] -= mu * gs.bstar[j][t];
    }
    Rational norm = dot(v, v);
    if (sgn(norm) == 0) throw DependentBasis("basis columns are linearly dependent");
    gs.bstar.push_back(std::move(v));
    gs.bnorm.push_back(norm);
  }
  return gs;
}

IntMatrix identity(std::size_t r) {
  IntMatrix U(r, r);
  for (std::size_t i = 0; i < r; ++i) U(i, i) = 1;
  return U;
}

// Integral LLL (Cohen, "A Course in Computational Algebraic Number Theory",
// Alg. 2.6.7).  Indices are 1-based: b(k) is column k-1, d[0] = 1 and
// d[k] = Π_{i≤k} |b*_i|², lambda[k][j] = d[j]·μ_kj.
class IntegralLll {
 public:
  IntegralLll(IntBasis& basis, IntMatrix* transform, const LllOptions& options)
      : basis_(basis),
        transform_(transform),
        options_(options),
        r_(basis.size()),
        d_(r_ + 1),
        lambda_(r_ + 1, IntVector(r_ + 1)) {
    d_[0] = 1;
  }

  LllStats run() {
    incorporate(1);
    std::size_t kmax = 1;
    std::size_t k = 2;
    while (k <= r_) {
      if (k > kmax) {
        kmax = k;
        incorporate(k);
      }
      kmax_ = kmax;
      size_reduce(k, k - 1);
      Integer lhs = 4 * d_[k] * d_[k - 2];
      Integer rhs = 3 * d_[k - 1] * d_[k - 1] - 4 * lambda_[k][k - 1] * lambda_[k][k - 1];
      if (lhs < rhs) {
        swap(k, kmax);
        k = std::max<std::size_t>(2, k - 1);
      } else {
        for (std::size_t l = k - 1; l-- > 1;) size_reduce(k, l);
        ++k;
      }
    }
    return stats_;
  }

 private:
  IntVector& b(std::size_t i) { return basis_[i - 1]; }

  void incorporate(std::size_t k) {
    for (std::size_t j = 1; j <= k; ++j) {
      Integer u = dot(b(k), b(j));
      for (std::size_t i = 1; i < j; ++i) {
        u = (d_[i] * u - lambda_[k][i] * lambda_[j][i]);
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d_[i - 1].get_mpz_t());
      }
      if (j < k) {
        lambda_[k][j] = u;
      } else {
        if (u == 0) throw DependentBasis("basis columns are linearly dependent");
        d_[k] = u;
      }
    }
  }

  void size_reduce(std::size_t k, std::size_t l) {
    Integer twice = 2 * abs(lambda_[k][l]);
    if (twice <= d_[l]) return;
    Integer q = nearest_integer(make_rational(lambda_[k][l], d_[l]));
    IntVector& bk = b(k);
    const IntVector& bl = b(l);
    for (std::size_t t = 0; t < bk.size(); ++t) bk[t] -= q * bl[t];
    if (transform_) {
      for (std::size_t t = 0; t < r_; ++t) (*transform_)(t, k - 1) -= q * (*transform_)(t, l - 1);
    }
    lambda_[k][l] -= q * d_[l];
    for (std::size_t i = 1; i < l; ++i) lambda_[k][i] -= q * lambda_[l][i];
    ++stats_.size_reductions;
    if (options_.verify_gram_schmidt) verify();
  }

  void swap(std::size_t k, std::size_t kmax) {
    std::swap(b(k), b(k - 1));
    if (transform_) {
      for (std::size_t t = 0; t < r_; ++t) std::swap((*transform_)(t, k - 1), (*transform_)(t, k - 2));
    }
    for (std::size_t j = 1; j + 1 < k; ++j) std::swap(lambda_[k][j], lambda_[k - 1][j]);
    const Integer lam = lambda_[k][k - 1];
    Integer bnew = d_[k - 2] * d_[k] + lam * lam;
    mpz_divexact(bnew.get_mpz_t(), bnew.get_mpz_t(), d_[k - 1].get_mpz_t());
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      Integer t = lambda_[i][k];
      Integer nk = d_[k] * lambda_[i][k - 1] - lam * t;
      mpz_divexact(nk.get_mpz_t(), nk.get_mpz_t(), d_[k - 1].get_mpz_t());
      Integer nk1 = bnew * t + lam * nk;
      mpz_divexact(nk1.get_mpz_t(), nk1.get_mpz_t(), d_[k].get_mpz_t());
      lambda_[i][k] = std::move(nk);
      lambda_[i][k - 1] = std::move(nk1);
    }
    d_[k - 1] = std::move(bnew);
    ++stats_.swaps;
    if (options_.verify_gram_schmidt) verify();
  }

  void verify() const {
    IntBasis prefix(basis_.begin(), basis_.begin() + static_cast<std::ptrdiff_t>(kmax_));
    GramSchmidtData gs = gram_schmidt_columns(to_rational(prefix));
    for (std::size_t i = 1; i <= kmax_; ++i) {
      if (gs.bnorm[i - 1] != make_rational(d_[i], d_[i - 1])) {
        throw Error("incremental Gram-Schmidt norms diverged from recomputation");
      }
      for (std::size_t j = 1; j < i; ++j) {
        if (gs.mu(i - 1, j - 1) != make_rational(lambda_[i][j], d_[j])) {
          throw Error("incremental Gram-Schmidt coefficients diverged from recomputation");
        }
      }
    }
  }

  IntBasis& basis_;
  IntMatrix* transform_;
  const LllOptions& options_;
  std::size_t r_;
  std::size_t kmax_ = 1;
  IntVector d_;
  std::vector<IntVector> lambda_;
  LllStats stats_;
};

}  // namespace

void check_square(const Basis& basis) {
  if (basis.empty()) throw ContractViolation("empty basis");
  for (const auto& col : basis) {
    if (col.size() != basis.size()) throw ContractViolation("basis must be square");
  }
}

void check_square(const IntBasis& basis) {
  if (basis.empty()) throw ContractViolation("empty basis");
  for (const auto& col : basis) {
    if (col.size() != basis.size()) throw ContractViolation("basis must be square");
  }
}

Basis to_rational(const IntBasis& basis) {
  Basis out;
  out.reserve(basis.size());
  for (const auto& col : basis) out.emplace_back(col.begin(), col.end());
  return out;
}

Rational dot(const RatVector& a, const RatVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Integer dot(const IntVector& a, const IntVector& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  return s;
}

GramSchmidtData gram_schmidt(const Basis& basis) {
  check_square(basis);
  return gram_schmidt_columns(basis);
}

Rational determinant_squared(const Basis& basis) {
  GramSchmidtData gs = gram_schmidt(basis);
  Rational p = 1;
  for (const auto& n : gs.bnorm) p *= n;
  return p;
}

bool is_reduced(const Basis& basis) {
  GramSchmidtData gs = gram_schmidt(basis);
  const std::size_t r = basis.size();
  const Rational half(1, 2);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (abs(gs.mu(i, j)) > half) return false;
    }
  }
  for (std::size_t i = 1; i < r; ++i) {
    const Rational& mu = gs.mu(i, i - 1);
    // |b*_i + μ b*_{i-1}|² = |b*_i|² + μ²|b*_{i-1}|² by orthogonality.
    Rational lhs = gs.bnorm[i] + mu * mu * gs.bnorm[i - 1];
    if (lhs < Rational(3, 4) * gs.bnorm[i - 1]) return false;
  }
  return true;
}

LllStats lll_reduce_in_place(IntBasis& basis, IntMatrix* transform, const LllOptions& options) {
  check_square(basis);
  if (transform) *transform = identity(basis.size());
  IntegralLll engine(basis, transform, options);
  return engine.run();
}

IntLllResult lll_reduce(const IntBasis& basis, const LllOptions& options) {
  IntLllResult result;
  result.basis = basis;
  result.stats = lll_reduce_in_place(result.basis, &result.transform.U, options);
  return result;
}

LllResult lll_reduce(const Basis& basis, const LllOptions& options) {
  check_square(basis);
  Integer scale = 1;
  for (const auto& col : basis) {
    for (const auto& x : col) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), x.get_den_mpz_t());
  }
  IntBasis ints;
  ints.reserve(basis.size());
  for (const auto& col : basis) {
    IntVector v;
    v.reserve(col.size());
    for (const auto& x : col) {
      Rational scaled = x * scale;
      v.push_back(scaled.get_num());
    }
    ints.push_back(std::move(v));
  }
  IntLllResult reduced = lll_reduce(ints, options);
  LllResult out;
  out.transform = std::move(reduced.transform);
  out.stats = reduced.stats;
  out.basis.reserve(basis.size());
  for (const auto& col : reduced.basis) {
    RatVector v;
    v.reserve(col.size());
    for (const auto& x : col) v.push_back(make_rational(x, scale));
    out.basis.push_back(std::move(v));
  }
  return out;
}

Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw ContractViolation("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = std::move(v);
      }
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

Basis apply_transform(const Basis& basis, const IntMatrix& U) {
  const std::size_t r = basis.size();
  Basis out(r, RatVector(basis.empty() ? 0 : basis[0].size()));
  for (std::size_t c = 0; c < r; ++c) {
    for (std::size_t i = 0; i < r; ++i) {
      if (U(i, c) == 0) continue;
      for (std::size_t t = 0; t < out[c].size(); ++t) out[c][t] += basis[i][t] * U(i, c);
    }
  }
  return out;
}

ReducedBoundsReport evaluate_reduced_bounds(const Basis& basis) {
  GramSchmidtData gs = gram_schmidt(basis);
  const std::size_t r = basis.size();
  Rational det2 = 1;
  for (const auto& n : gs.bnorm) det2 *= n;
  Rational rhs = Rational(pow2(r * (r - 1) / 2)) * det2;

  ReducedBoundsReport report;
  report.first_vector = pow(dot(basis[0], basis[0]), static_cast<long>(r)) <= rhs;
  Rational product = 1;
  for (const auto& col : basis) product *= dot(col, col);
  report.product = product <= rhs;
  return report;
}

ReducedBoundsReport check_reduced_bounds(const Basis& basis) {
  if (!is_reduced(basis)) throw ContractViolation("check_reduced_bounds called on a non-reduced basis");
  return evaluate_reduced_bounds(basis);
}

bool check_shortness_spot(const Basis& basis, int radius) {
  check_square(basis);
  const std::size_t r = basis.size();
  const Rational limit = Rational(pow2(r - 1));
  const Rational b1 = dot(basis[0], basis[0]);
  std::vector<int> x(r, -radius);
  RatVector v(r);
  while (true) {
    bool nonzero = std::any_of(x.begin(), x.end(), [](int c) { return c != 0; });
    if (nonzero) {
      for (std::size_t t = 0; t < r; ++t) v[t] = 0;
      for (std::size_t c = 0; c < r; ++c) {
        if (x[c] == 0) continue;
        for (std::size_t t = 0; t < r; ++t) v[t] += basis[c][t] * x[c];
      }
      if (b1 > limit * dot(v, v)) return false;
    }
    std::size_t pos = 0;
    while (pos < r && x[pos] == radius) x[pos++] = -radius;
    if (pos == r) break;
    ++x[pos];
  }
  return true;
}

}  // namespace illl
