#pragma once

// Exact LLL basis reduction with Lovász constant 3/4.
//
// A basis is stored by columns: basis[i] is the vector b_{i+1}.  The
// reduction itself runs on integer lattices using the integral Gram-Schmidt
// representation (d_i, λ_ij) so that no rational arithmetic is needed in the
// inner loop; rational bases are scaled to integers first.

#include "illl/exact.hpp"

#include <cstdint>
#include <vector>

namespace illl {

/// Columns b_1..b_r of a full-rank lattice in Q^r.
using Basis = std::vector<RatVector>;
/// Columns of an integer lattice.
using IntBasis = std::vector<IntVector>;

/// The input columns are linearly dependent (some |b*_i|² is zero).
class DependentBasis : public Error {
 public:
  using Error::Error;
};

struct GramSchmidtData {
  std::vector<RatVector> bstar;
  RatMatrix mu;               // mu(i, j) for j < i; zero elsewhere
  std::vector<Rational> bnorm;  // |b*_i|²
};

/// Integer matrix U with reduced = input · U.  det(U) = ±1.
struct UnimodularTransform {
  IntMatrix U;
};

struct LllStats {
  std::uint64_t swaps = 0;
  std::uint64_t size_reductions = 0;

  LllStats& operator+=(const LllStats& o) {
    swaps += o.swaps;
    size_reductions += o.size_reductions;
    return *this;
  }
};

struct LllOptions {
  /// Recompute the Gram-Schmidt data from scratch after every step and check
  /// it against the incrementally maintained values.  Slow; for testing.
  bool verify_gram_schmidt = false;
};

struct LllResult {
  Basis basis;
  UnimodularTransform transform;
  LllStats stats;
};

struct IntLllResult {
  IntBasis basis;
  UnimodularTransform transform;
  LllStats stats;
};

/// Checks that `basis` is square (r columns of length r, r ≥ 1).
void check_square(const Basis& basis);
void check_square(const IntBasis& basis);

Basis to_rational(const IntBasis& basis);

Rational dot(const RatVector& a, const RatVector& b);
Integer dot(const IntVector& a, const IntVector& b);

/// Exact Gram-Schmidt orthogonalization.  Throws DependentBasis.
GramSchmidtData gram_schmidt(const Basis& basis);

/// det(L)² = Π |b*_i|².
Rational determinant_squared(const Basis& basis);

/// Size condition |μ_ij| ≤ 1/2 and the Lovász condition
/// |b*_i + μ_{i,i-1} b*_{i-1}|² ≥ 3/4 |b*_{i-1}|².
bool is_reduced(const Basis& basis);

LllResult lll_reduce(const Basis& basis, const LllOptions& options = {});

/// Reduces an integer basis in place.  `transform`, when non-null, receives U.
LllStats lll_reduce_in_place(IntBasis& basis, IntMatrix* transform = nullptr,
                             const LllOptions& options = {});

IntLllResult lll_reduce(const IntBasis& basis, const LllOptions& options = {});

/// Determinant of a square integer matrix (Bareiss elimination).
Integer determinant(const IntMatrix& m);

/// Columns of basis · U.
Basis apply_transform(const Basis& basis, const IntMatrix& U);

struct ReducedBoundsReport {
  /// |b_1|^(2r) ≤ 2^(r(r-1)/2) det(L)²
  bool first_vector = false;
  /// Π |b_i|² ≤ 2^(r(r-1)/2) det(L)²
  bool product = false;

  bool all() const { return first_vector && product; }
};

/// Evaluates the two length inequalities guaranteed for reduced bases.
/// Does not require the basis to be reduced; see check_reduced_bounds.
ReducedBoundsReport evaluate_reduced_bounds(const Basis& basis);

/// Same as evaluate_reduced_bounds but throws ContractViolation when the
/// basis is not reduced.
ReducedBoundsReport check_reduced_bounds(const Basis& basis);

/// |b_1|² ≤ 2^(r-1) |x|² for every nonzero lattice vector x whose coefficient
/// vector lies in {-radius..radius}^r.
bool check_shortness_spot(const Basis& basis, int radius);

}  // namespace illl
