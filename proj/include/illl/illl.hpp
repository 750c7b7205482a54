#pragma once

// Iterated LLL: a sequence of simultaneous Diophantine approximations with
// bounded Dirichlet coefficient, obtained by reducing the embedding lattice
//
//     [ I_n   A     ]
//     [ 0     ĉ·I_m ]
//
// for a decreasing dyadic schedule ĉ(1) > ĉ(2) > ... and reading the
// coefficients (q, p) off the first reduced basis vector each time.
//
// All lattices are kept integral by scaling the whole matrix by 2^M, where
// M is the dyadic precision of the input entries a_ij = p_ij / 2^M.

#include "illl/exact.hpp"
#include "illl/lll.hpp"

#include <optional>
#include <string>
#include <vector>

namespace illl {

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

/// Internal consistency of the lattice was lost (e.g. non-exact division
/// while extracting coefficients).  Never expected.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

struct ProblemInstance {
  int m = 1;          // columns of A (length of q)
  int n = 1;          // rows of A (length of p)
  unsigned long M = 64;
  IntMatrix P;        // n x m numerators, a_ij = P(i, j) / 2^M
  Integer q_max = 2;
  Rational d = 2;     // iteration speed; ε = 1/d

  Rational a(std::size_t i, std::size_t j) const;
  int dim() const { return m + n; }
};

/// Throws InvalidInstance unless m, n ≥ 1, 1 ≤ p_ij ≤ 2^M, 1 < q_max < 2^M
/// and d > 1.
void validate(const ProblemInstance& instance);

/// Recommended precision 4((m+n)²/m + (m+n)/m·log₂ d) + 64, rounded up.
unsigned long recommended_precision(int m, int n, const Rational& d);

/// Non-fatal precision diagnostics for a valid instance.
std::vector<std::string> precision_warnings(const ProblemInstance& instance);

/// ĉ(1) = ⌈2^M c⌉ / 2^M with c = (2^(-(m+n-1)/4) / d)^((m+n)/m).
Rational initial_chat(const ProblemInstance& instance);

/// ĉ(k) = ⌈2^M ĉ(k-1) d^(-(m+n)/m)⌉ / 2^M.
Rational step_chat(const Rational& chat_prev, const ProblemInstance& instance);

/// k' = smallest k ≥ 1 with 2^((m+n-1)(m+n)/(4m)) d^(kn/m) ≥ q_max.
int num_iterations(const ProblemInstance& instance);

struct Schedule {
  std::vector<Rational> chat;  // ĉ(1)..ĉ(k')
  int kprime = 0;
  /// First k with ĉ(k) == ĉ(k-1) (precision exhausted), if any.
  std::optional<int> stalled_at;
};

Schedule make_schedule(const ProblemInstance& instance);

/// The ideal schedule value c(k) as a powered value:
/// c(k)^(4m) = 2^(-(m+n-1)(m+n)) d^(-4k(m+n)).
PoweredValue ideal_c(const ProblemInstance& instance, int k);

/// Embedding matrix with c replaced by `chat`, scaled by 2^M so all entries
/// are integers.  Column i < n is 2^M e_i; column n+j holds (p_1j..p_nj) on
/// top and 2^M·ĉ at row n+j.
IntBasis build_embedding(const ProblemInstance& instance, const Rational& chat);

struct ApproxRecord {
  int k = 0;
  IntVector q;            // length m, sign-canonical
  IntVector p;            // length n
  RatVector residuals;    // q·a_i - p_i
  Rational maxerr;        // max_i ‖q·a_i‖
  bool duplicate = false;
  bool coprime = false;   // gcd(q) == 1, informational only

  Integer height() const;  // max_j |q_j|
};

/// Reads (q, p) from a lattice vector of the scaled embedding for the given
/// ĉ.  Residuals and maxerr are recomputed from A and q.
ApproxRecord extract_record(const IntVector& vector, const Rational& chat,
                            const ProblemInstance& instance, int k);

/// Marks records whose q equals that of an earlier record.
void dedup(std::vector<ApproxRecord>& records);

enum class FaultInjection {
  none,
  skip_last_reduction,     // the final iteration reads the unreduced basis
  freeze_after_first,      // only the first iteration reduces
};

struct RunOptions {
  /// Reduce the previous reduced basis after rescaling (true) or rebuild the
  /// embedding from scratch every iteration (false).
  bool warm_start = true;
  LllOptions lll;
  FaultInjection fault = FaultInjection::none;
};

struct RunResult {
  ProblemInstance instance;
  Schedule schedule;
  std::vector<ApproxRecord> records;  // ordered by k
  LllStats stats;
  std::vector<LllStats> per_iteration;
  std::vector<std::string> diagnostics;
};

RunResult run_illl(const ProblemInstance& instance, const RunOptions& options = {});

}  // namespace illl
