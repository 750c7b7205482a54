#pragma once

// Exact checks of the guarantees an ILLL run carries, and the γ → δ
// non-existence certificate.  Every comparison involving fractional
// exponents is done on powered values; doubles only appear in reports.

#include "illl/exact.hpp"
#include "illl/illl.hpp"

#include <optional>
#include <string>
#include <vector>

namespace illl {

/// Dirichlet coefficient Θ = q^(m/n) · maxerr with q = max_j |q_j|, stored as
/// Θ^n = q^m · maxerr^n.
struct ThetaValue {
  PoweredValue value;  // base = q^m·maxerr^n, degree = n
  double approx = 0.0;

  /// Θ ≤ z exactly.
  bool at_most(const Rational& z) const;
};

ThetaValue theta(const ApproxRecord& record, const ProblemInstance& instance);
ThetaValue theta(const IntVector& q, const Rational& maxerr, const ProblemInstance& instance);

/// max_i ‖q·a_i‖ for an arbitrary tuple.
Rational max_error(const IntVector& q, const ProblemInstance& instance);

struct BoundOptions {
  /// Add the rounding slack of the dyadic schedule to quality bounds.
  bool include_slack = true;
};

/// Additive rounding slack for a record of height q:
/// 2^((m+n-1)/4 + m(1-M)/(m+n)) and m·q·2^-M.
std::vector<PoweredValue> quality_slack(const ProblemInstance& instance, const Integer& height);

/// max_j |q_j(k)| ≤ 2^((m+n-1)(m+n)/(4m)) d^(kn/m)
bool coefficient_bound_holds(const ApproxRecord& record, const ProblemInstance& instance);
/// max_i ‖q(k)·a_i‖ ≤ d^-k (+ slack)
bool quality_bound_holds(const ApproxRecord& record, const ProblemInstance& instance,
                         const BoundOptions& options = {});
/// Θ_k ≤ 2^((m+n-1)(m+n)/(4n))
bool theta_ceiling_holds(const ApproxRecord& record, const ProblemInstance& instance);
/// c(k) ≤ ĉ(k) < c(k) + 2·2^-M
bool sandwich_holds(const ProblemInstance& instance, int k, const Rational& chat);

/// Lower end of the admissible Q range, 2^((m+n-1)(m+n)/(4m)) d^((m+n)/m)
/// (equal to 2^((m+n+3)(m+n)/(4m)) for d = 2).
PoweredValue for_each_q_lower(const ProblemInstance& instance);
/// Constant 2^((m+n-1)(m+n)/(4n)) d^((m+n)/n) of the for-each-Q guarantee.
PoweredValue for_each_q_constant(const ProblemInstance& instance);

struct QCheck {
  bool satisfied = false;
  std::optional<std::size_t> witness;  // index into records
};

/// Is there a record with max_j|q_j| ≤ Q and maxerr ≤ K·Q^(-m/n) (+ slack)?
/// Throws ContractViolation when Q is outside [lower, q_max].
QCheck check_for_each_q(const RunResult& result, const Integer& Q, const BoundOptions& options = {});
QCheck check_for_each_q(const std::vector<ApproxRecord>& records, const ProblemInstance& instance,
                        const Integer& Q, const BoundOptions& options = {});

/// `points` integers log-spaced over [⌈lower⌉, q_max]; empty if the range is.
std::vector<Integer> q_grid(const ProblemInstance& instance, int points);

struct BoundCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<BoundCheck> checks;
  bool all_passed() const;
};

/// Every per-record and per-run guarantee, plus a for-each-Q grid.
VerifyReport verify_run(const RunResult& result, int q_grid_points = 20,
                        const BoundOptions& options = {});

struct Certificate {
  int m = 1;
  int n = 1;
  Integer q_max;
  PoweredValue gamma;   // degree n: base = γ^n
  PoweredValue delta;   // degree 4n²
  PoweredValue s_lo;    // degree 4mn(m+n)
  PoweredValue s_hi;    // degree 4mn(m+n)
  std::size_t record_count = 0;
  std::string instance_hash;
  bool degenerate = false;  // γ = 0

  bool non_vacuous() const;
};

/// δ = 2^(-(m+n)(m²+m(3n-1)+4n+2n²)/(4n²)) m^(-m/(2n)) n^(-1/2) γ^((m+n)/n)
PoweredValue certificate_delta(int m, int n, const PoweredValue& gamma);
/// 2^((m+n-1)n/(4m)) (nδ²/m)^(n/(2(m+n)))
PoweredValue s_lower(int m, int n, const PoweredValue& delta);
/// 2^(-(m²+m(n-1)+4n)/(4m)) (nδ²/m)^(n/(2(m+n))) q_max
PoweredValue s_upper(int m, int n, const PoweredValue& delta, const Integer& q_max);

/// γ = min Θ over the non-duplicate records.
Certificate make_certificate(const RunResult& result);

std::string certificate_to_json(const Certificate& cert, int indent = 2);
Certificate certificate_from_json(const std::string& text);

struct LemmaReport {
  bool delta_in_range = false;     // 0 < δ < 1
  bool s_above_one = false;        // s > 1
  bool s_bound = false;            // s above 2^((m+n-1)n/(4m))(nδ²/m)^(n/(2(m+n)))
  bool s_quality = false;          // s^(m/n)·maxerr(s) ≤ δ
  bool q_max_large_enough = false;
  bool conclusion = false;
  std::optional<std::size_t> witness;

  bool hypotheses_hold() const {
    return delta_in_range && s_above_one && s_bound && s_quality && q_max_large_enough;
  }
  /// Names of failed hypotheses, comma separated.
  std::string failed_hypotheses() const;
};

/// Given an m-tuple s and δ, checks the hypotheses under which the run must
/// contain a record with max|q_j| ≤ 2^((m²+m(n-1)+4n)/(4m)) (m/(nδ²))^(n/(2(m+n))) s
/// and maxerr ≤ 2^((m+n)/2) √n δ s^(-m/n); then checks that such a record exists.
LemmaReport check_lemma_what_we_find(const RunResult& result, const IntVector& s_tuple,
                                     const PoweredValue& delta, const BoundOptions& options = {});

}  // namespace illl
