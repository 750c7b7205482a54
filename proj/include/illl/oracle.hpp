#pragma once

// Brute-force ground truth for small instances: exhaustive best
// approximations, exhaustive minimum Dirichlet coefficient over an s-range,
// and the limit distribution F(z) of Θ for optimal continued fractions.

#include "illl/bounds.hpp"
#include "illl/exact.hpp"
#include "illl/illl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace illl {

/// Refusal to run an enumeration beyond its budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, const Integer& size)
      : Error(what + ": " + to_string(size) + " tuples exceeds the enumeration budget"), size_(size) {}
  const Integer& size() const { return size_; }

 private:
  Integer size_;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

struct BestApproxEntry {
  IntVector q;    // sign-canonical
  Integer s;      // max_j |q_j|
  Rational err;   // max_i ‖q·a_i‖
};

/// Pareto frontier of (s, err) over all nonzero sign-canonical q in
/// [-limit, limit]^m: an entry is kept when its error is the minimum at its
/// s and strictly below every error at smaller s.  Sorted by s.
std::vector<BestApproxEntry> best_approximations(const ProblemInstance& instance, const Integer& limit,
                                                 std::uint64_t budget = kDefaultEnumerationBudget,
                                                 unsigned threads = 0);

struct MinQuality {
  bool vacuous = true;       // no integer s strictly between the endpoints
  Integer s_min, s_max;      // scanned s-range
  PoweredValue theta;        // min of s^(m/n)·maxerr, degree n
  IntVector argmin;
  std::uint64_t scanned = 0;
};

/// Exact minimum of s^(m/n)·max_i‖s·a_i‖ over all tuples with
/// s_lo < max_j|s_j| < s_hi.
MinQuality min_quality_in_range(const ProblemInstance& instance, const PoweredValue& s_lo,
                                const PoweredValue& s_hi,
                                std::uint64_t budget = kDefaultEnumerationBudget, unsigned threads = 0);

/// True when the scanned minimum exceeds the certificate's δ (or the range is empty).
bool certificate_confirmed(const Certificate& cert, const MinQuality& scan);

/// F(z) for 0 ≤ z ≤ 1.  Throws ContractViolation outside [0, 1].
long double ocf_distribution(long double z);

struct OcfSample {
  double z;
  double F;
};
/// `count` ≥ 2 evenly spaced samples on [0, 1].
std::vector<OcfSample> ocf_samples(int count);

std::string frontier_csv(const std::vector<BestApproxEntry>& entries, const ProblemInstance& instance);
std::string ocf_csv(const std::vector<OcfSample>& samples);

}  // namespace illl
