#include "illl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace illl {

namespace {

unsigned worker_count(unsigned requested, std::uint64_t work) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (work < 4096) t = 1;
  return t;
}

// Visits every nonzero sign-canonical q with max|q_j| ≤ limit.  The visitor
// receives q and, for each row i, the integer numerator e_i of ‖q·a_i‖·2^M;
// it gets max_i e_i.  Work is split over the leading coordinate: worker w
// handles leading values ≡ w (mod workers) and the leading-zero subtree goes
// to worker 0.
class CanonicalScan {
 public:
  using Visitor = std::function<void(const IntVector& q, const Integer& s, const Integer& err_num)>;

  CanonicalScan(const ProblemInstance& inst, long limit) : inst_(inst), limit_(limit) {}

  void run(unsigned worker, unsigned workers, const Visitor& visit) const {
    const std::size_t m = inst_.m;
    const std::size_t n = inst_.n;
    std::vector<IntVector> acc(m + 1, IntVector(n));
    IntVector q(m);
    Integer modulus = pow2(inst_.M);
    Integer half = pow2(inst_.M - 1);

    auto leaf = [&](const IntVector& sums) {
      Integer worst = 0;
      Integer r;
      for (std::size_t i = 0; i < n; ++i) {
        mpz_fdiv_r_2exp(r.get_mpz_t(), sums[i].get_mpz_t(), inst_.M);
        if (r > half) r = modulus - r;
        if (r > worst) worst = r;
      }
      Integer s = 0;
      for (const auto& x : q) s = std::max<Integer>(s, abs(x));
      visit(q, s, worst);
    };

    // canonical: sign already fixed by an earlier nonzero coordinate.
    std::function<void(std::size_t, bool)> rec = [&](std::size_t pos, bool canonical) {
      if (pos == m) {
        if (canonical) leaf(acc[m]);
        return;
      }
      long lo = canonical ? -limit_ : 0;
      for (long v = lo; v <= limit_; ++v) {
        if (pos == 0 && workers > 1) {
          bool mine = v == 0 ? worker == 0 : static_cast<unsigned>(v % workers) == worker;
          if (!mine) continue;
        }
        q[pos] = v;
        for (std::size_t i = 0; i < n; ++i) {
          acc[pos + 1][i] = acc[pos][i];
          if (v != 0) mpz_addmul_ui_signed(acc[pos + 1][i], inst_.P(i, pos), v);
        }
        rec(pos + 1, canonical || v != 0);
      }
      q[pos] = 0;
    };
    rec(0, false);
  }

 private:
  static void mpz_addmul_ui_signed(Integer& target, const Integer& x, long v) {
    if (v > 0) {
      mpz_addmul_ui(target.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(v));
    } else {
      mpz_submul_ui(target.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(-v));
    }
  }

  const ProblemInstance& inst_;
  long limit_;
};

Integer box_size(const Integer& limit, int m) { return pow(Integer(2 * limit + 1), m); }

long checked_limit(const Integer& limit, int m, std::uint64_t budget, const char* what) {
  Integer size = box_size(limit, m);
  if (size > Integer(std::to_string(budget))) throw BudgetExceeded(what, size);
  return limit.get_si();
}

template <class Partial, class Make, class Merge>
Partial parallel_scan(const ProblemInstance& inst, long limit, std::uint64_t work, unsigned threads,
                      Make make_visitor, Merge merge) {
  CanonicalScan scan(inst, limit);
  unsigned workers = worker_count(threads, work);
  std::vector<Partial> parts(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) {
    pool.emplace_back([&, w] { scan.run(w, workers, make_visitor(parts[w])); });
  }
  scan.run(0, workers, make_visitor(parts[0]));
  for (auto& t : pool) t.join();
  Partial out = std::move(parts[0]);
  for (unsigned w = 1; w < workers; ++w) merge(out, parts[w]);
  return out;
}

struct LevelBest {
  Integer err_num;
  std::vector<IntVector> tuples;
};

using FrontierPartial = std::map<Integer, LevelBest>;

void merge_level(FrontierPartial& into, const Integer& s, const Integer& err, const IntVector& q) {
  auto it = into.find(s);
  if (it == into.end()) {
    into.emplace(s, LevelBest{err, {q}});
  } else if (err < it->second.err_num) {
    it->second.err_num = err;
    it->second.tuples.assign(1, q);
  } else if (err == it->second.err_num) {
    it->second.tuples.push_back(q);
  }
}

struct MinPartial {
  bool have = false;
  Integer value;  // s^m · e^n
  IntVector argmin;
  std::uint64_t scanned = 0;
};

}  // namespace

std::vector<BestApproxEntry> best_approximations(const ProblemInstance& instance, const Integer& limit,
                                                 std::uint64_t budget, unsigned threads) {
  validate(instance);
  if (limit < 1) throw ContractViolation("best_approximations needs limit >= 1");
  long lim = checked_limit(limit, instance.m, budget, "best_approximations");
  std::uint64_t work = box_size(limit, instance.m).get_ui();

  FrontierPartial levels = parallel_scan<FrontierPartial>(
      instance, lim, work, threads,
      [](FrontierPartial& part) {
        return [&part](const IntVector& q, const Integer& s, const Integer& e) { merge_level(part, s, e, q); };
      },
      [](FrontierPartial& into, FrontierPartial& from) {
        for (auto& [s, lvl] : from) {
          for (auto& q : lvl.tuples) merge_level(into, s, lvl.err_num, q);
        }
      });

  std::vector<BestApproxEntry> out;
  const Integer scale = pow2(instance.M);
  bool have_best = false;
  Integer best;
  for (auto& [s, lvl] : levels) {
    if (have_best && lvl.err_num >= best) continue;
    best = lvl.err_num;
    have_best = true;
    std::sort(lvl.tuples.begin(), lvl.tuples.end());
    for (auto& q : lvl.tuples) out.push_back({q, s, make_rational(lvl.err_num, scale)});
  }
  return out;
}

MinQuality min_quality_in_range(const ProblemInstance& instance, const PoweredValue& s_lo,
                                const PoweredValue& s_hi, std::uint64_t budget, unsigned threads) {
  validate(instance);
  MinQuality out;
  out.s_min = floor_root(s_lo.base, s_lo.degree) + 1;
  Integer hi_ceil = ceil_root(s_hi.base, s_hi.degree);
  out.s_max = hi_ceil - 1;
  if (out.s_min > out.s_max) return out;
  out.vacuous = false;

  long lim = checked_limit(out.s_max, instance.m, budget, "min_quality_in_range");
  std::uint64_t work = box_size(out.s_max, instance.m).get_ui();
  const Integer s_min = out.s_min;
  const unsigned long m = instance.m;
  const unsigned long n = instance.n;

  MinPartial best = parallel_scan<MinPartial>(
      instance, lim, work, threads,
      [&](MinPartial& part) {
        return [&part, &s_min, m, n](const IntVector& q, const Integer& s, const Integer& e) {
          if (s < s_min) return;
          ++part.scanned;
          Integer value = pow(s, m) * pow(e, n);
          if (!part.have || value < part.value || (value == part.value && q < part.argmin)) {
            part.have = true;
            part.value = std::move(value);
            part.argmin = q;
          }
        };
      },
      [](MinPartial& into, MinPartial& from) {
        into.scanned += from.scanned;
        if (!from.have) return;
        if (!into.have || from.value < into.value || (from.value == into.value && from.argmin < into.argmin)) {
          into.have = true;
          into.value = from.value;
          into.argmin = from.argmin;
        }
      });

  out.scanned = best.scanned;
  out.argmin = best.argmin;
  out.theta = {make_rational(best.value, pow2(instance.M * n)), n};
  return out;
}

bool certificate_confirmed(const Certificate& cert, const MinQuality& scan) {
  if (scan.vacuous) return true;
  return compare(scan.theta, cert.delta) > 0;
}

long double ocf_distribution(long double z) {
  if (!(z >= 0.0L && z <= 1.0L)) throw ContractViolation("F(z) is defined for 0 <= z <= 1");
  const long double sqrt5 = std::sqrt(5.0L);
  const long double G = (sqrt5 + 1.0L) / 2.0L;
  const long double logG = std::log(G);
  if (z <= 1.0L / sqrt5) return z / logG;
  if (z >= 0.5L) return 1.0L;
  const long double root = std::sqrt(1.0L - 4.0L * z * z);
  return (root + std::log(G * (1.0L - root) / (2.0L * z))) / logG;
}

std::vector<OcfSample> ocf_samples(int count) {
  if (count < 2) throw ContractViolation("need at least two F(z) samples");
  std::vector<OcfSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    long double z = static_cast<long double>(i) / (count - 1);
    out.push_back({static_cast<double>(z), static_cast<double>(ocf_distribution(z))});
  }
  return out;
}

std::string frontier_csv(const std::vector<BestApproxEntry>& entries, const ProblemInstance& instance) {
  std::ostringstream out;
  out << "s";
  for (int j = 1; j <= instance.m; ++j) out << ",q_" << j;
  out << ",err_num,err_den,theta_float\n";
  out.precision(17);
  for (const auto& e : entries) {
    out << to_string(e.s);
    for (const auto& x : e.q) out << ',' << to_string(x);
    out << ',' << to_string(Integer(e.err.get_num())) << ',' << to_string(Integer(e.err.get_den())) << ','
        << theta(e.q, e.err, instance).approx << '\n';
  }
  return out.str();
}

std::string ocf_csv(const std::vector<OcfSample>& samples) {
  std::ostringstream out;
  out.precision(17);
  out << "z,F\n";
  for (const auto& s : samples) out << s.z << ',' << s.F << '\n';
  return out.str();
}

}  // namespace illl
