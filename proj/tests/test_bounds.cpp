#include "illl/bounds.hpp"
#include "illl/illl.hpp"

#include <doctest.h>

#include <random>

using namespace illl;

namespace {

ProblemInstance make(int m, int n, unsigned long M, const Integer& q_max, std::mt19937_64& rng,
                     const Rational& d = 2) {
  ProblemInstance inst;
  inst.m = m;
  inst.n = n;
  inst.M = M;
  inst.q_max = q_max;
  inst.d = d;
  inst.P = IntMatrix(n, m);
  gmp_randclass gen(gmp_randinit_default);
  gen.seed(static_cast<unsigned long>(rng()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) inst.P(i, j) = gen.get_z_bits(M) + 1;
  }
  return inst;
}

ProblemInstance scalar(const Integer& p, unsigned long M, const Integer& q_max) {
  ProblemInstance inst;
  inst.M = M;
  inst.q_max = q_max;
  inst.P = IntMatrix(1, 1);
  inst.P(0, 0) = p;
  return inst;
}

ProblemInstance golden() { return scalar(Integer("11400714819323198486"), 64, 10000); }

}  // namespace

TEST_CASE("Dirichlet coefficient") {
  ProblemInstance half = scalar(128, 8, 100);
  CHECK(theta(IntVector{1}, Rational(1, 2), half).value.base == Rational(1, 2));
  CHECK(theta(IntVector{2}, Rational(0), half).value.is_zero());
  CHECK(max_error(IntVector{3}, half) == Rational(1, 2));

  // a = √2 - 1 to 64 bits; ‖5a‖ ≈ 0.0710678
  ProblemInstance root2 = scalar(Integer("7640891576956012808"), 64, 1000);
  ThetaValue t = theta(IntVector{5}, max_error(IntVector{5}, root2), root2);
  CHECK(t.approx == doctest::Approx(0.35533906).epsilon(1e-7));
  CHECK(t.at_most(Rational(36, 100)));
  CHECK_FALSE(t.at_most(Rational(35, 100)));

  // m = 2, n = 1: Θ = s² · maxerr
  ProblemInstance wide = scalar(1, 8, 100);
  wide.m = 2;
  wide.P = IntMatrix(1, 2);
  wide.P(0, 0) = 64;   // 1/4
  wide.P(0, 1) = 128;  // 1/2
  ThetaValue w = theta(IntVector{3, 1}, max_error(IntVector{3, 1}, wide), wide);
  CHECK(w.value.base == Rational(9, 4));
}

TEST_CASE("for-each-Q constants reduce to the d = 2 forms") {
  std::mt19937_64 rng(1);
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      ProblemInstance inst = make(m, n, 64, 1000000, rng);
      long r = m + n;
      CHECK(compare(for_each_q_lower(inst), PoweredValue::pow2((r + 3) * r, 4 * m)) == std::strong_ordering::equal);
      CHECK(compare(for_each_q_constant(inst), PoweredValue::pow2((r + 3) * r, 4 * n)) ==
            std::strong_ordering::equal);
    }
  }
}

TEST_CASE("every record of random runs satisfies the per-iteration bounds") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    int m = 1 + t % 3, n = 1 + (t / 3) % 3;
    ProblemInstance inst = make(m, n, 64, 1000000, rng, t % 5 == 4 ? Rational(3) : Rational(2));
    RunResult run = run_illl(inst);
    for (const auto& rec : run.records) {
      CHECK(coefficient_bound_holds(rec, inst));
      CHECK(quality_bound_holds(rec, inst));
      CHECK(theta_ceiling_holds(rec, inst));
    }
    VerifyReport report = verify_run(run);
    for (const auto& c : report.checks) {
      INFO(c.name << ": " << c.detail);
      CHECK(c.passed);
    }
  }
}

TEST_CASE("for-each-Q on a log-spaced grid and at the top of the range") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 12; ++t) {
    ProblemInstance inst = make(1 + t % 3, 1 + t / 4, 64, 1000000, rng);
    RunResult run = run_illl(inst);
    CHECK(check_for_each_q(run, inst.q_max).satisfied);
    for (const auto& Q : q_grid(inst, 20)) {
      QCheck c = check_for_each_q(run, Q);
      CHECK(c.satisfied);
      REQUIRE(c.witness.has_value());
      CHECK(run.records[*c.witness].height() <= Q);
    }
  }
}

TEST_CASE("for-each-Q refuses Q outside the admissible range") {
  std::mt19937_64 rng(4);
  ProblemInstance inst = make(1, 1, 64, 1000000, rng);
  RunResult run = run_illl(inst);
  CHECK_THROWS_AS(check_for_each_q(run, Integer(1)), ContractViolation);
  CHECK_THROWS_AS(check_for_each_q(run, inst.q_max + 1), ContractViolation);
  auto grid = q_grid(inst, 20);
  CHECK(grid.size() == 20);
  CHECK(grid.back() == inst.q_max);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i - 1] <= grid[i]);
}

TEST_CASE("removing the late records breaks for-each-Q") {
  std::mt19937_64 rng(5);
  ProblemInstance inst = make(1, 1, 64, 1000000, rng);
  RunResult run = run_illl(inst);
  std::vector<ApproxRecord> early(run.records.begin(), run.records.begin() + 2);
  CHECK_FALSE(check_for_each_q(early, inst, inst.q_max).satisfied);

  RunOptions frozen;
  frozen.fault = FaultInjection::freeze_after_first;
  VerifyReport report = verify_run(run_illl(inst, frozen));
  CHECK_FALSE(report.all_passed());
}

TEST_CASE("certificate constant") {
  // m = n = 1: δ = 2^(-9/2) γ²
  PoweredValue gamma = PoweredValue::exact(Rational(3, 7));
  PoweredValue expect{pow2q(-18) * pow(Rational(3, 7), 8), 4};
  CHECK(compare(certificate_delta(1, 1, gamma), expect) == std::strong_ordering::equal);

  // m = 1, n = 2: δ = 2^(-33/8) 2^(-1/2) γ^(3/2), with γ² = 1/5
  PoweredValue gamma2{Rational(1, 5), 2};
  PoweredValue expect2{pow2q(-37) * pow(Rational(1, 5), 6), 8};
  CHECK(compare(certificate_delta(1, 2, gamma2), expect2) == std::strong_ordering::equal);

  CHECK(certificate_delta(2, 3, PoweredValue{0, 3}).is_zero());
}

TEST_CASE("certificates from runs") {
  RunResult run = run_illl(golden());
  Certificate cert = make_certificate(run);
  CHECK_FALSE(cert.degenerate);
  CHECK(cert.record_count == run.records.size());
  CHECK(compare(cert.s_lo, cert.s_hi) < 0);
  CHECK(cert.non_vacuous());
  CHECK(cert.gamma.to_double() == doctest::Approx(0.3819660112501051).epsilon(1e-9));

  Certificate back = certificate_from_json(certificate_to_json(cert));
  CHECK(back.gamma.base == cert.gamma.base);
  CHECK(back.delta.base == cert.delta.base);
  CHECK(back.delta.degree == cert.delta.degree);
  CHECK(back.s_hi.base == cert.s_hi.base);
  CHECK(back.q_max == cert.q_max);
  CHECK(back.instance_hash == cert.instance_hash);
  CHECK_THROWS_AS(certificate_from_json("{\"m\": 1}"), Error);

  Certificate degenerate = make_certificate(run_illl(scalar(128, 8, 100)));
  CHECK(degenerate.degenerate);
  CHECK(degenerate.delta.is_zero());
}

TEST_CASE("planted approximation meets the finding criterion") {
  RunResult run = run_illl(golden());
  const ProblemInstance& inst = run.instance;
  IntVector s{55};
  PoweredValue delta = theta(s, max_error(s, inst), inst).value.with_degree_multiple(4);
  LemmaReport rep = check_lemma_what_we_find(run, s, delta);
  INFO(rep.failed_hypotheses());
  CHECK(rep.hypotheses_hold());
  CHECK(rep.conclusion);
  REQUIRE(rep.witness.has_value());

  LemmaReport tiny = check_lemma_what_we_find(run, s, PoweredValue{Rational(1, 1000000000), 4});
  CHECK_FALSE(tiny.hypotheses_hold());
  CHECK(tiny.failed_hypotheses().find("s quality") != std::string::npos);
  CHECK_THROWS_AS(check_lemma_what_we_find(run, s, PoweredValue{Rational(1, 2), 3}), ContractViolation);
}

TEST_CASE("planted best approximations on random instances") {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    ProblemInstance inst = make(1, 1, 64, 1000000, rng);
    RunResult run = run_illl(inst);
    for (const auto& rec : run.records) {
      if (rec.duplicate || rec.height() < 2) continue;
      PoweredValue delta = theta(rec, inst).value.with_degree_multiple(4);
      LemmaReport rep = check_lemma_what_we_find(run, rec.q, delta);
      if (!rep.hypotheses_hold()) continue;
      ++checked;
      CHECK(rep.conclusion);
    }
  }
  CHECK(checked > 0);
}
