#include "illl/bounds.hpp"
#include "illl/illl.hpp"
#include "illl/instance_io.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace illl;

namespace {

ProblemInstance one_by_one(const Integer& p, unsigned long M, const Integer& q_max, const Rational& d = 2) {
  ProblemInstance inst;
  inst.M = M;
  inst.q_max = q_max;
  inst.d = d;
  inst.P = IntMatrix(1, 1);
  inst.P(0, 0) = p;
  return inst;
}

ProblemInstance golden() {
  return one_by_one(Integer("11400714819323198486"), 64, 10000);
}

ProblemInstance random_instance(std::mt19937_64& rng, int m, int n, unsigned long M, const Integer& q_max) {
  ProblemInstance inst;
  inst.m = m;
  inst.n = n;
  inst.M = M;
  inst.q_max = q_max;
  inst.P = IntMatrix(n, m);
  gmp_randclass gen(gmp_randinit_default);
  gen.seed(static_cast<unsigned long>(rng()));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) inst.P(i, j) = gen.get_z_bits(M) + 1;
  }
  return inst;
}

bool fibonacci(const Integer& x) {
  Integer a = 1, b = 2;
  if (x == 1) return true;
  while (b < x) {
    Integer c = a + b;
    a = b;
    b = c;
  }
  return b == x;
}

}  // namespace

TEST_CASE("instance validation") {
  CHECK_NOTHROW(validate(golden()));
  CHECK_THROWS_AS(validate(one_by_one(5, 2, 4)), InvalidInstance);   // q_max = 2^M
  CHECK_THROWS_AS(validate(one_by_one(5, 2, 3)), InvalidInstance);   // p > 2^M
  CHECK_THROWS_AS(validate(one_by_one(0, 2, 3)), InvalidInstance);   // p < 1
  CHECK_THROWS_AS(validate(one_by_one(1, 2, 3, 1)), InvalidInstance);  // d = 1
  CHECK_THROWS_AS(validate(one_by_one(1, 2, 1)), InvalidInstance);   // q_max = 1
  ProblemInstance wrong_shape = golden();
  wrong_shape.m = 2;
  CHECK_THROWS_AS(validate(wrong_shape), InvalidInstance);
}

TEST_CASE("recommended precision is advisory") {
  CHECK(recommended_precision(1, 1, 2) == 88);
  CHECK(precision_warnings(golden()).size() == 1);
  ProblemInstance roomy = one_by_one(Integer(3) << 100, 102, 1000);
  CHECK(precision_warnings(roomy).empty());
}

TEST_CASE("first schedule value") {
  CHECK(initial_chat(one_by_one(1, 2, 3)) == Rational(1, 4));
  CHECK(initial_chat(one_by_one(1, 20, 1000)) == make_rational(185364, pow2(20)));
  ProblemInstance two = one_by_one(1, 16, 1000);
  two.m = 2;
  two.P = IntMatrix(1, 2);
  two.P(0, 0) = two.P(0, 1) = 1;
  CHECK(initial_chat(two) == make_rational(13778, pow2(16)));
  // the same values through the general root-isolation branch: d = 4/2
  ProblemInstance frac = one_by_one(1, 20, 1000);
  frac.d = make_rational(4, 2);
  CHECK(initial_chat(frac) == make_rational(185364, pow2(20)));
}

TEST_CASE("schedule step") {
  CHECK(step_chat(Rational(1, 4), one_by_one(1, 2, 3)) == Rational(1, 4));
  CHECK(step_chat(make_rational(185364, pow2(20)), one_by_one(1, 20, 1000)) == make_rational(46341, pow2(20)));
}

TEST_CASE("schedule steps never undershoot the exact quotient") {
  std::mt19937_64 rng(29);
  for (long d : {2L, 3L, 8L, 10L}) {
    ProblemInstance inst = one_by_one(1, 40, 1000, d);
    for (int m = 1; m <= 3; ++m) {
      inst.m = m;
      inst.P = IntMatrix(1, m);
      for (int j = 0; j < m; ++j) inst.P(0, j) = 1;
      Rational chat = make_rational(static_cast<long>(rng() % 100000) + 1, pow2(20));
      Rational next = step_chat(chat, inst);
      // next^m ≥ chat^m · d^-(m+1) and next is on the 2^-M grid
      CHECK(pow(next, m) >= pow(chat, m) * pow(Rational(d), -(m + 1)));
      CHECK(Integer(next.get_den()) <= pow2(40));
      Rational below = next - make_rational(1, pow2(40));
      CHECK(pow(below, m) < pow(chat, m) * pow(Rational(d), -(m + 1)));
    }
  }
}

TEST_CASE("number of iterations") {
  CHECK(num_iterations(one_by_one(1, 20, 1000)) == 10);
  CHECK(num_iterations(one_by_one(1, 20, 2)) == 1);
  ProblemInstance tall = one_by_one(1, 30, 1000000);
  tall.n = 2;
  tall.P = IntMatrix(2, 1);
  tall.P(0, 0) = tall.P(1, 0) = 1;
  CHECK(num_iterations(tall) == 10);
}

TEST_CASE("shifted form of the coefficient bound differs by exactly a factor two") {
  for (int m = 1; m <= 4; ++m) {
    for (int n = 1; n <= 4; ++n) {
      for (int k = 1; k <= 6; ++k) {
        long r = m + n;
        PoweredValue lhs = PoweredValue::pow2((r - 1) * r + 4 * k * n, 4 * m);
        PoweredValue rhs = PoweredValue::pow2((r + 3) * r + 4 * (k - 1) * n, 4 * m);
        CHECK(compare(lhs * PoweredValue::exact(2), rhs) == std::strong_ordering::equal);
      }
    }
  }
}

TEST_CASE("ideal schedule sandwiches the dyadic one") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 30; ++t) {
    ProblemInstance inst = random_instance(rng, 1 + t % 3, 1 + (t / 3) % 3, 64, 1000000);
    Schedule s = make_schedule(inst);
    CHECK(static_cast<int>(s.chat.size()) == s.kprime);
    for (int k = 1; k <= s.kprime; ++k) CHECK(sandwich_holds(inst, k, s.chat[k - 1]));
  }
}

TEST_CASE("schedule stalls are reported, not fatal") {
  std::mt19937_64 rng(37);
  ProblemInstance inst = random_instance(rng, 3, 1, 64, 1000000);
  Schedule s = make_schedule(inst);
  REQUIRE(s.stalled_at.has_value());
  bool mentioned = false;
  for (const auto& w : precision_warnings(inst)) mentioned |= w.find("stalls") != std::string::npos;
  CHECK(mentioned);
  CHECK(run_illl(inst).records.size() == static_cast<std::size_t>(s.kprime));
}

TEST_CASE("embedding lattice") {
  IntBasis b = build_embedding(one_by_one(3, 2, 3), Rational(1, 4));
  CHECK(b == IntBasis{{4, 0}, {3, 1}});

  ProblemInstance tall = one_by_one(2, 1, 3);
  tall.n = 2;
  tall.P = IntMatrix(2, 1);
  tall.P(0, 0) = tall.P(1, 0) = 2;
  CHECK(build_embedding(tall, Rational(1, 2)) == IntBasis{{2, 0, 0}, {0, 2, 0}, {2, 2, 1}});

  std::mt19937_64 rng(41);
  ProblemInstance inst = random_instance(rng, 2, 3, 20, 1000);
  Rational chat = make_rational(777, pow2(20));
  IntBasis e = build_embedding(inst, chat);
  IntMatrix mat(5, 5);
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) mat(i, j) = e[j][i];
  }
  CHECK(determinant(mat) == pow(pow2(20), 3) * pow(Integer(777), 2));
}

TEST_CASE("coefficient extraction") {
  ProblemInstance inst = one_by_one(160, 8, 100);  // a = 5/8
  Rational chat = initial_chat(inst);
  IntBasis b = build_embedding(inst, chat);
  lll_reduce_in_place(b);
  ApproxRecord rec = extract_record(b[0], chat, inst, 1);
  CHECK((rec.height() == 1 || rec.height() == 2));
  CHECK(rec.maxerr <= Rational(1, 2));
  CHECK(rec.residuals[0] == rec.q[0] * inst.a(0, 0) - rec.p[0]);

  // a vector that is not in the lattice scaled by ĉ
  CHECK_THROWS_AS(extract_record(IntVector{1, 1}, chat, inst, 1), InvariantViolation);
  CHECK_THROWS_AS(extract_record(IntVector{1}, chat, inst, 1), ContractViolation);
}

TEST_CASE("duplicate marking") {
  auto rec = [](std::initializer_list<long> q) {
    ApproxRecord r;
    for (long x : q) r.q.push_back(x);
    return r;
  };
  std::vector<ApproxRecord> same = {rec({2, 1}), rec({2, 1})};
  dedup(same);
  CHECK_FALSE(same[0].duplicate);
  CHECK(same[1].duplicate);

  std::vector<ApproxRecord> signs = {rec({3, -1}), rec({5, 5}), rec({-3, 1})};
  dedup(signs);
  CHECK_FALSE(signs[1].duplicate);
  CHECK(signs[2].duplicate);

  std::vector<ApproxRecord> distinct = {rec({1}), rec({2}), rec({3})};
  dedup(distinct);
  for (const auto& r : distinct) CHECK_FALSE(r.duplicate);
}

TEST_CASE("golden ratio run finds Fibonacci denominators") {
  RunResult run = run_illl(golden());
  CHECK(run.records.size() == static_cast<std::size_t>(num_iterations(golden())));
  for (const auto& r : run.records) {
    if (r.duplicate) continue;
    CHECK(fibonacci(r.height()));
    CHECK(theta(r, run.instance).approx < 0.5);
  }
}

TEST_CASE("exactly rational input repeats its exact denominator") {
  ProblemInstance half = one_by_one(128, 8, 100);
  RunResult run = run_illl(half);
  bool found = false;
  for (const auto& r : run.records) {
    if (found) {
      CHECK(r.duplicate);
      CHECK(r.height() == 2);
    }
    if (r.height() == 2 && r.maxerr == 0) found = true;
  }
  CHECK(found);
  CHECK(theta(IntVector{1}, Rational(1, 2), half).approx == doctest::Approx(0.5));
  CHECK(theta(IntVector{2}, Rational(0), half).value.is_zero());
}

TEST_CASE("random runs: one record per iteration, exact residuals, canonical signs") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 50; ++t) {
    ProblemInstance inst = random_instance(rng, 1 + t % 3, 1 + (t / 3) % 3, 64, 1000000);
    RunResult run = run_illl(inst);
    REQUIRE(run.records.size() == static_cast<std::size_t>(num_iterations(inst)));
    std::set<IntVector> seen;
    for (const auto& r : run.records) {
      Integer first = 0;
      for (const auto& x : r.q) {
        if (x != 0) {
          first = x;
          break;
        }
      }
      CHECK(first > 0);
      CHECK(r.duplicate == !seen.insert(r.q).second);
      for (int i = 0; i < inst.n; ++i) {
        Rational sum = 0;
        for (int j = 0; j < inst.m; ++j) sum += r.q[j] * inst.a(i, j);
        CHECK(r.residuals[i] == sum - r.p[i]);
      }
    }
  }
}

TEST_CASE("warm and cold starts both satisfy every bound") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 6; ++t) {
    ProblemInstance inst = random_instance(rng, 1 + t % 2, 1 + t / 3, 80, 1000000);
    RunOptions cold;
    cold.warm_start = false;
    cold.lll.verify_gram_schmidt = t == 0;
    CHECK(verify_run(run_illl(inst)).all_passed());
    CHECK(verify_run(run_illl(inst, cold)).all_passed());
  }
}

TEST_CASE("instance files") {
  std::string text = "# comment\n\n1 1 64\n10000 2 1\n  11400714819323198486  \n";
  ProblemInstance inst = parse_instance(text);
  CHECK(inst.P(0, 0) == golden().P(0, 0));
  CHECK(parse_instance(format_instance(inst)).P == inst.P);
  CHECK(instance_hash(inst) == instance_hash(golden()));
  CHECK(instance_hash(inst).size() == 16);
  CHECK(instance_hash(inst) != instance_hash(one_by_one(3, 64, 10000)));

  auto line_of = [](const std::string& bad) {
    try {
      parse_instance(bad);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("1 1 8\n100 2 1\nx\n") == 3);
  CHECK(line_of("1 1\n100 2 1\n5\n") == 1);
  CHECK(line_of("1 1 8\n100 2 0\n5\n") == 2);
  CHECK(line_of("1 2 8\n100 2 1\n5\n") == 4);
  CHECK(line_of("1 1 8\n100 2 1\n300\n") == 3);
  CHECK_THROWS_AS(parse_instance("1 1 8\n300 2 1\n5\n"), InvalidInstance);
}
