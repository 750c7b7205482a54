#include "illl/experiments.hpp"
#include "illl/bounds.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace illl;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentPlan small_plan(int m, int n, long d, std::uint64_t seed) {
  ExperimentPlan p;
  p.name = "small";
  p.m = m;
  p.n = n;
  p.d = d;
  p.q_max = 100000;
  p.repetitions = 6;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("seed splitting") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(repetition_rng(5, 3)() == repetition_rng(5, 3)());
  CHECK(repetition_rng(5, 3)() != repetition_rng(5, 4)());
}

TEST_CASE("random instances") {
  ProblemInstance a = random_instance(2, 3, 100, 1000, 2, 42);
  ProblemInstance b = random_instance(2, 3, 100, 1000, 2, 42);
  CHECK(a.P == b.P);
  CHECK_FALSE(a.P == random_instance(2, 3, 100, 1000, 2, 43).P);

  auto rng = repetition_rng(7, 0);
  double sum = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    ProblemInstance x = random_instance(1, 1, 8, 100, 2, rng);
    CHECK(x.P(0, 0) >= 1);
    CHECK(x.P(0, 0) <= 256);
    sum += to_double(x.a(0, 0));
  }
  CHECK(sum / draws >= 0.45);
  CHECK(sum / draws <= 0.55);
  CHECK_THROWS_AS(random_instance(0, 1, 8, 100, 2, 1), InvalidInstance);
  CHECK_THROWS_AS(random_instance(1, 1, 8, 1000, 2, 1), InvalidInstance);
}

TEST_CASE("experiment precision covers q_max") {
  CHECK(experiment_precision(1, 1, 2, Integer("1000000000000")) == 144);
  CHECK(experiment_precision(3, 2, 8, Integer("1000000000000")) == 164);
  ExperimentPlan p = small_plan(1, 1, 2, 1);
  CHECK(p.precision() == 98);
  p.M = 40;
  CHECK(p.precision() == 40);
}

TEST_CASE("empirical distribution and histogram tables") {
  auto table = ecdf({0.3, 0.1, 0.3, 0.2});
  REQUIRE(table.size() == 3);
  CHECK(table[0].z == 0.1);
  CHECK(table[1].fraction == 0.5);
  CHECK(table[2].fraction == 1.0);
  CHECK(ecdf({}).empty());

  ApproxRecord r;
  r.k = 1;
  r.q = {2};
  CHECK(growth_value(r, 1, 1) == doctest::Approx(2.0));
  r.k = 3;
  r.q = {64};
  CHECK(growth_value(r, 3, 2) == doctest::Approx(std::pow(64.0, 0.5)));

  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median({}), ContractViolation);
}

TEST_CASE("distances between distributions") {
  std::vector<double> quantiles;
  const int n = 2000;
  // invert F on its linear branch and bisect on the other
  for (int i = 1; i <= n; ++i) {
    double u = (i - 0.5) / n, lo = 0, hi = 0.5;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      (ocf_cdf(mid) < u ? lo : hi) = mid;
    }
    quantiles.push_back(hi);
  }
  CHECK(sup_distance_to_ocf(quantiles) < 1.0 / n + 1e-9);
  CHECK(sup_distance_to_ocf({0.49}) == doctest::Approx(ocf_cdf(0.49)));
  CHECK(sup_gap(quantiles, quantiles) == 0);
  CHECK(sup_gap({1, 2}, {3, 4}) == 1);
  CHECK(sup_gap({1, 2, 3, 4}, {1, 2}) == doctest::Approx(0.5));
  CHECK(ocf_cdf(-1) == 0);
  CHECK(ocf_cdf(3) == 1);
}

TEST_CASE("a rational input leaves one record without duplicates") {
  PlanResult res;
  res.plan = small_plan(1, 1, 2, 1);
  ProblemInstance half;
  half.M = 8;
  half.q_max = 200;
  half.P = IntMatrix(1, 1);
  half.P(0, 0) = 128;
  RunResult run = run_illl(half);
  for (auto& r : run.records) res.records.push_back({0, r, to_double(r.maxerr), theta(r, half).approx});
  CHECK(res.thetas(false).size() == run.records.size());
  CHECK(res.thetas(true).size() == 1);
  CHECK(theta_ecdf(res, true).back().fraction == 1.0);
}

TEST_CASE("plans are reproducible and independent of thread count") {
  ExperimentPlan p = small_plan(2, 1, 2, 99);
  PlanResult one = run_plan(p, 1);
  PlanResult three = run_plan(p, 3);
  CHECK(one.repetitions == 6);
  CHECK(records_csv(one) == records_csv(three));
  CHECK(records_csv(one) == records_csv(run_plan(p, 2)));
  CHECK(one.records.size() == static_cast<std::size_t>(6 * p.kprime()));
  p.seed = 100;
  CHECK(records_csv(run_plan(p, 1)) != records_csv(one));

  auto header = records_csv(one).substr(0, records_csv(one).find('\n'));
  CHECK(header == "rep,k,s,q_1,q_2,p_1,maxerr_float,theta_float,duplicate");

  auto table = theta_ecdf(one, false);
  for (std::size_t i = 1; i < table.size(); ++i) {
    CHECK(table[i - 1].z < table[i].z);
    CHECK(table[i - 1].fraction <= table[i].fraction);
  }
  CHECK(table.back().fraction == 1.0);

  auto bins = growth_histogram(one);
  std::size_t total = 0;
  for (const auto& b : bins) {
    total += b.count;
    CHECK(b.hi - b.lo == doctest::Approx(0.1));
  }
  CHECK(total == one.records.size());
  CHECK(bins.front().lo == 0);
}

TEST_CASE("automatic repetition count stops at the first sufficient index") {
  ExperimentPlan p = small_plan(1, 1, 2, 5);
  p.repetitions = 0;
  p.min_records = 150;
  PlanResult r = run_plan(p, 2);
  CHECK(r.deduped_count() >= 150);
  std::size_t without_last = 0;
  for (const auto& t : r.records) {
    if (t.rep < r.repetitions - 1 && !t.record.duplicate) ++without_last;
  }
  CHECK(without_last < 150);
  CHECK(records_csv(r) == records_csv(run_plan(p, 1)));
}

TEST_CASE("plan validation") {
  ExperimentPlan p = small_plan(1, 1, 2, 1);
  p.d = 1;
  CHECK_THROWS_AS(validate(p), InvalidInstance);
  p = small_plan(1, 1, 2, 1);
  p.M = 10;
  CHECK_THROWS_AS(validate(p), InvalidInstance);
  p = small_plan(1, 1, 2, 1);
  p.repetitions = -1;
  CHECK_THROWS_AS(validate(p), InvalidInstance);
}

TEST_CASE("presets and plan files") {
  for (const auto& name : preset_names()) {
    PlanSet set = preset(name);
    CHECK_FALSE(set.plans.empty());
    for (const auto& p : set.plans) CHECK_NOTHROW(validate(p));
  }
  CHECK(preset("fig1").plans[0].d == 2);
  CHECK(preset("fig2").plans[0].d == 64);
  CHECK(preset("fig4").plans.size() == 4);
  for (const auto& p : preset("fig6").plans) CHECK(p.repetitions == std::max(1, 200 / p.kprime()));
  CHECK(preset("fig6", true).plans[0].q_max == pow(Integer(10), 40));
  CHECK_THROWS_AS(preset("fig7"), Error);

  PlanSet set = preset("fig4", false, 17);
  PlanSet back = plan_set_from_json(plan_set_to_json(set));
  REQUIRE(back.plans.size() == set.plans.size());
  for (std::size_t i = 0; i < set.plans.size(); ++i) {
    CHECK(back.plans[i].name == set.plans[i].name);
    CHECK(back.plans[i].d == set.plans[i].d);
    CHECK(back.plans[i].q_max == set.plans[i].q_max);
    CHECK(back.plans[i].seed == set.plans[i].seed);
  }
  PlanSet single = plan_set_from_json(R"({"m": 2, "n": 1, "d": "3/2", "q_max": 5000, "repetitions": 2})");
  CHECK(single.plans[0].name == "m2n1d3_2");
  CHECK(single.plans[0].d == Rational(3, 2));
  CHECK_THROWS_AS(plan_set_from_json("{"), Error);
  CHECK_THROWS_AS(plan_set_from_json(R"({"n": 1})"), Error);
  CHECK_THROWS_AS(plan_set_from_json(R"({"m": 1, "n": 1, "d": 1})"), InvalidInstance);
}

TEST_CASE("bundles are byte-identical apart from the manifest") {
  namespace fs = std::filesystem;
  fs::path root = fs::temp_directory_path() / "illl_bundle_test";
  fs::remove_all(root);
  PlanSet set{"t", {small_plan(1, 1, 8, 3)}};
  write_bundle(set, root / "a", 1);
  write_bundle(set, root / "b", 2);
  for (const char* f : {"small/records.csv", "small/ecdf_all.csv", "small/ecdf_dedup.csv", "small/histogram.csv",
                        "small/instances.txt", "ocf.csv"}) {
    INFO(f);
    CHECK_FALSE(slurp(root / "a" / f).empty());
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  CHECK(slurp(root / "a" / "manifest.json").find("\"tolerances\"") != std::string::npos);
  fs::remove_all(root);
}
