#pragma once

// Random-instance experiments: pooled Θ samples, their ECDFs with and
// without duplicates, and the growth statistic e^(m·ln q(k)/(k·n)).
//
// Randomness: repetition r of a plan with seed S draws its instance from
// std::mt19937_64 seeded with splitmix64(S + r·0x9E3779B97F4A7C15), so every
// repetition is reproducible on its own and independent of thread count.

#include "illl/illl.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace illl {

std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 repetition_rng(std::uint64_t seed, std::uint64_t rep);

/// p_ij uniform on [1, 2^M].  Throws InvalidInstance for an invalid shape.
ProblemInstance random_instance(int m, int n, unsigned long M, const Integer& q_max, const Rational& d,
                                std::mt19937_64& rng);
ProblemInstance random_instance(int m, int n, unsigned long M, const Integer& q_max, const Rational& d,
                                std::uint64_t seed);

/// max(recommended_precision, ⌈(m+n)/n · log₂ q_max⌉ + 64): enough bits that
/// ĉ(k′) ≈ q_max^(-(m+n)/n) is still represented with 64 significant bits.
unsigned long experiment_precision(int m, int n, const Rational& d, const Integer& q_max);

struct ExperimentPlan {
  std::string name;
  int m = 1, n = 1;
  Rational d = 2;
  unsigned long M = 0;          // 0: experiment_precision
  Integer q_max = 1000000;
  int repetitions = 0;          // 0: run until min_records deduplicated records
  std::size_t min_records = 1000;
  std::uint64_t seed = 1;
  bool dedup = true;

  unsigned long precision() const;
  int kprime() const;
};

/// Throws InvalidInstance when the plan cannot produce valid instances.
void validate(const ExperimentPlan& plan);

struct TrialRecord {
  int rep = 0;
  ApproxRecord record;
  double maxerr = 0;
  double theta = 0;
};

struct EcdfPoint {
  double z;
  double fraction;
};

struct HistogramBin {
  double lo, hi;
  std::size_t count;
};

struct PlanResult {
  ExperimentPlan plan;
  int repetitions = 0;
  std::vector<ProblemInstance> instances;  // indexed by rep
  std::vector<TrialRecord> records;        // ordered by (rep, k)
  double seconds = 0;

  std::vector<double> thetas(bool dedup) const;
  std::vector<double> growth_values() const;
  std::size_t deduped_count() const;
};

/// Runs repetitions in a worker pool; the merge is ordered by repetition.
PlanResult run_plan(const ExperimentPlan& plan, unsigned threads = 0);

/// Step ECDF over distinct sample values: fraction of samples ≤ z.
std::vector<EcdfPoint> ecdf(std::vector<double> samples);
std::vector<EcdfPoint> theta_ecdf(const PlanResult& result, bool dedup);

/// e^(m·ln q/(k·n)) with q = max_j |q_j|.
double growth_value(const ApproxRecord& record, int m, int n);
/// Bins of width d/20 starting at 0, covering every value.
std::vector<HistogramBin> growth_histogram(const PlanResult& result);
double median(std::vector<double> values);

/// F(z) extended by 1 above z = 1.
double ocf_cdf(double z);
/// sup_z |ECDF(z) - F(z)|, attained at a jump.
double sup_distance_to_ocf(const std::vector<double>& samples);
/// sup_z |ECDF_a(z) - ECDF_b(z)|.
double sup_gap(const std::vector<double>& a, const std::vector<double>& b);

std::string records_csv(const PlanResult& result);
std::string ecdf_csv(const std::vector<EcdfPoint>& table);
std::string histogram_csv(const std::vector<HistogramBin>& bins);

struct PlanSet {
  std::string name;
  std::vector<ExperimentPlan> plans;
};

std::vector<std::string> preset_names();
/// fig1..fig6.  Desk scale uses q_max = 10^12 and ⌊200/k′⌋ repetitions for
/// the growth study; paper scale uses q_max = 10^40 and ⌊2000/k′⌋.
PlanSet preset(const std::string& name, bool paper_scale = false, std::uint64_t seed = 1);

PlanSet plan_set_from_json(const std::string& text);
std::string plan_set_to_json(const PlanSet& set);

struct BundleSummary {
  std::filesystem::path directory;
  std::vector<PlanResult> results;
};

/// Writes one subdirectory per plan (instances.txt, records.csv,
/// ecdf_all.csv, ecdf_dedup.csv, histogram.csv), ocf.csv and manifest.json.
/// Only manifest.json carries timings.
BundleSummary write_bundle(const PlanSet& set, const std::filesystem::path& out, unsigned threads = 0);

const char* tool_version();

}  // namespace illl
