#include "illl/experiments.hpp"

#include "illl/bounds.hpp"
#include "illl/instance_io.hpp"
#include "illl/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <mutex>
#include <thread>

#ifndef ILLL_GIT_DESCRIBE
#define ILLL_GIT_DESCRIBE "unknown"
#endif

namespace illl {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

void parallel_for(int count, unsigned threads, const std::function<void(int)>& body) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&] {
    for (int i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Repetition {
  ProblemInstance instance;
  std::vector<TrialRecord> records;
  std::size_t deduped = 0;
};

Repetition run_repetition(const ExperimentPlan& plan, int rep) {
  auto rng = repetition_rng(plan.seed, static_cast<std::uint64_t>(rep));
  Repetition out;
  out.instance = random_instance(plan.m, plan.n, plan.precision(), plan.q_max, plan.d, rng);
  RunResult run = run_illl(out.instance);
  for (auto& rec : run.records) {
    TrialRecord t;
    t.rep = rep;
    t.maxerr = to_double(rec.maxerr);
    t.theta = theta(rec, out.instance).approx;
    if (!rec.duplicate) ++out.deduped;
    t.record = std::move(rec);
    out.records.push_back(std::move(t));
  }
  return out;
}

std::string fixed(double x, int digits = 17) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

json plan_to_json(const ExperimentPlan& p) {
  return {{"name", p.name},
          {"m", p.m},
          {"n", p.n},
          {"d", to_string(p.d)},
          {"M", p.M},
          {"q_max", to_string(p.q_max)},
          {"repetitions", p.repetitions},
          {"min_records", p.min_records},
          {"seed", p.seed},
          {"dedup", p.dedup}};
}

Integer json_integer(const json& v) {
  if (v.is_string()) return parse_integer(v.get<std::string>());
  if (v.is_number_unsigned()) return Integer(std::to_string(v.get<std::uint64_t>()));
  if (v.is_number_integer()) return Integer(std::to_string(v.get<std::int64_t>()));
  throw Error("expected an integer or integer string in plan JSON");
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan p;
  p.name = j.value("name", std::string());
  p.m = j.at("m").get<int>();
  p.n = j.at("n").get<int>();
  if (j.contains("d")) {
    p.d = j["d"].is_string() ? parse_rational(j["d"].get<std::string>()) : Rational(json_integer(j["d"]));
  }
  p.M = j.value("M", 0ul);
  if (j.contains("q_max")) p.q_max = json_integer(j["q_max"]);
  p.repetitions = j.value("repetitions", 0);
  p.min_records = j.value("min_records", std::size_t{1000});
  if (j.contains("seed")) p.seed = json_integer(j["seed"]).get_ui();
  p.dedup = j.value("dedup", true);
  if (p.name.empty()) {
    p.name = "m" + std::to_string(p.m) + "n" + std::to_string(p.n) + "d" + to_string(p.d);
    std::replace(p.name.begin(), p.name.end(), '/', '_');
  }
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 repetition_rng(std::uint64_t seed, std::uint64_t rep) {
  return std::mt19937_64(splitmix64(seed + rep * kGolden));
}

ProblemInstance random_instance(int m, int n, unsigned long M, const Integer& q_max, const Rational& d,
                                std::mt19937_64& rng) {
  ProblemInstance inst;
  inst.m = m;
  inst.n = n;
  inst.M = M;
  inst.q_max = q_max;
  inst.d = d;
  if (m < 1 || n < 1) throw InvalidInstance("m and n must be positive");
  inst.P = IntMatrix(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      // M random bits, 64 at a time from the low end, then shift to [1, 2^M].
      Integer v = 0;
      unsigned long filled = 0;
      while (filled < M) {
        unsigned long take = std::min(64ul, M - filled);
        std::uint64_t word = rng();
        if (take < 64) word &= (std::uint64_t{1} << take) - 1;
        Integer w;
        mpz_import(w.get_mpz_t(), 1, 1, sizeof word, 0, 0, &word);
        v += w << filled;
        filled += take;
      }
      inst.P(i, j) = v + 1;
    }
  }
  validate(inst);
  return inst;
}

ProblemInstance random_instance(int m, int n, unsigned long M, const Integer& q_max, const Rational& d,
                                std::uint64_t seed) {
  auto rng = repetition_rng(seed, 0);
  return random_instance(m, n, M, q_max, d, rng);
}

unsigned long experiment_precision(int m, int n, const Rational& d, const Integer& q_max) {
  double bits = static_cast<double>(m + n) / n * (log_abs(q_max) / std::log(2.0));
  unsigned long needed = static_cast<unsigned long>(std::ceil(bits)) + 64;
  return std::max(recommended_precision(m, n, d), needed);
}

unsigned long ExperimentPlan::precision() const { return M ? M : experiment_precision(m, n, d, q_max); }

int ExperimentPlan::kprime() const {
  ProblemInstance probe;
  probe.m = m;
  probe.n = n;
  probe.M = precision();
  probe.q_max = q_max;
  probe.d = d;
  return num_iterations(probe);
}

void validate(const ExperimentPlan& plan) {
  if (plan.m < 1 || plan.n < 1) throw InvalidInstance("plan '" + plan.name + "': m and n must be positive");
  if (plan.d <= 1) throw InvalidInstance("plan '" + plan.name + "': d must exceed 1");
  if (plan.q_max < 2) throw InvalidInstance("plan '" + plan.name + "': q_max must be at least 2");
  if (plan.repetitions < 0) throw InvalidInstance("plan '" + plan.name + "': repetitions must be >= 1 (or 0 for auto)");
  if (plan.repetitions == 0 && plan.min_records == 0) {
    throw InvalidInstance("plan '" + plan.name + "': automatic repetitions need min_records >= 1");
  }
  if (plan.q_max >= pow2(plan.precision())) {
    throw InvalidInstance("plan '" + plan.name + "': q_max must be below 2^M");
  }
}

PlanResult run_plan(const ExperimentPlan& plan, unsigned threads) {
  validate(plan);
  auto start = std::chrono::steady_clock::now();
  PlanResult out;
  out.plan = plan;

  std::vector<Repetition> done;
  auto run_batch = [&](int first, int count) {
    std::vector<Repetition> batch(count);
    parallel_for(count, threads, [&](int i) { batch[i] = run_repetition(plan, first + i); });
    for (auto& r : batch) done.push_back(std::move(r));
  };

  if (plan.repetitions > 0) {
    run_batch(0, plan.repetitions);
  } else {
    // Stop at the first repetition index where the cumulative deduplicated
    // count reaches min_records; later repetitions of the last batch are
    // discarded, so the result does not depend on batch sizes.
    std::size_t have = 0;
    int kp = std::max(1, plan.kprime());
    int batch = static_cast<int>((plan.min_records + kp - 1) / kp) + 1;
    while (true) {
      int first = static_cast<int>(done.size());
      run_batch(first, batch);
      std::size_t cut = done.size();
      for (std::size_t i = first; i < done.size(); ++i) {
        have += done[i].deduped;
        if (have >= plan.min_records) {
          cut = i + 1;
          break;
        }
      }
      if (have >= plan.min_records) {
        done.resize(cut);
        break;
      }
      double per_rep = static_cast<double>(have) / done.size();
      double missing = static_cast<double>(plan.min_records - have);
      batch = std::max(1, static_cast<int>(std::ceil(missing / std::max(per_rep, 0.5))));
    }
  }

  out.repetitions = static_cast<int>(done.size());
  for (auto& r : done) {
    out.instances.push_back(std::move(r.instance));
    for (auto& t : r.records) out.records.push_back(std::move(t));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<double> PlanResult::thetas(bool dedup) const {
  std::vector<double> v;
  for (const auto& t : records) {
    if (dedup && t.record.duplicate) continue;
    v.push_back(t.theta);
  }
  return v;
}

std::vector<double> PlanResult::growth_values() const {
  std::vector<double> v;
  v.reserve(records.size());
  for (const auto& t : records) v.push_back(growth_value(t.record, plan.m, plan.n));
  return v;
}

std::size_t PlanResult::deduped_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const TrialRecord& t) { return !t.record.duplicate; }));
}

std::vector<EcdfPoint> ecdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<EcdfPoint> out;
  const double total = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.push_back({samples[i], static_cast<double>(i + 1) / total});
  }
  return out;
}

std::vector<EcdfPoint> theta_ecdf(const PlanResult& result, bool dedup) { return ecdf(result.thetas(dedup)); }

double growth_value(const ApproxRecord& record, int m, int n) {
  if (record.k < 1) throw ContractViolation("growth value needs k >= 1");
  double lq = log_abs(record.height());
  return std::exp(m * lq / (static_cast<double>(record.k) * n));
}

std::vector<HistogramBin> growth_histogram(const PlanResult& result) {
  std::vector<double> values = result.growth_values();
  const double width = to_double(result.plan.d) / 20.0;
  double top = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  std::size_t nbins = static_cast<std::size_t>(std::floor(top / width)) + 1;
  std::vector<HistogramBin> bins(nbins);
  for (std::size_t b = 0; b < nbins; ++b) bins[b] = {b * width, (b + 1) * width, 0};
  for (double v : values) ++bins[std::min(nbins - 1, static_cast<std::size_t>(std::floor(v / width)))].count;
  return bins;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractViolation("median of an empty sample");
  std::sort(values.begin(), values.end());
  std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

double ocf_cdf(double z) {
  if (z <= 0) return 0.0;
  if (z >= 1) return 1.0;
  return static_cast<double>(ocf_distribution(z));
}

double sup_distance_to_ocf(const std::vector<double>& samples) {
  if (samples.empty()) throw ContractViolation("sup distance of an empty sample");
  auto table = ecdf(samples);
  double worst = 0;
  double below = 0;
  for (const auto& pt : table) {
    double F = ocf_cdf(pt.z);
    worst = std::max({worst, std::abs(pt.fraction - F), std::abs(below - F)});
    below = pt.fraction;
  }
  return worst;
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ContractViolation("sup gap needs two nonempty samples");
  std::vector<double> x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double worst = 0;
  while (i < x.size() || j < y.size()) {
    double z = j == y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    while (i < x.size() && x[i] == z) ++i;
    while (j < y.size() && y[j] == z) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return worst;
}

std::string records_csv(const PlanResult& result) {
  std::ostringstream out;
  out << "rep,k,s";
  for (int j = 1; j <= result.plan.m; ++j) out << ",q_" << j;
  for (int i = 1; i <= result.plan.n; ++i) out << ",p_" << i;
  out << ",maxerr_float,theta_float,duplicate\n";
  for (const auto& t : result.records) {
    out << t.rep << ',' << t.record.k << ',' << to_string(t.record.height());
    for (const auto& x : t.record.q) out << ',' << to_string(x);
    for (const auto& x : t.record.p) out << ',' << to_string(x);
    out << ',' << fixed(t.maxerr) << ',' << fixed(t.theta) << ',' << (t.record.duplicate ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string ecdf_csv(const std::vector<EcdfPoint>& table) {
  std::ostringstream out;
  out << "z,fraction\n";
  for (const auto& p : table) out << fixed(p.z) << ',' << fixed(p.fraction) << '\n';
  return out.str();
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << fixed(b.lo) << ',' << fixed(b.hi) << ',' << b.count << '\n';
  return out.str();
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}; }

PlanSet preset(const std::string& name, bool paper_scale, std::uint64_t seed) {
  const Integer q_max = paper_scale ? Integer("10000000000000000000000000000000000000000") : Integer("1000000000000");
  PlanSet set;
  set.name = name;
  std::uint64_t offset = 0;
  auto add = [&](int m, int n, long d) {
    ExperimentPlan p;
    p.name = "m" + std::to_string(m) + "n" + std::to_string(n) + "d" + std::to_string(d);
    p.m = m;
    p.n = n;
    p.d = d;
    p.q_max = q_max;
    p.seed = seed + offset++;
    set.plans.push_back(p);
  };
  if (name == "fig1") {
    add(1, 1, 2);
  } else if (name == "fig2") {
    add(1, 1, 64);
  } else if (name == "fig3") {
    for (long d : {2, 8, 64, 512}) add(1, 1, d);
  } else if (name == "fig4") {
    for (long d : {2, 8, 128, 512}) add(3, 2, d);
  } else if (name == "fig5") {
    for (auto [m, n] : {std::pair{1, 2}, {1, 3}, {2, 1}, {3, 1}}) add(m, n, 512);
  } else if (name == "fig6") {
    add(1, 1, 2);
    add(1, 1, 8);
    add(2, 2, 8);
    add(3, 2, 8);
    const int budget = paper_scale ? 2000 : 200;
    for (auto& p : set.plans) p.repetitions = std::max(1, budget / p.kprime());
  } else {
    throw Error("unknown preset '" + name + "'");
  }
  return set;
}

PlanSet plan_set_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("plan JSON: ") + e.what());
  }
  PlanSet set;
  try {
    set.name = j.value("name", std::string("plan"));
    const json& plans = j.contains("plans") ? j["plans"] : json::array({j});
    for (const auto& p : plans) set.plans.push_back(plan_from_json(p));
  } catch (const json::exception& e) {
    throw Error(std::string("plan JSON: ") + e.what());
  }
  if (set.plans.empty()) throw Error("plan JSON: no plans");
  for (const auto& p : set.plans) validate(p);
  return set;
}

std::string plan_set_to_json(const PlanSet& set) {
  json j = {{"name", set.name}, {"plans", json::array()}};
  for (const auto& p : set.plans) j["plans"].push_back(plan_to_json(p));
  return j.dump(2) + "\n";
}

BundleSummary write_bundle(const PlanSet& set, const std::filesystem::path& out, unsigned threads) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create '" + out.string() + "': " + ec.message());

  BundleSummary summary;
  summary.directory = out;
  json manifest = {{"tool", "illl"},
                   {"version", tool_version()},
                   {"git_describe", ILLL_GIT_DESCRIBE},
                   {"plan", json::parse(plan_set_to_json(set))},
                   {"rng", "mt19937_64 seeded with splitmix64(seed + rep * 0x9E3779B97F4A7C15)"},
                   {"tolerances",
                    {{"note", "statistical tolerances are calibration choices of this tool, not published values"},
                     {"ecdf_sup_distance_to_F", 0.08},
                     {"with_vs_without_duplicates_gap", 0.05},
                     {"theta_above_one_rate", 0.01},
                     {"growth_median_factor", 1.5}}},
                   {"results", json::array()}};

  write_file(out / "ocf.csv", ocf_csv(ocf_samples(201)));
  for (const auto& plan : set.plans) {
    PlanResult r = run_plan(plan, threads);
    fs::path dir = out / plan.name;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());

    std::string instances;
    for (std::size_t i = 0; i < r.instances.size(); ++i) {
      instances += "# rep " + std::to_string(i) + "\n" + format_instance(r.instances[i]);
    }
    write_file(dir / "instances.txt", instances);
    write_file(dir / "records.csv", records_csv(r));
    auto all = r.thetas(false);
    auto dd = r.thetas(true);
    write_file(dir / "ecdf_all.csv", ecdf_csv(ecdf(all)));
    write_file(dir / "ecdf_dedup.csv", ecdf_csv(ecdf(dd)));
    write_file(dir / "histogram.csv", histogram_csv(growth_histogram(r)));

    auto growth = r.growth_values();
    std::size_t above = std::count_if(all.begin(), all.end(), [](double t) { return t > 1.0; });
    manifest["results"].push_back({{"name", plan.name},
                                   {"M", plan.precision()},
                                   {"kprime", plan.kprime()},
                                   {"repetitions", r.repetitions},
                                   {"records", r.records.size()},
                                   {"deduped_records", dd.size()},
                                   {"sup_distance_to_F_all", sup_distance_to_ocf(all)},
                                   {"sup_distance_to_F_dedup", sup_distance_to_ocf(dd)},
                                   {"with_vs_without_duplicates_gap", sup_gap(all, dd)},
                                   {"theta_above_one_rate", static_cast<double>(above) / all.size()},
                                   {"growth_median", median(growth)},
                                   {"seconds", r.seconds}});
    summary.results.push_back(std::move(r));
  }
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

const char* tool_version() { return "0.1.0"; }

}  // namespace illl
