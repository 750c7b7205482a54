// illl: command-line front end.
//
//   illl approximate FILE [--qmax Q] [--d D] [--format csv|json] [--dedup]
//   illl certify FILE [--oracle-check] [--budget N]
//   illl verify FILE [--grid N]
//   illl oracle frontier FILE --limit L
//   illl oracle ocf [--samples N]
//   illl experiment (--preset NAME | --plan FILE | --m .. --n .. --d ..) --out DIR
//
// Exit codes: 0 success, 1 a check failed, 2 usage or input error.

#include "illl/bounds.hpp"
#include "illl/experiments.hpp"
#include "illl/illl.hpp"
#include "illl/instance_io.hpp"
#include "illl/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace illl;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct InstanceArgs {
  std::string file;
  std::string qmax;
  std::string d;
};

void add_instance_args(CLI::App* cmd, InstanceArgs& args) {
  cmd->add_option("instance", args.file, "instance file")->required();
  cmd->add_option("--qmax", args.qmax, "override q_max");
  cmd->add_option("--d", args.d, "override d (integer or fraction)");
}

ProblemInstance load(const InstanceArgs& args) {
  ProblemInstance inst = read_instance_file(args.file);
  if (!args.qmax.empty()) inst.q_max = parse_integer(args.qmax);
  if (!args.d.empty()) inst.d = parse_rational(args.d);
  validate(inst);
  for (const auto& w : precision_warnings(inst)) std::cerr << "warning: " << w << '\n';
  return inst;
}

std::string float_text(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

int cmd_approximate(const InstanceArgs& args, const std::string& format, bool only_new, bool cold) {
  ProblemInstance inst = load(args);
  RunOptions opts;
  opts.warm_start = !cold;
  RunResult run = run_illl(inst, opts);

  if (format == "json") {
    json rows = json::array();
    for (const auto& r : run.records) {
      if (only_new && r.duplicate) continue;
      json q = json::array(), p = json::array();
      for (const auto& x : r.q) q.push_back(to_string(x));
      for (const auto& x : r.p) p.push_back(to_string(x));
      rows.push_back({{"k", r.k},
                      {"s", to_string(r.height())},
                      {"q", q},
                      {"p", p},
                      {"maxerr", to_string(r.maxerr)},
                      {"maxerr_float", to_double(r.maxerr)},
                      {"theta_float", theta(r, inst).approx},
                      {"duplicate", r.duplicate}});
    }
    json out = {{"m", inst.m},
                {"n", inst.n},
                {"kprime", run.schedule.kprime},
                {"instance_hash", instance_hash(inst)},
                {"records", rows}};
    std::cout << out.dump(2) << '\n';
    return kOk;
  }

  std::cout << "k,s";
  for (int j = 1; j <= inst.m; ++j) std::cout << ",q_" << j;
  for (int i = 1; i <= inst.n; ++i) std::cout << ",p_" << i;
  std::cout << ",maxerr,maxerr_float,theta_float,duplicate\n";
  for (const auto& r : run.records) {
    if (only_new && r.duplicate) continue;
    std::cout << r.k << ',' << to_string(r.height());
    for (const auto& x : r.q) std::cout << ',' << to_string(x);
    for (const auto& x : r.p) std::cout << ',' << to_string(x);
    std::cout << ',' << to_string(r.maxerr) << ',' << float_text(to_double(r.maxerr)) << ','
              << float_text(theta(r, inst).approx) << ',' << (r.duplicate ? 1 : 0) << '\n';
  }
  return kOk;
}

int cmd_certify(const InstanceArgs& args, bool oracle_check, std::uint64_t budget) {
  ProblemInstance inst = load(args);
  RunResult run = run_illl(inst);
  Certificate cert = make_certificate(run);
  json out = json::parse(certificate_to_json(cert));
  int code = kOk;
  if (!oracle_check) {
    out["verified"] = "not requested";
  } else if (cert.degenerate) {
    out["verified"] = "skipped(degenerate)";
  } else {
    try {
      MinQuality scan = min_quality_in_range(inst, cert.s_lo, cert.s_hi, budget);
      if (scan.vacuous) {
        out["verified"] = "vacuous";
      } else {
        bool ok = certificate_confirmed(cert, scan);
        out["verified"] = ok;
        json argmin = json::array();
        for (const auto& x : scan.argmin) argmin.push_back(to_string(x));
        out["oracle"] = {{"s_min", to_string(scan.s_min)},
                         {"s_max", to_string(scan.s_max)},
                         {"min_theta_float", scan.theta.to_double()},
                         {"argmin", argmin},
                         {"scanned", scan.scanned}};
        if (!ok) {
          std::cerr << "certificate refuted by exhaustive scan\n";
          code = kFailed;
        }
      }
    } catch (const BudgetExceeded& e) {
      out["verified"] = "skipped(budget)";
      std::cerr << "note: " << e.what() << '\n';
    }
  }
  std::cout << out.dump(2) << '\n';
  return code;
}

int cmd_verify(const InstanceArgs& args, int grid, const std::string& fault) {
  ProblemInstance inst = load(args);
  RunOptions opts;
  if (fault == "skip-last") {
    opts.fault = FaultInjection::skip_last_reduction;
  } else if (fault == "freeze") {
    opts.fault = FaultInjection::freeze_after_first;
  }
  RunResult run = run_illl(inst, opts);
  VerifyReport report = verify_run(run, grid);
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  " << c.detail;
    std::cout << '\n';
  }
  return report.all_passed() ? kOk : kFailed;
}

int cmd_frontier(const InstanceArgs& args, const std::string& limit, std::uint64_t budget) {
  ProblemInstance inst = load(args);
  auto entries = best_approximations(inst, parse_integer(limit), budget);
  std::cout << frontier_csv(entries, inst);
  return kOk;
}

int cmd_experiment(const std::string& preset_name, const std::string& plan_file, ExperimentPlan inline_plan,
                   bool paper_scale, std::uint64_t seed, bool seed_given, const std::string& out,
                   unsigned threads) {
  PlanSet set;
  if (!preset_name.empty()) {
    set = preset(preset_name, paper_scale, seed);
  } else if (!plan_file.empty()) {
    std::ifstream in(plan_file);
    if (!in) throw Error("cannot open plan file '" + plan_file + "'");
    std::stringstream text;
    text << in.rdbuf();
    set = plan_set_from_json(text.str());
    if (seed_given) {
      for (std::size_t i = 0; i < set.plans.size(); ++i) set.plans[i].seed = seed + i;
    }
  } else {
    inline_plan.seed = seed;
    if (inline_plan.name.empty()) {
      inline_plan.name = "m" + std::to_string(inline_plan.m) + "n" + std::to_string(inline_plan.n) + "d" +
                         to_string(inline_plan.d);
      std::replace(inline_plan.name.begin(), inline_plan.name.end(), '/', '_');
    }
    set.name = "inline";
    set.plans.push_back(inline_plan);
  }
  for (const auto& p : set.plans) validate(p);
  BundleSummary summary = write_bundle(set, out, threads);
  for (const auto& r : summary.results) {
    std::cerr << r.plan.name << ": " << r.repetitions << " repetitions, " << r.records.size() << " records, "
              << r.deduped_count() << " without duplicates\n";
  }
  std::cout << summary.directory.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated LLL simultaneous Diophantine approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", illl::tool_version());

  InstanceArgs inst_args;

  auto* approx = app.add_subcommand("approximate", "run the iterated reduction and print the records");
  std::string format = "csv";
  bool only_new = false, cold = false;
  add_instance_args(approx, inst_args);
  approx->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  approx->add_flag("--dedup", only_new, "omit records whose q repeats an earlier one");
  approx->add_flag("--cold-start", cold, "rebuild the lattice every iteration");

  auto* certify = app.add_subcommand("certify", "emit a quality certificate as JSON");
  bool oracle_check = false;
  std::uint64_t budget = illl::kDefaultEnumerationBudget;
  add_instance_args(certify, inst_args);
  certify->add_flag("--oracle-check", oracle_check, "confirm the certificate by exhaustive scan");
  certify->add_option("--budget", budget, "enumeration budget for the scan");

  auto* verify = app.add_subcommand("verify", "check every proven bound on a run");
  int grid = 20;
  std::string fault = "none";
  add_instance_args(verify, inst_args);
  verify->add_option("--grid", grid, "points in the for-each-Q grid")->check(CLI::PositiveNumber);
  verify->add_option("--fault", fault, "fault injection for negative controls")
      ->check(CLI::IsMember({"none", "skip-last", "freeze"}))
      ->group("");

  auto* oracle = app.add_subcommand("oracle", "brute-force references");
  oracle->require_subcommand(1);
  auto* frontier = oracle->add_subcommand("frontier", "Pareto frontier of best approximations (CSV)");
  std::string limit;
  add_instance_args(frontier, inst_args);
  frontier->add_option("--limit", limit, "scan max|q_j| <= limit")->required();
  frontier->add_option("--budget", budget, "enumeration budget");
  auto* ocf = oracle->add_subcommand("ocf", "samples of F(z) on [0, 1] (CSV)");
  int samples = 201;
  ocf->add_option("--samples", samples, "number of samples")->check(CLI::Range(2, 1000000));

  auto* experiment = app.add_subcommand("experiment", "run random-instance experiments");
  std::string preset_name, plan_file, out_dir = "bundle", d_text = "2", qmax_text = "1000000000000";
  bool paper_scale = false, desk_scale = false;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  illl::ExperimentPlan inline_plan;
  auto* preset_opt = experiment->add_option("--preset", preset_name, "fig1 .. fig6")
                         ->check(CLI::IsMember(illl::preset_names()));
  auto* plan_opt = experiment->add_option("--plan", plan_file, "plan JSON file")->excludes(preset_opt);
  experiment->add_flag("--paper-scale", paper_scale, "full published scale (slow)");
  experiment->add_flag("--desk-scale", desk_scale, "reduced scale (default)");
  auto* seed_opt = experiment->add_option("--seed", seed, "base seed");
  experiment->add_option("--out", out_dir, "output directory");
  experiment->add_option("--threads", threads, "worker threads (0: all cores)");
  for (auto* o : {experiment->add_option("--m", inline_plan.m, "inline plan: m"),
                  experiment->add_option("--n", inline_plan.n, "inline plan: n"),
                  experiment->add_option("--d", d_text, "inline plan: d"),
                  experiment->add_option("--M", inline_plan.M, "inline plan: precision (0: automatic)"),
                  experiment->add_option("--qmax", qmax_text, "inline plan: q_max"),
                  experiment->add_option("--repetitions", inline_plan.repetitions, "inline plan: 0 for automatic"),
                  experiment->add_option("--min-records", inline_plan.min_records, "inline plan")}) {
    o->excludes(preset_opt)->excludes(plan_opt);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*approx) return cmd_approximate(inst_args, format, only_new, cold);
    if (*certify) return cmd_certify(inst_args, oracle_check, budget);
    if (*verify) return cmd_verify(inst_args, grid, fault);
    if (*frontier) return cmd_frontier(inst_args, limit, budget);
    if (*ocf) {
      std::cout << illl::ocf_csv(illl::ocf_samples(samples));
      return kOk;
    }
    if (*experiment) {
      if (paper_scale && desk_scale) throw illl::Error("--paper-scale and --desk-scale are exclusive");
      inline_plan.d = illl::parse_rational(d_text);
      inline_plan.q_max = illl::parse_integer(qmax_text);
      return cmd_experiment(preset_name, plan_file, inline_plan, paper_scale, seed, seed_opt->count() > 0,
                            out_dir, threads);
    }
  } catch (const illl::ParseError& e) {
    std::cerr << "error: " << inst_args.file << ": " << e.what() << '\n';
    return kUsage;
  } catch (const illl::InvalidInstance& e) {
    std::cerr << "error: invalid instance: " << e.what() << '\n';
    return kUsage;
  } catch (const illl::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const illl::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const illl::InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kFailed;
  } catch (const illl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
