#include "illl/bounds.hpp"

#include "illl/instance_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace illl {

namespace {

using json = nlohmann::json;

long dim(const ProblemInstance& inst) { return inst.m + inst.n; }

bool le(const PoweredValue& a, const PoweredValue& b) { return compare(a, b) <= 0; }

// x ≤ main + slack terms.
bool at_most_with_slack(const Rational& x, const PoweredValue& main, const ProblemInstance& inst,
                        const Integer& height, const BoundOptions& options) {
  if (!options.include_slack) return le(PoweredValue::exact(x), main);
  std::vector<PoweredValue> terms{main};
  for (auto& t : quality_slack(inst, height)) terms.push_back(std::move(t));
  return compare_with_sum(PoweredValue::exact(x), terms) <= 0;
}

json powered_to_json(const PoweredValue& v) {
  return json{{"num", to_string(Integer(v.base.get_num()))},
              {"den", to_string(Integer(v.base.get_den()))},
              {"degree", v.degree}};
}

PoweredValue powered_from_json(const json& j) {
  PoweredValue v;
  v.base = make_rational(parse_integer(j.at("num").get<std::string>()),
                         parse_integer(j.at("den").get<std::string>()));
  v.degree = j.at("degree").get<unsigned long>();
  if (v.degree == 0 || sgn(v.base) < 0) throw Error("malformed powered value in certificate");
  return v;
}

}  // namespace

bool ThetaValue::at_most(const Rational& z) const {
  if (sgn(z) < 0) return false;
  return compare(value, PoweredValue::exact(z)) <= 0;
}

Rational max_error(const IntVector& q, const ProblemInstance& instance) {
  Rational worst = 0;
  const Integer scale = pow2(instance.M);
  for (std::size_t i = 0; i < instance.P.rows(); ++i) {
    Integer lin = 0;
    for (std::size_t j = 0; j < q.size(); ++j) lin += instance.P(i, j) * q[j];
    Rational err = nearest_integer_distance(make_rational(lin, scale));
    if (err > worst) worst = err;
  }
  return worst;
}

ThetaValue theta(const IntVector& q, const Rational& maxerr, const ProblemInstance& instance) {
  Integer h = 0;
  for (const auto& x : q) h = std::max<Integer>(h, abs(x));
  ThetaValue t;
  t.value.base = Rational(pow(h, instance.m)) * pow(maxerr, instance.n);
  t.value.degree = instance.n;
  t.approx = sgn(maxerr) == 0 ? 0.0
                              : std::exp(instance.m / static_cast<double>(instance.n) * log_abs(h)) *
                                    to_double(maxerr);
  return t;
}

ThetaValue theta(const ApproxRecord& record, const ProblemInstance& instance) {
  return theta(record.q, record.maxerr, instance);
}

std::vector<PoweredValue> quality_slack(const ProblemInstance& instance, const Integer& height) {
  const long r = dim(instance);
  const long m = instance.m;
  // 2^((r-1)/4 + m(1-M)/r) = 2^(((r-1)r + 4m(1-M)) / (4r))
  long num = (r - 1) * r + 4 * m * (1 - static_cast<long>(instance.M));
  return {PoweredValue::pow2(num, static_cast<unsigned long>(4 * r)),
          PoweredValue::exact(Rational(m * height) * pow2q(-static_cast<long>(instance.M)))};
}

bool coefficient_bound_holds(const ApproxRecord& record, const ProblemInstance& instance) {
  const long r = dim(instance);
  PoweredValue bound{pow2q((r - 1) * r) * pow(instance.d, 4L * record.k * instance.n),
                     static_cast<unsigned long>(4 * instance.m)};
  return le(PoweredValue::exact(Rational(record.height())), bound);
}

bool quality_bound_holds(const ApproxRecord& record, const ProblemInstance& instance,
                         const BoundOptions& options) {
  PoweredValue main = PoweredValue::exact(pow(instance.d, -record.k));
  return at_most_with_slack(record.maxerr, main, instance, record.height(), options);
}

bool theta_ceiling_holds(const ApproxRecord& record, const ProblemInstance& instance) {
  const long r = dim(instance);
  PoweredValue ceiling = PoweredValue::pow2((r - 1) * r, static_cast<unsigned long>(4 * instance.n));
  return le(theta(record, instance).value, ceiling);
}

bool sandwich_holds(const ProblemInstance& instance, int k, const Rational& chat) {
  PoweredValue c = ideal_c(instance, k);
  if (compare(PoweredValue::exact(chat), c) < 0) return false;
  Rational shifted = chat - pow2q(1 - static_cast<long>(instance.M));
  if (sgn(shifted) <= 0) return true;
  return compare(PoweredValue::exact(shifted), c) < 0;
}

PoweredValue for_each_q_lower(const ProblemInstance& instance) {
  const long r = dim(instance);
  return {pow2q((r - 1) * r) * pow(instance.d, 4 * r), static_cast<unsigned long>(4 * instance.m)};
}

PoweredValue for_each_q_constant(const ProblemInstance& instance) {
  const long r = dim(instance);
  return {pow2q((r - 1) * r) * pow(instance.d, 4 * r), static_cast<unsigned long>(4 * instance.n)};
}

QCheck check_for_each_q(const std::vector<ApproxRecord>& records, const ProblemInstance& instance,
                        const Integer& Q, const BoundOptions& options) {
  if (Q > instance.q_max || compare(PoweredValue::exact(Rational(Q)), for_each_q_lower(instance)) < 0) {
    throw ContractViolation("Q = " + to_string(Q) + " outside the admissible range");
  }
  PoweredValue K = for_each_q_constant(instance);
  // K·Q^(-m/n) as a single powered value of degree 4n.
  PoweredValue target{K.base * pow(Rational(Q), -4L * instance.m), K.degree};
  QCheck out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    Integer h = rec.height();
    if (h > Q) continue;
    if (at_most_with_slack(rec.maxerr, target, instance, h, options)) {
      out.satisfied = true;
      out.witness = i;
      return out;
    }
  }
  return out;
}

QCheck check_for_each_q(const RunResult& result, const Integer& Q, const BoundOptions& options) {
  return check_for_each_q(result.records, result.instance, Q, options);
}

std::vector<Integer> q_grid(const ProblemInstance& instance, int points) {
  PoweredValue lower = for_each_q_lower(instance);
  Integer first = ceil_root(lower.base, lower.degree);
  std::vector<Integer> out;
  if (first > instance.q_max || points < 1) return out;
  if (points == 1) return {instance.q_max};
  double lo = log_abs(first);
  double hi = log_abs(instance.q_max);
  for (int i = 0; i < points; ++i) {
    Integer Q;
    if (i == 0) {
      Q = first;
    } else if (i == points - 1) {
      Q = instance.q_max;
    } else {
      double t = lo + (hi - lo) * i / (points - 1);
      mpz_set_d(Q.get_mpz_t(), std::round(std::exp(t)));
      Q = std::clamp<Integer>(Q, first, instance.q_max);
    }
    out.push_back(Q);
  }
  return out;
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

VerifyReport verify_run(const RunResult& result, int q_grid_points, const BoundOptions& options) {
  const auto& inst = result.instance;
  VerifyReport report;

  auto per_record = [&](const std::string& name, auto&& pred) {
    BoundCheck c{name, true, ""};
    for (const auto& rec : result.records) {
      if (!pred(rec)) {
        c.passed = false;
        c.detail = "fails at k = " + std::to_string(rec.k);
        break;
      }
    }
    report.checks.push_back(std::move(c));
  };

  {
    int kprime = num_iterations(inst);
    BoundCheck c{"iteration count equals k'", static_cast<int>(result.records.size()) == kprime,
                 std::to_string(result.records.size()) + " records, k' = " + std::to_string(kprime)};
    report.checks.push_back(std::move(c));
  }
  per_record("q nonzero", [](const ApproxRecord& r) { return r.height() > 0; });
  per_record("residual identity", [&](const ApproxRecord& r) {
    for (int i = 0; i < inst.n; ++i) {
      Rational lin = 0;
      for (int j = 0; j < inst.m; ++j) lin += inst.a(i, j) * Rational(r.q[j]);
      if (lin - Rational(r.p[i]) != r.residuals[i]) return false;
    }
    return true;
  });
  per_record("coefficient bound", [&](const ApproxRecord& r) { return coefficient_bound_holds(r, inst); });
  per_record("quality bound", [&](const ApproxRecord& r) { return quality_bound_holds(r, inst, options); });
  per_record("dirichlet coefficient ceiling", [&](const ApproxRecord& r) { return theta_ceiling_holds(r, inst); });

  {
    BoundCheck c{"schedule sandwich", true, ""};
    for (std::size_t k = 0; k < result.schedule.chat.size(); ++k) {
      if (!sandwich_holds(inst, static_cast<int>(k + 1), result.schedule.chat[k])) {
        c.passed = false;
        c.detail = "fails at k = " + std::to_string(k + 1);
        break;
      }
    }
    report.checks.push_back(std::move(c));
  }
  {
    auto grid = q_grid(inst, q_grid_points);
    BoundCheck c{"for-each-Q grid", true, std::to_string(grid.size()) + " points"};
    for (const auto& Q : grid) {
      if (!check_for_each_q(result, Q, options).satisfied) {
        c.passed = false;
        c.detail = "no record for Q = " + to_string(Q);
        break;
      }
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

PoweredValue certificate_delta(int m_, int n_, const PoweredValue& gamma) {
  const long m = m_, n = n_;
  if (gamma.degree != static_cast<unsigned long>(n)) {
    throw ContractViolation("γ must be given with degree n");
  }
  // δ^(4n²) = 2^(-(m+n)(m²+m(3n-1)+4n+2n²)) m^(-2mn) n^(-2n²) (γ^n)^(4(m+n))
  Rational base = pow2q(-(m + n) * (m * m + m * (3 * n - 1) + 4 * n + 2 * n * n)) *
                  pow(Rational(m), -2 * m * n) * pow(Rational(n), -2 * n * n) *
                  pow(gamma.base, 4 * (m + n));
  return {base, static_cast<unsigned long>(4 * n * n)};
}

PoweredValue s_lower(int m_, int n_, const PoweredValue& delta) {
  const long m = m_, n = n_;
  if (delta.degree != static_cast<unsigned long>(4 * n * n)) {
    throw ContractViolation("δ must be given with degree 4n²");
  }
  // s_lo^(4mn(m+n)) = 2^((m+n-1)n²(m+n)) (n/m)^(2mn²) (δ^(4n²))^m
  Rational base = pow2q((m + n - 1) * n * n * (m + n)) * pow(make_rational(n, m), 2 * m * n * n) *
                  pow(delta.base, m);
  return {base, static_cast<unsigned long>(4 * m * n * (m + n))};
}

PoweredValue s_upper(int m_, int n_, const PoweredValue& delta, const Integer& q_max) {
  const long m = m_, n = n_;
  if (delta.degree != static_cast<unsigned long>(4 * n * n)) {
    throw ContractViolation("δ must be given with degree 4n²");
  }
  const long E = 4 * m * n * (m + n);
  Rational base = pow2q(-(m * m + m * (n - 1) + 4 * n) * n * (m + n)) *
                  pow(make_rational(n, m), 2 * m * n * n) * pow(delta.base, m) *
                  Rational(pow(q_max, E));
  return {base, static_cast<unsigned long>(E)};
}

bool Certificate::non_vacuous() const { return !degenerate && compare(s_lo, s_hi) < 0; }

Certificate make_certificate(const RunResult& result) {
  const auto& inst = result.instance;
  Certificate cert;
  cert.m = inst.m;
  cert.n = inst.n;
  cert.q_max = inst.q_max;
  cert.instance_hash = instance_hash(inst);

  bool have = false;
  for (const auto& rec : result.records) {
    if (rec.duplicate) continue;
    ++cert.record_count;
    ThetaValue t = theta(rec, inst);
    if (!have || t.value.base < cert.gamma.base) {
      cert.gamma = t.value;
      have = true;
    }
  }
  if (!have) throw ContractViolation("certificate needs at least one record");
  cert.degenerate = cert.gamma.is_zero();
  cert.delta = certificate_delta(inst.m, inst.n, cert.gamma);
  cert.s_lo = s_lower(inst.m, inst.n, cert.delta);
  cert.s_hi = s_upper(inst.m, inst.n, cert.delta, inst.q_max);
  return cert;
}

std::string certificate_to_json(const Certificate& cert, int indent) {
  json j;
  j["m"] = cert.m;
  j["n"] = cert.n;
  j["q_max"] = to_string(cert.q_max);
  j["gamma_pow"] = powered_to_json(cert.gamma);
  j["delta_pow"] = powered_to_json(cert.delta);
  j["s_lo_pow"] = powered_to_json(cert.s_lo);
  j["s_hi_pow"] = powered_to_json(cert.s_hi);
  j["record_count"] = cert.record_count;
  j["instance_hash"] = cert.instance_hash;
  j["degenerate"] = cert.degenerate;
  j["non_vacuous"] = cert.non_vacuous();
  j["approx"] = json{{"gamma", cert.gamma.to_double()},
                     {"delta", cert.delta.to_double()},
                     {"s_lo", cert.s_lo.to_double()},
                     {"s_hi", cert.s_hi.to_double()}};
  return j.dump(indent);
}

Certificate certificate_from_json(const std::string& text) try {
  json j = json::parse(text);
  Certificate cert;
  cert.m = j.at("m").get<int>();
  cert.n = j.at("n").get<int>();
  cert.q_max = parse_integer(j.at("q_max").get<std::string>());
  cert.gamma = powered_from_json(j.at("gamma_pow"));
  cert.delta = powered_from_json(j.at("delta_pow"));
  cert.s_lo = powered_from_json(j.at("s_lo_pow"));
  cert.s_hi = powered_from_json(j.at("s_hi_pow"));
  cert.record_count = j.at("record_count").get<std::size_t>();
  cert.instance_hash = j.at("instance_hash").get<std::string>();
  cert.degenerate = j.at("degenerate").get<bool>();
  return cert;
} catch (const json::exception& e) {
  throw Error(std::string("certificate JSON: ") + e.what());
}

std::string LemmaReport::failed_hypotheses() const {
  std::string out;
  auto add = [&](bool ok, const char* name) {
    if (ok) return;
    if (!out.empty()) out += ", ";
    out += name;
  };
  add(delta_in_range, "0 < delta < 1");
  add(s_above_one, "s > 1");
  add(s_bound, "s lower bound");
  add(s_quality, "s quality");
  add(q_max_large_enough, "q_max large enough");
  return out;
}

LemmaReport check_lemma_what_we_find(const RunResult& result, const IntVector& s_tuple,
                                     const PoweredValue& delta, const BoundOptions& options) {
  const auto& inst = result.instance;
  const long m = inst.m, n = inst.n;
  if (s_tuple.size() != static_cast<std::size_t>(m)) throw ContractViolation("s-tuple must have length m");
  if (delta.degree != static_cast<unsigned long>(4 * n * n)) {
    throw ContractViolation("δ must be given with degree 4n²");
  }
  Integer s = 0;
  for (const auto& x : s_tuple) s = std::max<Integer>(s, abs(x));
  const long E = 4 * m * n * (m + n);

  LemmaReport rep;
  rep.delta_in_range = !delta.is_zero() && delta.base < 1;
  rep.s_above_one = s > 1;
  rep.s_bound = !delta.is_zero() && compare(PoweredValue::exact(Rational(s)), s_lower(inst.m, inst.n, delta)) > 0;
  ThetaValue ts = theta(s_tuple, max_error(s_tuple, inst), inst);
  rep.s_quality = compare(ts.value, delta) <= 0;

  if (delta.is_zero()) return rep;
  // W = 2^((m²+m(n-1)+4n)/(4m)) (m/(nδ²))^(n/(2(m+n))) s
  PoweredValue W{pow2q((m * m + m * (n - 1) + 4 * n) * n * (m + n)) *
                     pow(make_rational(m, n), 2 * m * n * n) * pow(delta.base, -m) *
                     Rational(pow(s, E)),
                 static_cast<unsigned long>(E)};
  rep.q_max_large_enough = compare(PoweredValue::exact(Rational(inst.q_max)), W) >= 0;
  if (!rep.hypotheses_hold()) return rep;

  // V = 2^((m+n)/2) √n δ s^(-m/n);  V^(4n²) = 2^(2n²(m+n)) n^(2n²) δ^(4n²) s^(-4mn)
  PoweredValue V{pow2q(2 * n * n * (m + n)) * pow(Rational(n), 2 * n * n) * delta.base *
                     pow(Rational(s), -4 * m * n),
                 static_cast<unsigned long>(4 * n * n)};
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    Integer h = rec.height();
    if (compare(PoweredValue::exact(Rational(h)), W) > 0) continue;
    if (at_most_with_slack(rec.maxerr, V, inst, h, options)) {
      rep.conclusion = true;
      rep.witness = i;
      break;
    }
  }
  return rep;
}

}  // namespace illl
