// Python bindings. Big integers cross the boundary as Python ints, rationals
// as fractions.Fraction, larger structured results as JSON text.

#include "illl/bounds.hpp"
#include "illl/experiments.hpp"
#include "illl/illl.hpp"
#include "illl/instance_io.hpp"
#include "illl/oracle.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace illl;

namespace {

py::object to_py(const Integer& x) { return py::int_(py::str(to_string(x))); }

py::object to_py(const Rational& x) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_py(Integer(x.get_num())), to_py(Integer(x.get_den())));
}

py::list to_py(const IntVector& v) {
  py::list out;
  for (const auto& x : v) out.append(to_py(x));
  return out;
}

Integer to_integer(const py::handle& obj) { return parse_integer(py::str(obj)); }

// Accepts int, Fraction or a "num/den" string.
Rational to_rational(const py::handle& obj) {
  if (py::isinstance<py::int_>(obj) || py::isinstance<py::str>(obj)) return parse_rational(py::str(obj));
  return make_rational(to_integer(obj.attr("numerator")), to_integer(obj.attr("denominator")));
}

py::dict record_dict(const ApproxRecord& r, const ProblemInstance& inst) {
  py::dict d;
  d["k"] = r.k;
  d["s"] = to_py(r.height());
  d["q"] = to_py(r.q);
  d["p"] = to_py(r.p);
  d["maxerr"] = to_py(r.maxerr);
  d["theta"] = theta(r, inst).approx;
  d["duplicate"] = r.duplicate;
  return d;
}

ProblemInstance make_instance(int m, int n, unsigned long M, const py::list& P, const py::object& q_max,
                              const py::object& d) {
  ProblemInstance inst;
  inst.m = m;
  inst.n = n;
  inst.M = M;
  if (static_cast<int>(py::len(P)) != n) throw InvalidInstance("P must have n rows");
  inst.P = IntMatrix(n, m);
  for (int i = 0; i < n; ++i) {
    py::list row = P[i];
    if (static_cast<int>(py::len(row)) != m) throw InvalidInstance("each row of P must have m entries");
    for (int j = 0; j < m; ++j) inst.P(i, j) = to_integer(row[j]);
  }
  inst.q_max = to_integer(q_max);
  inst.d = to_rational(d);
  validate(inst);
  return inst;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Iterated LLL simultaneous Diophantine approximation";

  auto error = py::register_exception<Error>(mod, "Error");
  py::register_exception<ParseError>(mod, "ParseError", error.ptr());
  py::register_exception<InvalidInstance>(mod, "InvalidInstance", error.ptr());
  py::register_exception<ContractViolation>(mod, "ContractViolation", error.ptr());
  py::register_exception<InvariantViolation>(mod, "InvariantViolation", error.ptr());
  py::register_exception<BudgetExceeded>(mod, "BudgetExceeded", error.ptr());

  py::class_<ProblemInstance>(mod, "Instance")
      .def(py::init(&make_instance), py::arg("m"), py::arg("n"), py::arg("M"), py::arg("P"), py::arg("q_max"),
           py::arg("d") = 2)
      .def_readonly("m", &ProblemInstance::m)
      .def_readonly("n", &ProblemInstance::n)
      .def_readonly("M", &ProblemInstance::M)
      .def_property_readonly("q_max", [](const ProblemInstance& i) { return to_py(i.q_max); })
      .def_property_readonly("d", [](const ProblemInstance& i) { return to_py(i.d); })
      .def_property_readonly("P",
                             [](const ProblemInstance& i) {
                               py::list rows;
                               for (int r = 0; r < i.n; ++r) {
                                 py::list row;
                                 for (int c = 0; c < i.m; ++c) row.append(to_py(i.P(r, c)));
                                 rows.append(row);
                               }
                               return rows;
                             })
      .def("a", [](const ProblemInstance& i, std::size_t r, std::size_t c) { return to_py(i.a(r, c)); })
      .def_property_readonly("kprime", &num_iterations)
      .def_property_readonly("hash", &instance_hash)
      .def_property_readonly("warnings", &precision_warnings)
      .def("to_text", &format_instance)
      .def("__repr__", [](const ProblemInstance& i) {
        return "<Instance m=" + std::to_string(i.m) + " n=" + std::to_string(i.n) + " M=" + std::to_string(i.M) +
               " q_max=" + to_string(i.q_max) + ">";
      });

  mod.def("parse_instance", &parse_instance, py::arg("text"));
  mod.def("read_instance", &read_instance_file, py::arg("path"));
  mod.def(
      "random_instance",
      [](int m, int n, unsigned long M, const py::object& q_max, const py::object& d, std::uint64_t seed) {
        return random_instance(m, n, M, to_integer(q_max), to_rational(d), seed);
      },
      py::arg("m"), py::arg("n"), py::arg("M"), py::arg("q_max"), py::arg("d") = 2, py::arg("seed") = 1);
  mod.def("recommended_precision", [](int m, int n, const py::object& d) {
    return recommended_precision(m, n, to_rational(d));
  }, py::arg("m"), py::arg("n"), py::arg("d") = 2);

  mod.def(
      "approximate",
      [](const ProblemInstance& inst, bool dedup_records, bool warm_start) {
        RunOptions opt;
        opt.warm_start = warm_start;
        RunResult run;
        {
          py::gil_scoped_release release;
          run = run_illl(inst, opt);
        }
        py::list out;
        for (const auto& r : run.records) {
          if (dedup_records && r.duplicate) continue;
          out.append(record_dict(r, inst));
        }
        return out;
      },
      py::arg("instance"), py::arg("dedup") = false, py::arg("warm_start") = true,
      "Run the iteration; one dict per step with keys k, s, q, p, maxerr, theta, duplicate.");

  mod.def(
      "schedule",
      [](const ProblemInstance& inst) {
        py::list out;
        for (const auto& c : make_schedule(inst).chat) out.append(to_py(c));
        return out;
      },
      py::arg("instance"));

  mod.def(
      "certificate_json",
      [](const ProblemInstance& inst) {
        py::gil_scoped_release release;
        return certificate_to_json(make_certificate(run_illl(inst)));
      },
      py::arg("instance"));

  mod.def(
      "verify",
      [](const ProblemInstance& inst, int grid) {
        VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = verify_run(run_illl(inst), grid);
        }
        py::list out;
        for (const auto& c : rep.checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
      },
      py::arg("instance"), py::arg("grid") = 20, "List of (check name, passed, detail).");

  mod.def(
      "best_approximations",
      [](const ProblemInstance& inst, const py::object& limit, double budget) {
        std::vector<BestApproxEntry> entries;
        Integer lim = to_integer(limit);
        {
          py::gil_scoped_release release;
          entries = best_approximations(inst, lim, budget);
        }
        py::list out;
        for (const auto& e : entries) {
          py::dict d;
          d["q"] = to_py(e.q);
          d["s"] = to_py(e.s);
          d["maxerr"] = to_py(e.err);
          out.append(d);
        }
        return out;
      },
      py::arg("instance"), py::arg("limit"), py::arg("budget") = static_cast<double>(kDefaultEnumerationBudget));

  mod.def("ocf_distribution", [](double z) { return static_cast<double>(ocf_distribution(z)); }, py::arg("z"));
  mod.def(
      "ocf_samples",
      [](int count) {
        py::list out;
        for (const auto& s : ocf_samples(count)) out.append(py::make_tuple(s.z, static_cast<double>(s.F)));
        return out;
      },
      py::arg("count") = 201);

  mod.def("preset_names", &preset_names);
  mod.def(
      "preset_json",
      [](const std::string& name, bool paper_scale, std::uint64_t seed) {
        return plan_set_to_json(preset(name, paper_scale, seed));
      },
      py::arg("name"), py::arg("paper_scale") = false, py::arg("seed") = 1);

  mod.def(
      "theta_samples",
      [](const std::string& plan_json, bool dedup_records, unsigned threads) {
        PlanSet set = plan_set_from_json(plan_json);
        if (set.plans.size() != 1) throw Error("theta_samples expects exactly one plan");
        py::gil_scoped_release release;
        return run_plan(set.plans[0], threads).thetas(dedup_records);
      },
      py::arg("plan_json"), py::arg("dedup") = true, py::arg("threads") = 0);

  mod.def("sup_distance_to_ocf", &sup_distance_to_ocf, py::arg("samples"));

  mod.def(
      "write_bundle",
      [](const std::string& plan_json, const std::string& out, unsigned threads) {
        PlanSet set = plan_set_from_json(plan_json);
        py::gil_scoped_release release;
        return write_bundle(set, out, threads).directory.string();
      },
      py::arg("plan_json"), py::arg("out"), py::arg("threads") = 0,
      "Run every plan and write the CSV bundle; returns the output directory.");

  mod.attr("__version__") = tool_version();
}
