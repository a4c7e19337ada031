// Python bindings. Configurations cross the boundary as JSON text; the
// pimex package converts to and from dicts.

#include "pimex/commands.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using nlohmann::json;

namespace {

pimex::RunConfig parse(const std::string& text) {
  return pimex::config_from_json(json::parse(text));
}

std::vector<double> to_std(const pimex::Vector& v) { return {v.data(), v.data() + v.size()}; }

json gradient_json(const pimex::GradientResult& g) {
  return {{"J", g.J}, {"grad", to_std(g.grad)}, {"method", g.method}};
}

json table_json(const pimex::CsvTable& t) {
  json cols = json::object();
  for (size_t c = 0; c < t.header.size(); ++c) {
    std::vector<double> col;
    col.reserve(t.rows.size());
    for (const auto& row : t.rows) col.push_back(row[c]);
    cols[t.header[c]] = col;
  }
  return cols;
}

// Runs a cmd_* entry point; returns (exit status, log text).
std::pair<int, std::string> run_command(int (*cmd)(const pimex::RunConfig&, std::ostream&),
                                        const std::string& config) {
  const auto cfg = parse(config);
  std::ostringstream log;
  const int status = cmd(cfg, log);
  return {status, log.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partitioned IMEX Runge-Kutta integration with discrete sensitivities";

  // Translators run newest-first, so the base class is registered first.
  auto base = py::register_exception<pimex::Error>(m, "PimexError", PyExc_RuntimeError);
  py::register_exception<pimex::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<pimex::UnknownSchemeError>(m, "UnknownSchemeError", base.ptr());
  py::register_exception<pimex::NewtonError>(m, "NewtonError", base.ptr());
  py::register_exception<pimex::PhysicsError>(m, "PhysicsError", base.ptr());
  py::register_exception<pimex::OptimizationError>(m, "OptimizationError", base.ptr());
  py::register_exception<pimex::FormatError>(m, "FormatError", base.ptr());
  py::register_exception<json::exception>(m, "JsonError", PyExc_ValueError);

  m.def("scheme_names", &pimex::scheme_names, "Registered IMEX scheme names.");

  m.def(
      "verify_tableau",
      [](const std::string& name) { return pimex::tableau_report_json(pimex::verify(pimex::get_scheme(name))).dump(); },
      py::arg("name"), "Invariant and order-condition report of a scheme (JSON).");

  m.def(
      "tableau",
      [](const std::string& name) {
        const auto t = pimex::get_scheme(name);
        py::dict d;
        d["name"] = t.name;
        d["design_order"] = t.design_order;
        d["a_hat"] = t.a_hat;
        d["b_hat"] = t.b_hat;
        d["c_hat"] = t.c_hat;
        d["a"] = t.a;
        d["b"] = t.b;
        d["c"] = t.c;
        return d;
      },
      py::arg("name"), "Butcher coefficients of a scheme.");

  m.def(
      "default_config", [](const std::string& problem) {
        return pimex::config_to_json(pimex::default_config(pimex::problem_from_string(problem))).dump();
      },
      py::arg("problem"), "Normalized default configuration (JSON).");

  m.def(
      "normalize_config", [](const std::string& config) { return pimex::config_to_json(parse(config)).dump(); },
      py::arg("config"), "Validates a configuration and returns its normalized form (JSON).");

  m.def(
      "simulate",
      [](const std::string& config) {
        const auto r = pimex::simulate(parse(config));
        return json{{"J", r.J}, {"series", table_json(r.series)}}.dump();
      },
      py::arg("config"));

  m.def(
      "grad_check",
      [](const std::string& config) {
        const auto r = pimex::grad_check(parse(config));
        json out{{"adjoint", gradient_json(r.adjoint)},
                 {"direct", gradient_json(r.direct)},
                 {"fd", gradient_json(r.fd)},
                 {"rel_adjoint_direct", r.rel_adjoint_direct},
                 {"rel_adjoint_fd", r.rel_adjoint_fd},
                 {"passed", r.passed}};
        if (r.closed_form) {
          out["closed_form"] = *r.closed_form;
          out["rel_adjoint_closed_form"] = *r.rel_adjoint_closed_form;
        }
        return out.dump();
      },
      py::arg("config"));

  m.def(
      "gradient",
      [](const std::string& config, const pimex::Vector& mu, const std::string& method) {
        return gradient_json(pimex::objective_gradient(parse(config), mu, method)).dump();
      },
      py::arg("config"), py::arg("mu"), py::arg("method") = "adjoint",
      "Objective and gradient at mu by 'adjoint', 'direct' or 'fd'.");

  m.def(
      "optimize",
      [](const std::string& config) {
        const auto r = pimex::run_optimize(parse(config));
        return json{{"mu", to_std(r.result.mu)},
                    {"J", r.result.J},
                    {"converged", r.result.converged},
                    {"reason", r.result.reason},
                    {"nonincreasing", r.nonincreasing},
                    {"trace", pimex::trace_json(r.result.trace)}}
            .dump();
      },
      py::arg("config"));

  m.def(
      "order_study",
      [](const std::string& config) {
        const auto r = pimex::order_study(parse(config));
        json rows = json::array();
        for (const auto& row : r.rows)
          rows.push_back({{"scheme", row.scheme},
                          {"dt", row.dt},
                          {"error", row.error},
                          {"observed_order", row.observed_order ? json(*row.observed_order) : json(nullptr)}});
        return json{{"rows", rows}, {"schemes", r.summary}, {"passed", r.passed}}.dump();
      },
      py::arg("config"));

  m.def("run_simulate", [](const std::string& c) { return run_command(pimex::cmd_simulate, c); });
  m.def("run_grad_check", [](const std::string& c) { return run_command(pimex::cmd_grad_check, c); });
  m.def("run_optimize", [](const std::string& c) { return run_command(pimex::cmd_optimize, c); });
  m.def("run_order_study", [](const std::string& c) { return run_command(pimex::cmd_order_study, c); });

  m.def("scalar_decay_objective", &pimex::scalar_decay_objective, py::arg("mu"), py::arg("T"),
        py::arg("u0") = 1.0);
  m.def("scalar_decay_gradient", &pimex::scalar_decay_gradient, py::arg("mu"), py::arg("T"),
        py::arg("u0") = 1.0);
  m.def("roe_flux", &pimex::roe_flux_1d, py::arg("UL"), py::arg("UR"), py::arg("gamma") = 1.4,
        py::arg("entropy_fix") = 0.0, "Roe flux across a fixed face.");
}
