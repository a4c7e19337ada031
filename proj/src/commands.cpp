#include "pimex/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>

namespace pimex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Vector mu_of(const RunConfig& cfg) {
  return Eigen::Map<const Vector>(cfg.mu.data(), static_cast<Index>(cfg.mu.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  return fs::path(cfg.output_dir) / name;
}

// Runs a command body; any library error becomes a diagnostic and exit 2.
template <class F>
int guarded(const char* name, std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log << "pimex " << name << ": error: " << e.what() << '\n';
    return 2;
  }
}

const char* verdict(bool ok) { return ok ? "ok" : "FAILED"; }

}  // namespace

std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return cfg.output_dir;
}

std::unique_ptr<TrajectoryStore> make_trajectory_store(const RunConfig& cfg) {
  if (cfg.trajectory == "memory") return std::make_unique<MemoryTrajectory>();
  if (cfg.trajectory.rfind("file:", 0) == 0 && cfg.trajectory.size() > 5) {
    fs::path p = cfg.trajectory.substr(5);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return std::make_unique<FileTrajectory>(p);
  }
  throw ConfigError("trajectory must be 'memory' or 'file:<path>'");
}

// ---------------------------------------------------------------- simulate

SimulationResult simulate(const RunConfig& cfg) {
  cfg.validate();
  const auto tab = get_scheme(cfg.scheme);
  const auto prob = make_problem(cfg);
  const auto grid = cfg.time_grid();
  const bool piston = cfg.problem == Problem::Piston;

  SimulationResult res;
  auto& series = res.series;
  series.header = {"t"};
  if (piston) {
    series.header.insert(series.header.end(), {"u_s", "udot_s", "p_interface"});
  } else {
    for (Index i = 0; i < prob.system.size(); ++i)
      for (Index k = 0; k < prob.system[i].state_dim(); ++k)
        series.header.push_back("u" + std::to_string(i) + "_" + std::to_string(k));
  }
  series.header.push_back("J_running");

  auto add_row = [&](double t, const PartitionedState& u, double J) {
    std::vector<double> row{t};
    if (piston) {
      row.push_back(u[kStructure](1));
      row.push_back(u[kStructure](0));
      row.push_back(piston_interface_pressure(cfg.piston, u));
    } else {
      for (const auto& ui : u) row.insert(row.end(), ui.data(), ui.data() + ui.size());
    }
    row.push_back(J);
    series.rows.push_back(std::move(row));
  };

  add_row(grid.front(), prob.system.initial_state(), 0.0);
  auto store = make_trajectory_store(cfg);
  const auto r = integrate(prob.system, tab, *prob.qoi, grid, *store, cfg.newton(),
                           [&](Index, double t, const PartitionedState& u, double J) {
                             add_row(t, u, J);
                           });
  res.J = r.J;
  res.final_state = r.final_state;
  return res;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  return guarded("simulate", log, [&] {
    const auto res = simulate(cfg);
    const auto prob = make_problem(cfg);
    json norms = json::object();
    for (Index i = 0; i < prob.system.size(); ++i)
      norms[prob.system[i].name()] = res.final_state[static_cast<size_t>(i)].norm();
    json summary{{"problem", to_string(cfg.problem)},
                 {"scheme", cfg.scheme},
                 {"dt", cfg.dt},
                 {"t0", cfg.t0},
                 {"T", cfg.T},
                 {"mu", cfg.mu},
                 {"steps", res.series.rows.size() - 1},
                 {"J", res.J},
                 {"final_state_norms", norms}};
    write_text(out_path(cfg, "timeseries.csv"), res.series.str());
    write_json(out_path(cfg, "summary.json"), summary);
    log << "simulate " << to_string(cfg.problem) << " scheme=" << cfg.scheme << " dt=" << cfg.dt
        << " steps=" << res.series.rows.size() - 1 << "\n  J = " << res.J << '\n';
    for (auto it = norms.begin(); it != norms.end(); ++it)
      log << "  |u_" << it.key() << "| = " << it.value().get<double>() << '\n';
    log << "  wrote " << out_path(cfg, "timeseries.csv").string() << ", "
        << out_path(cfg, "summary.json").string() << '\n';
    return 0;
  });
}

// -------------------------------------------------------------- grad-check

double relative_error(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("gradient lengths differ");
  double worst = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const double diff = std::abs(a(k) - b(k));
    if (diff == 0.0) continue;
    worst = std::max(worst, diff / std::abs(b(k)));
  }
  return worst;
}

GradCheckResult grad_check(const RunConfig& cfg) { return grad_check(cfg, mu_of(cfg)); }

GradCheckResult grad_check(const RunConfig& cfg, const Vector& mu) {
  cfg.validate();
  const auto tab = get_scheme(cfg.scheme);
  const auto prob = make_problem(cfg, mu);
  const auto grid = cfg.time_grid();
  const auto newton = cfg.newton();

  GradCheckResult res;
  auto store = make_trajectory_store(cfg);
  integrate(prob.system, tab, *prob.qoi, grid, *store, newton);

  res.lambda_norms.header = {"n", "t"};
  for (Index i = 0; i < prob.system.size(); ++i)
    res.lambda_norms.header.push_back("lambda_" + prob.system[i].name());
  res.adjoint = gradient_adjoint(prob.system, tab, *prob.qoi, *store,
                                 [&](Index n, const std::vector<Vector>& lambda) {
                                   std::vector<double> row{static_cast<double>(n),
                                                           grid[static_cast<size_t>(n)]};
                                   for (const auto& l : lambda) row.push_back(l.norm());
                                   res.lambda_norms.rows.push_back(std::move(row));
                                 });
  std::reverse(res.lambda_norms.rows.begin(), res.lambda_norms.rows.end());
  res.direct = gradient_direct(prob.system, tab, *prob.qoi, *store);
  res.fd = {res.adjoint.J,
            gradient_fd(prob.system, tab, *prob.qoi, grid, cfg.eps, cfg.parallel_fd, newton),
            "fd"};

  res.rel_adjoint_direct = relative_error(res.adjoint.grad, res.direct.grad);
  res.rel_adjoint_fd = relative_error(res.adjoint.grad, res.fd.grad);
  res.passed = res.rel_adjoint_direct <= cfg.tol_adjoint_direct &&
               res.rel_adjoint_fd <= cfg.tol_adjoint_fd;

  const bool squared_state = cfg.qoi == "default" || cfg.qoi == "state-squared" ||
                             cfg.qoi == "component:0:0";
  if (cfg.problem == Problem::ScalarDecay && squared_state) {
    const double exact = scalar_decay_gradient(mu(0), cfg.T - cfg.t0, cfg.decay_u0);
    res.closed_form = exact;
    res.rel_adjoint_closed_form = relative_error(res.adjoint.grad, Vector::Constant(1, exact));
    res.passed = res.passed && *res.rel_adjoint_closed_form <= kClosedFormTolerance;
  }
  return res;
}

int cmd_grad_check(const RunConfig& cfg, std::ostream& log) {
  return guarded("grad-check", log, [&] {
    const auto r = grad_check(cfg);
    write_json(out_path(cfg, "gradient_adjoint.json"), gradient_report(r.adjoint, cfg.scheme, cfg.dt));
    write_json(out_path(cfg, "gradient_direct.json"), gradient_report(r.direct, cfg.scheme, cfg.dt));
    write_json(out_path(cfg, "gradient_fd.json"), gradient_report(r.fd, cfg.scheme, cfg.dt));
    write_text(out_path(cfg, "adjoint_lambda.csv"), r.lambda_norms.str());

    json report{{"problem", to_string(cfg.problem)},
                {"scheme", cfg.scheme},
                {"dt", cfg.dt},
                {"mu", cfg.mu},
                {"eps", cfg.eps},
                {"J", r.adjoint.J},
                {"adjoint", to_std(r.adjoint.grad)},
                {"direct", to_std(r.direct.grad)},
                {"fd", to_std(r.fd.grad)},
                {"rel_adjoint_direct", r.rel_adjoint_direct},
                {"rel_adjoint_fd", r.rel_adjoint_fd},
                {"tol_adjoint_direct", cfg.tol_adjoint_direct},
                {"tol_adjoint_fd", cfg.tol_adjoint_fd},
                {"passed", r.passed}};
    if (r.closed_form) {
      report["closed_form"] = *r.closed_form;
      report["rel_adjoint_closed_form"] = *r.rel_adjoint_closed_form;
      report["tol_closed_form"] = kClosedFormTolerance;
    }
    write_json(out_path(cfg, "grad_check.json"), report);

    log.precision(12);
    log << "grad-check " << to_string(cfg.problem) << " scheme=" << cfg.scheme
        << " dt=" << cfg.dt << "\n  J       = " << r.adjoint.J
        << "\n  adjoint = " << r.adjoint.grad.transpose()
        << "\n  direct  = " << r.direct.grad.transpose()
        << "\n  fd      = " << r.fd.grad.transpose() << '\n';
    log.precision(3);
    log << "  |adjoint-direct| rel = " << r.rel_adjoint_direct << " (tol "
        << cfg.tol_adjoint_direct << ") "
        << verdict(r.rel_adjoint_direct <= cfg.tol_adjoint_direct) << '\n'
        << "  |adjoint-fd|     rel = " << r.rel_adjoint_fd << " (tol " << cfg.tol_adjoint_fd
        << ") " << verdict(r.rel_adjoint_fd <= cfg.tol_adjoint_fd) << '\n';
    if (r.closed_form) {
      log << "  |adjoint-exact|  rel = " << *r.rel_adjoint_closed_form << " (tol "
          << kClosedFormTolerance << ") "
          << verdict(*r.rel_adjoint_closed_form <= kClosedFormTolerance) << '\n';
    }
    log << (r.passed ? "grad-check passed\n" : "grad-check FAILED\n");
    return r.passed ? 0 : 1;
  });
}

// ---------------------------------------------------------------- optimize

GradientResult objective_gradient(const RunConfig& cfg, const Vector& mu, const std::string& kind) {
  const auto tab = get_scheme(cfg.scheme);
  const auto prob = make_problem(cfg, mu);
  const auto grid = cfg.time_grid();
  if (kind == "fd") {
    const double J = evaluate_objective(prob.system, tab, *prob.qoi, grid, cfg.newton());
    return {J, gradient_fd(prob.system, tab, *prob.qoi, grid, cfg.eps, cfg.parallel_fd, cfg.newton()),
            "fd"};
  }
  auto store = make_trajectory_store(cfg);
  integrate(prob.system, tab, *prob.qoi, grid, *store, cfg.newton());
  if (kind == "adjoint") return gradient_adjoint(prob.system, tab, *prob.qoi, *store);
  if (kind == "direct") return gradient_direct(prob.system, tab, *prob.qoi, *store);
  throw ConfigError("unknown gradient kind '" + kind + "'");
}

OptimizeResult run_optimize(const RunConfig& cfg) {
  cfg.validate();
  OptimizeResult out;
  int iter = 0;
  auto fn = [&](const Vector& mu) {
    if (!cfg.optimize.cross_check) return objective_gradient(cfg, mu, cfg.optimize.gradient);
    const auto r = grad_check(cfg, mu);
    CrossCheck c{iter++, r.rel_adjoint_direct, r.rel_adjoint_fd,
                 r.adjoint.grad.lpNorm<Eigen::Infinity>(), r.passed};
    out.cross_checks.push_back(c);
    if (cfg.optimize.gradient == "direct") return r.direct;
    if (cfg.optimize.gradient == "fd") return r.fd;
    return r.adjoint;
  };
  MinimizeOptions opt;
  opt.pg_tolerance = cfg.optimize.pg_tolerance;
  opt.max_iterations = cfg.optimize.max_iterations;
  out.result = minimize(fn, mu_of(cfg), make_bounds(cfg), opt);
  const auto& its = out.result.trace.iterates;
  for (size_t k = 1; k < its.size(); ++k)
    if (its[k].J > its[k - 1].J) out.nonincreasing = false;
  return out;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& log) {
  return guarded("optimize", log, [&] {
    const auto r = run_optimize(cfg);
    const auto& res = r.result;
    const bool cross_ok = std::all_of(r.cross_checks.begin(), r.cross_checks.end(),
                                      [](const CrossCheck& c) { return c.passed; });
    const int iterations = static_cast<int>(res.trace.iterates.size()) - 1;

    json checks = json::array();
    for (const auto& c : r.cross_checks)
      checks.push_back({{"evaluation", c.iter},
                        {"rel_adjoint_direct", c.rel_adjoint_direct},
                        {"rel_adjoint_fd", c.rel_adjoint_fd},
                        {"grad_norm", c.grad_norm},
                        {"passed", c.passed}});
    json summary{{"problem", to_string(cfg.problem)},
                 {"scheme", cfg.scheme},
                 {"dt", cfg.dt},
                 {"gradient", cfg.optimize.gradient},
                 {"mu0", cfg.mu},
                 {"mu", to_std(res.mu)},
                 {"J", res.J},
                 {"grad", to_std(res.grad)},
                 {"converged", res.converged},
                 {"reason", res.reason},
                 {"iterations", iterations},
                 {"nonincreasing", r.nonincreasing},
                 {"cross_checks", checks},
                 {"trace", trace_json(res.trace)}};
    write_text(out_path(cfg, "trace.csv"), trace_csv(res.trace));
    write_json(out_path(cfg, "optimize.json"), summary);

    log.precision(12);
    for (const auto& it : res.trace.iterates)
      log << "  iter " << it.iter << "  mu = " << it.mu.transpose() << "  J = " << it.J
          << "  |pg| = " << it.pg_norm << '\n';
    log << "optimize: " << res.reason << " after " << iterations << " iterations, mu = "
        << res.mu.transpose() << '\n';
    if (!r.nonincreasing) log << "  objective trace is not nonincreasing\n";
    if (!cross_ok) log << "  gradient cross-check FAILED at some iterate\n";
    return res.converged && r.nonincreasing && cross_ok ? 0 : 1;
  });
}

// ------------------------------------------------------------- order-study

OrderStudyResult order_study(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.problem == Problem::Piston)
    throw ConfigError("order-study needs a problem with an analytic solution "
                      "(linear-model or scalar-decay)");
  const Vector mu = mu_of(cfg);
  const double span = cfg.T - cfg.t0;
  Vector exact;
  if (cfg.problem == Problem::LinearModel) {
    LinearModelParams p = cfg.linear;
    p.mu = mu(0);
    exact = linear_model_solution(p, span);
  } else {
    exact = Vector::Constant(1, cfg.decay_u0 * std::exp(-mu(0) * span));
  }
  // Errors below this are dominated by round-off and carry no order information.
  constexpr double floor = 1e-12;

  OrderStudyResult res;
  res.passed = true;
  res.summary = json::object();
  const auto prob = make_problem(cfg);
  for (const auto& name : cfg.order_study.schemes) {
    const auto tab = get_scheme(name);
    double min_order = std::numeric_limits<double>::infinity();
    double max_order = -std::numeric_limits<double>::infinity();
    std::optional<double> prev_err, prev_dt;
    for (double dt : cfg.order_study.dts) {
      const auto grid = uniform_grid(cfg.t0, cfg.T, dt);
      MemoryTrajectory store;
      const auto r = integrate(prob.system, tab, *prob.qoi, grid, store, cfg.newton());
      Vector u(exact.size());
      Index off = 0;
      for (const auto& ui : r.final_state) {
        u.segment(off, ui.size()) = ui;
        off += ui.size();
      }
      OrderRow row{name, dt, (u - exact).lpNorm<Eigen::Infinity>(), std::nullopt};
      if (prev_err && *prev_err > floor && row.error > floor) {
        row.observed_order = std::log(*prev_err / row.error) / std::log(*prev_dt / dt);
        min_order = std::min(min_order, *row.observed_order);
        max_order = std::max(max_order, *row.observed_order);
      }
      prev_err = row.error;
      prev_dt = dt;
      res.rows.push_back(row);
    }
    const bool measured = std::isfinite(min_order);
    const bool ok = measured && std::abs(min_order - tab.design_order) <=
                                    cfg.order_study.order_tolerance &&
                    std::abs(max_order - tab.design_order) <= cfg.order_study.order_tolerance;
    res.summary[name] = {{"design_order", tab.design_order},
                         {"min_observed_order", measured ? json(min_order) : json(nullptr)},
                         {"max_observed_order", measured ? json(max_order) : json(nullptr)},
                         {"passed", ok}};
    res.passed = res.passed && ok;
  }
  return res;
}

int cmd_order_study(const RunConfig& cfg, std::ostream& log) {
  return guarded("order-study", log, [&] {
    const auto r = order_study(cfg);
    json rows = json::array();
    std::string csv = "scheme,dt,error,observed_order\n";
    log << "order-study " << to_string(cfg.problem) << " T=" << cfg.T << '\n';
    char buf[160];
    for (const auto& row : r.rows) {
      rows.push_back({{"scheme", row.scheme},
                      {"dt", row.dt},
                      {"error", row.error},
                      {"observed_order", row.observed_order ? json(*row.observed_order)
                                                            : json(nullptr)}});
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,", row.scheme.c_str(), row.dt, row.error);
      csv += buf;
      if (row.observed_order) {
        std::snprintf(buf, sizeof buf, "%.17g", *row.observed_order);
        csv += buf;
      }
      csv += '\n';
      std::snprintf(buf, sizeof buf, "  %-6s dt=%-9.5g error=%-12.4e order=", row.scheme.c_str(),
                    row.dt, row.error);
      log << buf;
      if (row.observed_order) {
        std::snprintf(buf, sizeof buf, "%.3f", *row.observed_order);
        log << buf;
      } else {
        log << "-";
      }
      log << '\n';
    }
    for (auto it = r.summary.begin(); it != r.summary.end(); ++it)
      log << "  " << it.key() << ": design order " << it.value()["design_order"] << ", "
          << verdict(it.value()["passed"].get<bool>()) << '\n';
    write_text(out_path(cfg, "order_study.csv"), csv);
    write_json(out_path(cfg, "order_study.json"),
               {{"problem", to_string(cfg.problem)},
                {"T", cfg.T},
                {"order_tolerance", cfg.order_study.order_tolerance},
                {"rows", rows},
                {"schemes", r.summary},
                {"passed", r.passed}});
    return r.passed ? 0 : 1;
  });
}

// --------------------------------------------------------- verify-tableaux

int cmd_verify_tableaux(const RunConfig& cfg, std::ostream& log) {
  return guarded("verify-tableaux", log, [&] {
    json reports = json::array();
    bool ok = true;
    for (const auto& name : scheme_names()) {
      const auto report = verify(get_scheme(name));
      ok = ok && report.all_passed();
      reports.push_back(tableau_report_json(report));
      log << name << ": " << verdict(report.all_passed()) << '\n';
      for (const auto& c : report.checks) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-32s %-6s defect %.3e\n", c.name.c_str(),
                      verdict(c.passed), c.defect);
        log << buf;
      }
    }
    write_json(out_path(cfg, "tableaux.json"), {{"schemes", reports}, {"passed", ok}});
    return ok ? 0 : 1;
  });
}

}  // namespace pimex
