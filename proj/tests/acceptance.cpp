// Acceptance criteria 1-6. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include "pimex/commands.hpp"

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace pimex;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

RunConfig piston_config(const std::string& scheme) {
  RunConfig cfg = default_config(Problem::Piston);
  cfg.scheme = scheme;
  cfg.dt = 0.01;
  cfg.T = 1.0;
  cfg.piston.n_cells = 100;
  cfg.eps = 1e-6;
  return cfg;
}

// Shared by criteria 1 and 2: one grad-check per scheme.
const std::vector<GradCheckResult>& piston_checks() {
  static const std::vector<GradCheckResult> results = [] {
    std::vector<GradCheckResult> r;
    for (const auto& s : scheme_names()) r.push_back(grad_check(piston_config(s)));
    return r;
  }();
  return results;
}

void criterion1(Outcome& o) {
  const auto& checks = piston_checks();
  double worst_ad = 0.0, worst_af = 0.0;
  for (size_t k = 0; k < checks.size(); ++k) {
    worst_ad = std::max(worst_ad, checks[k].rel_adjoint_direct);
    worst_af = std::max(worst_af, checks[k].rel_adjoint_fd);
    o.require(checks[k].rel_adjoint_direct <= 1e-10, scheme_names()[k] + " adjoint vs direct");
    o.require(checks[k].rel_adjoint_fd <= 1e-5, scheme_names()[k] + " adjoint vs FD");
  }
  o.detail << "max rel |adjoint-direct| = " << worst_ad << ", max rel |adjoint-FD| = " << worst_af;
}

void criterion2(Outcome& o) {
  const auto& checks = piston_checks();
  double jmin = INFINITY, jmax = -INFINITY;
  for (size_t k = 0; k < checks.size(); ++k) {
    const double J = checks[k].adjoint.J, g = checks[k].adjoint.grad(0);
    o.detail << scheme_names()[k] << ": J = " << J << ", dJ/dmu = " << g << "; ";
    o.require(J >= 3e-3 && J <= 8e-3, scheme_names()[k] + " J range");
    o.require(g >= -1e-3 && g <= -3e-4, scheme_names()[k] + " gradient range");
    if (k >= 1) {
      jmin = std::min(jmin, J);
      jmax = std::max(jmax, J);
    }
  }
  const double spread = (jmax - jmin) / jmin;
  o.detail << "IMEX2-4 spread = " << 100.0 * spread << "%";
  o.require(spread <= 0.01, "IMEX2-4 J agreement");
}

void criterion3(Outcome& o) {
  RunConfig cfg = default_config(Problem::LinearModel);
  cfg.order_study.dts = {0.1, 0.05, 0.025, 0.0125};
  cfg.order_study.order_tolerance = 0.4;
  const auto r = order_study(cfg);
  for (const auto& s : scheme_names()) {
    const auto& e = r.summary.at(s);
    o.detail << s << ": orders [" << e.at("min_observed_order").get<double>() << ", "
             << e.at("max_observed_order").get<double>() << "] design "
             << e.at("design_order").get<int>() << "; ";
  }
  o.require(r.passed, "observed order within 0.4 of design order");
}

void criterion4(Outcome& o) {
  RunConfig cfg = default_config(Problem::ScalarDecay);
  cfg.scheme = "imex4";
  cfg.dt = 1e-3;
  cfg.T = 1.0;
  cfg.mu = {1.0};
  const auto r = grad_check(cfg);
  const double exact = scalar_decay_gradient(1.0, 1.0);
  const double rel = std::abs(r.adjoint.grad(0) - exact) / std::abs(exact);
  o.detail << "adjoint = " << r.adjoint.grad(0) << ", analytic = " << exact << ", rel = " << rel;
  o.require(rel <= 1e-6, "closed-form gradient");
}

void criterion5(Outcome& o) {
  RunConfig cfg = piston_config("imex1");
  cfg.mu = {1.0};
  cfg.optimize.lower = std::vector<double>{0.0};
  cfg.optimize.upper = std::vector<double>{10.0};
  cfg.optimize.cross_check = true;
  const auto r = run_optimize(cfg);
  const auto& res = r.result;
  const int iterations = static_cast<int>(res.trace.iterates.size()) - 1;
  bool cross = true;
  for (const auto& c : r.cross_checks) cross = cross && c.passed;
  bool in_box = true;
  for (const auto& it : res.trace.iterates) in_box = in_box && it.mu(0) >= 0.0 && it.mu(0) <= 10.0;
  o.detail << "mu* = " << res.mu(0) << " after " << iterations << " iterations, "
           << r.cross_checks.size() << " cross-checked evaluations";
  o.require(res.converged, "converged");
  o.require(std::abs(res.mu(0) - 10.0) <= 1e-6, "mu* = 10");
  o.require(iterations <= 20, "<= 20 iterations");
  o.require(r.nonincreasing, "nonincreasing objective");
  o.require(in_box, "iterates inside the box");
  o.require(cross, "adjoint/direct/FD agreement at every iterate");
}

// ---- criterion 6: property suites

double tableau_defect() {
  double worst = 0.0;
  for (const auto& s : scheme_names()) {
    const auto rep = verify(get_scheme(s));
    if (!rep.all_passed()) return INFINITY;
    for (const auto& c : rep.checks) worst = std::max(worst, c.defect);
  }
  return worst;
}

double splitting_defect() {
  const auto sys = build_piston(1.0);
  double worst = 0.0;
  for (const auto& s : scheme_names()) {
    const auto tab = get_scheme(s);
    MemoryTrajectory store;
    integrate(sys, tab, *piston_qoi(), uniform_grid(0.0, 1.0, 0.01), store);
    for (Index n = 1; n <= store.size(); ++n) {
      const auto& rec = store.at(n);
      for (Index j = 0; j < tab.s; ++j) {
        const auto js = static_cast<size_t>(j);
        for (Index i = 0; i < sys.size(); ++i) {
          const auto is = static_cast<size_t>(i);
          const double t = rec.stage_time[js];
          const Vector c = sys[i].coupling(rec.stage_state[js], sys.mu(), t);
          const Vector r = sys[i].residual(rec.stage_state[js][is], c, sys.mu(), t);
          const Vector lhs = sys.mass(i) * (rec.k_implicit[js][is] + rec.k_explicit[js][is]);
          const double scale = rec.dt * std::max(1.0, r.lpNorm<Eigen::Infinity>());
          worst = std::max(worst, (lhs - rec.dt * r).lpNorm<Eigen::Infinity>() / scale);
        }
      }
    }
  }
  return worst;
}

double gcl_defect() {
  PistonConfig cfg;
  cfg.p_ref = cfg.p0;
  cfg.mesh_d0.resize(static_cast<size_t>(cfg.n_cells - 1));
  for (size_t k = 0; k < cfg.mesh_d0.size(); ++k)
    cfg.mesh_d0[k] = 0.2 * cfg.h() * std::sin(0.7 * static_cast<double>(k + 1));
  const auto sys = build_piston(cfg);
  const FluidModel1D fluid(cfg);
  const double E0 = cfg.p0 / (cfg.gamma - 1.0);
  double worst = 0.0;
  for (const auto& s : scheme_names()) {
    MemoryTrajectory store;
    integrate(sys, get_scheme(s), *piston_qoi(), uniform_grid(0.0, 1.0, 0.01), store, {},
              [&](Index, double t, const PartitionedState& u, double) {
                const Matrix U = fluid.physical_state(u[kFluid], fluid.coupling(u, sys.mu(), t));
                for (Index k = 0; k < U.rows(); ++k)
                  worst = std::max({worst, std::abs(U(k, 0) - cfg.rho0), std::abs(U(k, 1)),
                                    std::abs(U(k, 2) - E0)});
              });
  }
  return worst;
}

double jacobian_defect() {
  double worst = 0.0;
  auto all = [&](const CoupledSystem& sys, const PartitionedState& s, double t) {
    for (Index i = 0; i < sys.size(); ++i)
      worst = std::max(worst, test::subsystem_jacobian_error(sys, i, s, t));
  };
  const auto nl = test::nonlinear_system();
  all(nl, {Eigen::Vector2d(0.3, -1.2), Vector::Constant(1, 0.8)}, 0.3);
  LinearModelParams lp;
  lp.v0 = {0.5, -1.0};
  all(build_linear_model(lp), {Vector::Constant(1, 0.4), Vector::Constant(1, -0.7)}, 0.1);
  all(build_scalar_decay(1.3, 2.0), {Vector::Constant(1, 0.6)}, 0.0);
  PistonConfig pc;
  pc.n_cells = 20;
  pc.c_s = 0.1;
  pc.c_m = 0.2;
  pc.udot_s0 = -0.3;
  const auto piston = build_piston(pc);
  MemoryTrajectory store;
  const auto r = integrate(piston, get_scheme("imex2"), *piston_qoi(), uniform_grid(0.0, 0.3, 0.01), store);
  all(piston, r.final_state, 0.3);
  return worst;
}

bool trajectory_round_trip() {
  const auto sys = build_piston(1.0);
  MemoryTrajectory mem;
  integrate(sys, get_scheme("imex3"), *piston_qoi(), uniform_grid(0.0, 0.1, 0.01), mem);
  const auto path = std::filesystem::temp_directory_path() / "pimex-acceptance.traj";
  write_trajectory(mem, path);
  const auto back = read_trajectory(path);
  std::filesystem::remove(path);
  if (back.size() != mem.size() || !(back.layout() == mem.layout())) return false;
  for (Index n = 1; n <= mem.size(); ++n)
    if (!(back.at(n) == mem.at(n))) return false;
  return true;
}

double transpose_defect() {
  const auto sys = test::four_state_system();
  test::ZeroQoi qoi;
  double worst = 0.0;
  for (const auto& s : scheme_names()) {
    const auto tab = get_scheme(s);
    const std::vector<double> grid{0.0, 0.1, 0.25, 0.3};
    MemoryTrajectory store;
    integrate(sys, tab, qoi, grid, store);
    Matrix Phi = Matrix::Identity(4, 4), PhiT(4, 4);
    for (Index n = 1; n <= 3; ++n) {
      Matrix S(4, 4);
      for (Index k = 0; k < 4; ++k)
        S.col(k) = test::stack4(step(sys, tab, qoi, test::split4(Vector::Unit(4, k)),
                                     store.at(n).t_start, store.at(n).dt).u);
      Phi = S * Phi;
    }
    for (Index k = 0; k < 4; ++k) {
      std::vector<Vector> lambda = test::split4(Vector::Unit(4, k));
      Vector grad = Vector::Zero(1);
      for (Index n = 3; n >= 1; --n)
        lambda = sweep_adjoint_step(sys, tab, qoi, store.at(n), lambda, grad).lambda;
      PhiT.col(k) = test::stack4(lambda);
    }
    worst = std::max(worst, (PhiT - Phi.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

void criterion6(Outcome& o) {
  const double tab = tableau_defect();
  const double split = splitting_defect();
  const double gcl = gcl_defect();
  const double jac = jacobian_defect();
  const bool traj = trajectory_round_trip();
  const double tr = transpose_defect();
  o.detail << "tableau defect " << tab << ", splitting " << split << ", GCL " << gcl
           << ", Jacobian " << jac << ", trajectory " << (traj ? "bit-exact" : "differs")
           << ", transpose " << tr;
  o.require(tab < 1e-12, "tableau invariants");
  o.require(split < 1e-11, "splitting identity");
  o.require(gcl <= 1e-12, "uniform flow preservation");
  o.require(jac <= 1e-5, "FD Jacobian harness");
  o.require(traj, "trajectory round trip");
  o.require(tr <= 1e-13, "adjoint transpose equivalence");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3},
      {4, criterion4}, {5, criterion5}, {6, criterion6}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    o.detail.precision(4);
    const auto start = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", id, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
