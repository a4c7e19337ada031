#include "pimex/stepper.hpp"

#include "linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pimex {
namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

void require_finite(const Vector& v, const char* what, Index stage, Index subsystem, double t) {
  if (!all_finite(v)) {
    std::ostringstream msg;
    msg << "non-finite " << what << " in stage " << stage + 1 << " of subsystem " << subsystem
        << " at t = " << t;
    throw NonFiniteError(msg.str());
  }
}

// Solves M k - dt r(seed + a_jj k, chat) = 0 for k by Newton's method.
Vector solve_implicit_stage(const CoupledSystem& sys, Index i, Index j, const Vector& seed,
                            const Vector& chat, double a_jj, double dt, double t,
                            const NewtonOptions& opts) {
  const Subsystem& sub = sys[i];
  const Vector& mu = sys.mu();
  const Matrix& M = sys.mass(i);

  if (a_jj == 0.0) {
    Vector k = dt * sys.mass_solve(i, sub.residual(seed, chat, mu, t));
    require_finite(k, "stage velocity", j, i, t);
    return k;
  }

  Vector k = Vector::Zero(seed.size());
  Vector r = sub.residual(seed, chat, mu, t);
  require_finite(r, "residual", j, i, t);
  const double scale = std::max(1.0, r.lpNorm<Eigen::Infinity>());
  const double tol = opts.tolerance * dt * scale;
  Vector R = -dt * r;
  double norm = R.lpNorm<Eigen::Infinity>();
  double prev = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (norm <= tol) return k;
    // Round-off floor: accept once progress has stalled close to tolerance.
    if (norm > 0.5 * prev && norm <= 1e3 * tol) return k;
    const Vector u = seed + a_jj * k;
    const Matrix jac = M - dt * a_jj * sub.d_residual_d_state(u, chat, mu, t);
    detail::StageSolver lu;
    lu.compute(jac);
    if (!lu.ok()) {
      std::ostringstream msg;
      msg << "singular Newton matrix in stage " << j + 1 << " of subsystem " << i << " at t = " << t;
      throw NewtonError(msg.str(), j, i, norm);
    }
    const Vector dk = lu.solve(Vector(-R));
    require_finite(dk, "Newton update", j, i, t);
    k += dk;
    r = sub.residual(seed + a_jj * k, chat, mu, t);
    require_finite(r, "residual", j, i, t);
    R = M * k - dt * r;
    prev = norm;
    norm = R.lpNorm<Eigen::Infinity>();
  }
  if (norm <= tol) return k;
  std::ostringstream msg;
  msg << "Newton iteration for stage " << j + 1 << " of subsystem " << i << " ('" << sub.name()
      << "') did not converge at t = " << t << ": residual " << norm << " > " << tol;
  throw NewtonError(msg.str(), j, i, norm);
}

}  // namespace

PartitionedState predictor_arguments(StateSpan stage_states, StateSpan prev_state, Index i) {
  PartitionedState args(prev_state.begin(), prev_state.end());
  for (Index p = 0; p < i; ++p) args[static_cast<size_t>(p)] = stage_states[static_cast<size_t>(p)];
  return args;
}

Vector predictor_eval(const CoupledSystem& sys, Index i, StateSpan stage_states,
                      StateSpan prev_state, double t) {
  const PartitionedState args = predictor_arguments(stage_states, prev_state, i);
  return sys[i].coupling(args, sys.mu(), t);
}

StepResult step(const CoupledSystem& sys, const ImexTableauPair& tab, const QoiModel& qoi,
                const PartitionedState& u_prev, double t_prev, double dt, Index step_index,
                const NewtonOptions& newton) {
  sys.check_state(u_prev);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("time step must be positive and finite");
  const Index m = sys.size();
  const Index s = tab.s;
  const Vector& mu = sys.mu();

  StageRecord rec;
  rec.step = step_index;
  rec.t_start = t_prev;
  rec.dt = dt;
  rec.u_prev = u_prev;
  rec.stage_time.resize(static_cast<size_t>(s));
  rec.stage_state.assign(static_cast<size_t>(s), PartitionedState(static_cast<size_t>(m)));
  rec.k_implicit.assign(static_cast<size_t>(s), PartitionedState(static_cast<size_t>(m)));
  rec.k_explicit.assign(static_cast<size_t>(s), PartitionedState(static_cast<size_t>(m)));
  rec.predictor.assign(static_cast<size_t>(s), PartitionedState(static_cast<size_t>(m)));

  for (Index j = 0; j < s; ++j) {
    const auto js = static_cast<size_t>(j);
    const double tj = t_prev + tab.c(j) * dt;
    rec.stage_time[js] = tj;
    auto& uj = rec.stage_state[js];

    // Implicit sweep in subsystem order, coupling data from the predictor.
    for (Index i = 0; i < m; ++i) {
      const auto is = static_cast<size_t>(i);
      Vector seed = u_prev[is];
      for (Index p = 0; p < j; ++p) {
        const auto ps = static_cast<size_t>(p);
        seed += tab.a_hat(j, p) * rec.k_explicit[ps][is] + tab.a(j, p) * rec.k_implicit[ps][is];
      }
      rec.predictor[js][is] = predictor_eval(sys, i, uj, u_prev, tj);
      require_finite(rec.predictor[js][is], "coupling data", j, i, tj);
      const double ajj = tab.a(j, j);
      rec.k_implicit[js][is] =
          solve_implicit_stage(sys, i, j, seed, rec.predictor[js][is], ajj, dt, tj, newton);
      uj[is] = seed + ajj * rec.k_implicit[js][is];
    }

    // Explicit correction toward the fully coupled velocity.
    for (Index i = 0; i < m; ++i) {
      const auto is = static_cast<size_t>(i);
      const Subsystem& sub = sys[i];
      const Vector c_full = sub.coupling(uj, mu, tj);
      const Vector diff = sub.residual(uj[is], c_full, mu, tj) -
                          sub.residual(uj[is], rec.predictor[js][is], mu, tj);
      rec.k_explicit[js][is] = dt * sys.mass_solve(i, diff);
      require_finite(rec.k_explicit[js][is], "explicit stage velocity", j, i, tj);
    }
  }

  StepResult out;
  out.u = u_prev;
  for (Index i = 0; i < m; ++i) {
    const auto is = static_cast<size_t>(i);
    for (Index p = 0; p < s; ++p) {
      const auto ps = static_cast<size_t>(p);
      out.u[is] += tab.b_hat(p) * rec.k_explicit[ps][is] + tab.b(p) * rec.k_implicit[ps][is];
    }
    require_finite(out.u[is], "state", s - 1, i, t_prev + dt);
  }
  for (Index p = 0; p < s; ++p) {
    if (tab.b(p) == 0.0) continue;
    out.dJ += dt * tab.b(p) * qoi.integrand(rec.stage_state[static_cast<size_t>(p)], mu,
                                            rec.stage_time[static_cast<size_t>(p)]);
  }
  if (!std::isfinite(out.dJ)) throw NonFiniteError("non-finite quantity of interest increment");
  out.record = std::move(rec);
  return out;
}

namespace {

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw Error("time grid is empty");
  for (size_t n = 1; n < t_grid.size(); ++n) {
    if (!(t_grid[n] > t_grid[n - 1])) throw Error("time grid must be strictly increasing");
  }
}

}  // namespace

IntegrationResult integrate(const CoupledSystem& sys, const ImexTableauPair& tab,
                            const QoiModel& qoi, std::span<const double> t_grid,
                            TrajectoryStore& store, const NewtonOptions& newton,
                            const StepObserver& observer) {
  check_grid(t_grid);
  PartitionedState u = sys.initial_state();
  TrajectoryLayout layout{tab.s, sys.state_dims(), sys.coupling_dims(), sys.n_mu()};
  store.begin(layout, u);
  IntegrationResult res;
  for (size_t n = 1; n < t_grid.size(); ++n) {
    const double dt = t_grid[n] - t_grid[n - 1];
    StepResult sr = step(sys, tab, qoi, u, t_grid[n - 1], dt, static_cast<Index>(n), newton);
    store.append(sr.record);
    u = std::move(sr.u);
    res.J += sr.dJ;
    if (observer) observer(static_cast<Index>(n), t_grid[n], u, res.J);
  }
  res.final_state = std::move(u);
  return res;
}

double evaluate_objective(const CoupledSystem& sys, const ImexTableauPair& tab,
                          const QoiModel& qoi, std::span<const double> t_grid,
                          const NewtonOptions& newton) {
  check_grid(t_grid);
  PartitionedState u = sys.initial_state();
  double J = 0.0;
  for (size_t n = 1; n < t_grid.size(); ++n) {
    StepResult sr = step(sys, tab, qoi, u, t_grid[n - 1], t_grid[n] - t_grid[n - 1],
                         static_cast<Index>(n), newton);
    u = std::move(sr.u);
    J += sr.dJ;
  }
  return J;
}

std::vector<double> uniform_grid(double t0, double T, double dt) {
  if (!(dt > 0.0) || !(T >= t0)) throw Error("uniform grid needs dt > 0 and T >= t0");
  if (T == t0) return {t0};
  const double steps = (T - t0) / dt;
  auto n = static_cast<long long>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps)) {
    n = static_cast<long long>(std::ceil(steps));
  }
  n = std::max<long long>(n, 1);
  std::vector<double> grid(static_cast<size_t>(n + 1));
  for (long long k = 0; k <= n; ++k) grid[static_cast<size_t>(k)] = t0 + static_cast<double>(k) * (T - t0) / static_cast<double>(n);
  return grid;
}

}  // namespace pimex
