#pragma once

#include "pimex/system.hpp"
#include "pimex/tableaux.hpp"
#include "pimex/trajectory.hpp"

#include <functional>
#include <span>

namespace pimex {

struct NewtonOptions {
  /// Absolute tolerance on the infinity norm of M k - dt r, multiplied by dt.
  double tolerance = 1e-12;
  int max_iterations = 50;
};

/// Weakly coupled Gauss-Seidel predictor for subsystem i:
/// c^i(u^1_{n,j}, ..., u^{i-1}_{n,j}, u^i_{n-1}, ..., u^m_{n-1}, mu, t).
/// Only the first i entries of `stage_states` are read.
Vector predictor_eval(const CoupledSystem& sys, Index i, StateSpan stage_states,
                      StateSpan prev_state, double t);

/// Argument list of the predictor above: current-stage states for
/// subsystems before i, previous-step states from i on.
PartitionedState predictor_arguments(StateSpan stage_states, StateSpan prev_state, Index i);

struct StepResult {
  PartitionedState u;
  double dJ = 0.0;
  StageRecord record;
};

/// Advances u_{n-1} over [t_prev, t_prev + dt] with the partitioned IMEX
/// scheme and returns u_n, the QoI increment and the stage record.
StepResult step(const CoupledSystem& sys, const ImexTableauPair& tab, const QoiModel& qoi,
                const PartitionedState& u_prev, double t_prev, double dt, Index step_index = 1,
                const NewtonOptions& newton = {});

struct IntegrationResult {
  PartitionedState final_state;
  double J = 0.0;
};

/// Called after each step with (n, t_n, u_n, running J).
using StepObserver = std::function<void(Index, double, const PartitionedState&, double)>;

/// Integrates from u_0 = initial_state(mu) over `t_grid` (strictly
/// increasing), recording every step into `store`.
IntegrationResult integrate(const CoupledSystem& sys, const ImexTableauPair& tab,
                            const QoiModel& qoi, std::span<const double> t_grid,
                            TrajectoryStore& store, const NewtonOptions& newton = {},
                            const StepObserver& observer = {});

/// Objective only; nothing is stored.
double evaluate_objective(const CoupledSystem& sys, const ImexTableauPair& tab,
                          const QoiModel& qoi, std::span<const double> t_grid,
                          const NewtonOptions& newton = {});

/// Equispaced grid from t0 to T with spacing dt, or the largest spacing
/// below dt that divides T - t0 evenly.
std::vector<double> uniform_grid(double t0, double T, double dt);

}  // namespace pimex
