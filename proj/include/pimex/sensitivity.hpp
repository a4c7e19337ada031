#pragma once

#include "pimex/stepper.hpp"

#include <span>
#include <string>

namespace pimex {

/// du^i/dmu per subsystem, each state_dim(i) x n_mu.
struct SensitivityState {
  std::vector<Matrix> du_dmu;
};

struct SensitivityStepResult {
  SensitivityState state;
  /// Stage derivatives, indexed [stage][subsystem].
  std::vector<std::vector<Matrix>> stage_du;
  std::vector<std::vector<Matrix>> dk_implicit;
  std::vector<std::vector<Matrix>> dk_explicit;
  std::vector<std::vector<Matrix>> dpredictor;
  Vector dJ;
};

struct GradientResult {
  double J = 0.0;
  Vector grad;
  std::string method;
};

SensitivityState initial_sensitivity(const CoupledSystem& sys);

/// Propagates du/dmu through the recorded step `record`.
SensitivityStepResult step_sensitivity(const CoupledSystem& sys, const ImexTableauPair& tab,
                                       const QoiModel& qoi, const StageRecord& record,
                                       const SensitivityState& prev);

/// Forward sensitivity sweep over a recorded trajectory.
GradientResult gradient_direct(const CoupledSystem& sys, const ImexTableauPair& tab,
                               const QoiModel& qoi, const TrajectoryStore& trajectory);

/// Integrates in memory, then runs the forward sensitivity sweep.
GradientResult gradient_direct(const CoupledSystem& sys, const ImexTableauPair& tab,
                               const QoiModel& qoi, std::span<const double> t_grid,
                               const NewtonOptions& newton = {});

}  // namespace pimex
