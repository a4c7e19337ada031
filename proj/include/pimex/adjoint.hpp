#pragma once

#include "pimex/sensitivity.hpp"

#include <functional>

namespace pimex {

/// Multipliers of one backward step. Stage quantities are indexed
/// [stage][subsystem].
struct AdjointState {
  std::vector<Vector> lambda;  // lambda_{n-1}
  std::vector<std::vector<Vector>> kappa_implicit;
  std::vector<std::vector<Vector>> kappa_explicit;
  std::vector<std::vector<Vector>> tau;
  std::vector<std::vector<Vector>> sigma;
};

/// Backward sweep through recorded step n given lambda_n. Adds this step's
/// contribution to the gradient into `grad` (length n_mu).
AdjointState sweep_adjoint_step(const CoupledSystem& sys, const ImexTableauPair& tab,
                                const QoiModel& qoi, const StageRecord& record,
                                const std::vector<Vector>& lambda_n, Vector& grad);

/// Called after each backward step with (n-1, lambda_{n-1}).
using AdjointObserver = std::function<void(Index, const std::vector<Vector>&)>;

GradientResult gradient_adjoint(const CoupledSystem& sys, const ImexTableauPair& tab,
                                const QoiModel& qoi, const TrajectoryStore& trajectory,
                                const AdjointObserver& observer = {});

}  // namespace pimex
