#include "pimex/euler.hpp"

namespace pimex {

Eigen::Vector3d roe_flux_1d(const Eigen::Vector3d& UL, const Eigen::Vector3d& UR, double gamma,
                            double entropy_fix) {
  const State3<double> L{UL(0), UL(1), UL(2)}, R{UR(0), UR(1), UR(2)};
  const auto F = ale_roe_flux(L, R, 0.0, RoeOptions{gamma, entropy_fix});
  return {F[0], F[1], F[2]};
}

}  // namespace pimex
