// Analytic Jacobian blocks of every model against central differences.

#include "pimex/config.hpp"
#include "pimex/models.hpp"
#include "pimex/piston.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace pimex;

namespace {

constexpr double kTol = 1e-5;

double worst_block_error(const CoupledSystem& sys, const PartitionedState& states, double t) {
  double worst = 0.0;
  for (Index i = 0; i < sys.size(); ++i)
    worst = std::max(worst, test::subsystem_jacobian_error(sys, i, states, t));
  return worst;
}

}  // namespace

TEST_CASE("nonlinear test model") {
  const auto sys = test::nonlinear_system(0.7, 0.4);
  const PartitionedState s{Eigen::Vector2d(0.3, -1.2), Vector::Constant(1, 0.8)};
  CHECK(worst_block_error(sys, s, 0.3) < kTol);
  CHECK(worst_block_error(sys, sys.initial_state(), 0.0) < kTol);
}

TEST_CASE("nonlinear test QoI") {
  const auto sys = test::nonlinear_system();
  test::NonlinearQoi qoi;
  const PartitionedState s{Eigen::Vector2d(0.3, -1.2), Vector::Constant(1, 0.8)};
  for (Index i = 0; i < 2; ++i) {
    auto f = [&](const Vector& x) {
      PartitionedState y = s;
      y[static_cast<size_t>(i)] = x;
      return Vector::Constant(1, qoi.integrand(y, sys.mu(), 0.4));
    };
    const Matrix fd = test::fd_jacobian(f, s[static_cast<size_t>(i)]);
    CHECK(test::jacobian_error(qoi.d_integrand_d_state(i, s, sys.mu(), 0.4).transpose(), fd) < kTol);
  }
  auto g = [&](const Vector& mu) { return Vector::Constant(1, qoi.integrand(s, mu, 0.4)); };
  CHECK(test::jacobian_error(qoi.d_integrand_d_param(s, sys.mu(), 0.4).transpose(),
                             test::fd_jacobian(g, sys.mu())) < kTol);
}

TEST_CASE("linear model") {
  LinearModelParams p;
  p.v0 = {0.5, -1.0};
  p.mu = 0.3;
  const auto sys = build_linear_model(p);
  const PartitionedState s{Vector::Constant(1, 0.4), Vector::Constant(1, -0.7)};
  CHECK(worst_block_error(sys, s, 0.1) < kTol);
}

TEST_CASE("scalar decay model") {
  const auto sys = build_scalar_decay(1.3, 2.0);
  CHECK(worst_block_error(sys, {Vector::Constant(1, 0.6)}, 0.0) < kTol);
}

TEST_CASE("piston structure, mesh and fluid") {
  PistonConfig cfg;
  cfg.n_cells = 20;
  cfg.c_s = 0.1;
  cfg.c_m = 0.2;
  cfg.u_s0 = 0.01;
  cfg.udot_s0 = -0.3;
  const auto sys = build_piston(cfg);
  const auto qoi = piston_qoi();

  SECTION("initial state") { CHECK(worst_block_error(sys, sys.initial_state(), 0.0) < kTol); }

  SECTION("developed flow") {
    MemoryTrajectory store;
    const auto r = integrate(sys, get_scheme("imex2"), *qoi, uniform_grid(0.0, 0.3, 0.01), store);
    CHECK(worst_block_error(sys, r.final_state, 0.3) < kTol);
  }

  SECTION("uncoupled structure") {
    const CoupledSystem solo({std::make_shared<StructureModel>(cfg, false)}, Vector::Constant(1, 2.0));
    CHECK(worst_block_error(solo, {Eigen::Vector2d(0.2, -0.1)}, 0.0) < kTol);
  }
}

TEST_CASE("a corrupted parameter Jacobian is caught by the harness") {
  RunConfig cfg = default_config(Problem::LinearModel);
  cfg.linear.v0 = {1.0, 0.0};
  cfg.corrupt_jacobian = 1e-3;
  const auto prob = make_problem(cfg);
  const PartitionedState s{Vector::Constant(1, 0.4), Vector::Constant(1, -0.7)};
  CHECK(test::subsystem_jacobian_error(prob.system, 0, s, 0.0) > kTol);
}
