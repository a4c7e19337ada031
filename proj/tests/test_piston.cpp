#include "pimex/piston.hpp"
#include "pimex/stepper.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace pimex;

TEST_CASE("default piston run has an objective of order 5e-3") {
  const auto sys = build_piston(1.0);
  MemoryTrajectory store;
  const auto r = integrate(sys, get_scheme("imex1"), *piston_qoi(), uniform_grid(0.0, 1.0, 0.01),
                           store);
  CHECK(r.J > 3e-3);
  CHECK(r.J < 8e-3);
  // The gas pushes the piston outward (u_s < 0 opens the chamber).
  CHECK(r.final_state[kStructure](1) < 0.0);
}

TEST_CASE("uniform flow is preserved on a deforming mesh") {
  PistonConfig cfg;
  cfg.n_cells = 40;
  cfg.p_ref = cfg.p0;  // zero net force: the piston stays put
  cfg.mesh_d0.resize(static_cast<size_t>(cfg.n_cells - 1));
  for (size_t k = 0; k < cfg.mesh_d0.size(); ++k)
    cfg.mesh_d0[k] = 0.2 * cfg.h() * std::sin(0.7 * static_cast<double>(k + 1));
  const auto sys = build_piston(cfg);
  const FluidModel1D fluid(cfg);
  const double E0 = cfg.p0 / (cfg.gamma - 1.0);

  for (const auto& name : scheme_names()) {
    double worst = 0.0;
    MemoryTrajectory store;
    integrate(sys, get_scheme(name), *piston_qoi(), uniform_grid(0.0, 0.5, 0.01), store, {},
              [&](Index, double t, const PartitionedState& u, double) {
                const Vector c = fluid.coupling(u, sys.mu(), t);
                const Matrix U = fluid.physical_state(u[kFluid], c);
                for (Index k = 0; k < U.rows(); ++k) {
                  worst = std::max(worst, std::abs(U(k, 0) - cfg.rho0));
                  worst = std::max(worst, std::abs(U(k, 1)));
                  worst = std::max(worst, std::abs(U(k, 2) - E0));
                }
              });
    // The mesh really moves.
    CHECK(store.at(10).stage_state[0][kMesh].tail(cfg.n_cells - 1).cwiseAbs().maxCoeff() > 1e-3);
    INFO(name << " worst deviation " << worst);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("gas mass is conserved between the walls") {
  PistonConfig cfg;
  cfg.n_cells = 30;
  const auto sys = build_piston(cfg);
  auto mass = [&](const PartitionedState& u) {
    double m = 0.0;
    for (Index k = 0; k < cfg.n_cells; ++k) m += u[kFluid](3 * k) * cfg.h();
    return m;
  };
  const double m0 = mass(sys.initial_state());
  CHECK(m0 == Catch::Approx(cfg.rho0 * cfg.length));
  MemoryTrajectory store;
  const auto r = integrate(sys, get_scheme("imex3"), *piston_qoi(), uniform_grid(0.0, 1.0, 0.02),
                           store);
  CHECK(std::abs(mass(r.final_state) - m0) < 1e-12);
}

TEST_CASE("free structure oscillates like cos t") {
  PistonConfig cfg;
  cfg.u_s0 = 1.0;
  const CoupledSystem solo({std::make_shared<StructureModel>(cfg, false)}, Vector::Constant(1, 1.0));
  const auto qoi = piston_qoi();
  double worst = 0.0;
  MemoryTrajectory store;
  const auto r = integrate(solo, get_scheme("imex4"), *qoi,
                           uniform_grid(0.0, 2.0 * std::numbers::pi, 0.01), store, {},
                           [&](Index, double t, const PartitionedState& u, double) {
                             worst = std::max(worst, std::abs(u[0](1) - std::cos(t)));
                             worst = std::max(worst, std::abs(u[0](0) + std::sin(t)));
                           });
  CHECK(worst < 1e-8);
  // int_0^{2 pi} cos^2 = pi
  CHECK(r.J == Catch::Approx(std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("mesh geometry and interface pressure at rest") {
  PistonConfig cfg;
  cfg.n_cells = 4;
  const Eigen::Vector2d structure(0.5, 0.1);  // (udot_s, u_s)
  Vector mesh(6);
  mesh << 0.01, 0.02, 0.03, 0.1, 0.2, 0.3;
  const Vector c = piston_mesh_geometry(cfg, structure, mesh);
  REQUIRE(c.size() == 10);
  CHECK(c(0) == 0.0);
  CHECK(c(1) == Catch::Approx(0.26));
  CHECK(c(4) == Catch::Approx(0.9));
  CHECK(c(5) == 0.0);
  CHECK(c(6) == Catch::Approx(0.1));
  CHECK(c(9) == Catch::Approx(-0.5));

  const auto sys = build_piston(cfg);
  CHECK(piston_interface_pressure(cfg, sys.initial_state()) == Catch::Approx(cfg.p0).epsilon(1e-14));
}

TEST_CASE("invalid piston settings are rejected") {
  PistonConfig cfg;
  cfg.n_cells = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = PistonConfig{};
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = PistonConfig{};
  cfg.mesh_d0 = {0.1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = PistonConfig{};
  cfg.p0 = -1.0;
  CHECK_THROWS_AS(build_piston(cfg), ConfigError);
}

TEST_CASE("a piston pushed into vacuum fails with a physics error") {
  PistonConfig cfg;
  cfg.n_cells = 10;
  cfg.udot_s0 = -50.0;  // violent expansion
  const auto sys = build_piston(cfg);
  MemoryTrajectory store;
  CHECK_THROWS_AS(integrate(sys, get_scheme("imex1"), *piston_qoi(), uniform_grid(0.0, 1.0, 0.05),
                            store),
                  Error);
}
