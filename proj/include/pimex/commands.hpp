#pragma once

// Subcommands of the pimex tool. Each writes its artifacts below
// cfg.output_dir, logs human-readable lines to `log` and returns the exit
// status (0 iff every requested check passed).

#include "pimex/adjoint.hpp"
#include "pimex/config.hpp"
#include "pimex/report.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <ostream>
#include <string>

namespace pimex {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "PIMEX_OUT_DIR";

/// --out flag, then PIMEX_OUT_DIR, then the config value.
std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag);

/// Trajectory store named by cfg.trajectory ("memory" or "file:<path>").
std::unique_ptr<TrajectoryStore> make_trajectory_store(const RunConfig& cfg);

struct SimulationResult {
  double J = 0.0;
  PartitionedState final_state;
  CsvTable series;
};

SimulationResult simulate(const RunConfig& cfg);

/// max_k |a_k - b_k| / |b_k| (0 where both vanish).
double relative_error(const Vector& a, const Vector& b);

struct GradCheckResult {
  GradientResult adjoint;
  GradientResult direct;
  GradientResult fd;
  double rel_adjoint_direct = 0.0;
  double rel_adjoint_fd = 0.0;
  /// Scalar decay only: analytic derivative and its relative error vs adjoint.
  std::optional<double> closed_form;
  std::optional<double> rel_adjoint_closed_form;
  CsvTable lambda_norms;  // n, t, |lambda^i| per subsystem
  bool passed = false;
};

GradCheckResult grad_check(const RunConfig& cfg);
GradCheckResult grad_check(const RunConfig& cfg, const Vector& mu);

/// Relative tolerance of the closed-form comparison.
inline constexpr double kClosedFormTolerance = 1e-6;

struct CrossCheck {
  int iter = 0;
  double rel_adjoint_direct = 0.0;
  double rel_adjoint_fd = 0.0;
  /// Infinity norm of the adjoint gradient; relative errors are meaningless
  /// where it vanishes.
  double grad_norm = 0.0;
  bool passed = false;
};

struct OptimizeResult {
  MinimizeResult result;
  std::vector<CrossCheck> cross_checks;
  bool nonincreasing = true;
};

/// Gradient of the configured kind ("adjoint", "direct", "fd") at mu.
GradientResult objective_gradient(const RunConfig& cfg, const Vector& mu, const std::string& kind);

OptimizeResult run_optimize(const RunConfig& cfg);

struct OrderRow {
  std::string scheme;
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> observed_order;
};

struct OrderStudyResult {
  std::vector<OrderRow> rows;
  /// Per scheme: design order, minimum observed order, pass flag.
  nlohmann::json summary;
  bool passed = false;
};

/// Errors at T against the analytic solution (linear-model, scalar-decay).
OrderStudyResult order_study(const RunConfig& cfg);

int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_grad_check(const RunConfig& cfg, std::ostream& log);
int cmd_optimize(const RunConfig& cfg, std::ostream& log);
int cmd_order_study(const RunConfig& cfg, std::ostream& log);
int cmd_verify_tableaux(const RunConfig& cfg, std::ostream& log);

}  // namespace pimex
