#pragma once

#include "pimex/models.hpp"
#include "pimex/optimize.hpp"
#include "pimex/piston.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pimex {

enum class Problem { Piston, LinearModel, ScalarDecay };

std::string to_string(Problem p);
Problem problem_from_string(const std::string& name);

struct OptimizeSettings {
  std::string gradient = "adjoint";  // "adjoint" | "direct" | "fd"
  bool cross_check = false;          // evaluate all three gradients at every iterate
  int max_iterations = 100;
  double pg_tolerance = 1e-8;
  std::optional<std::vector<double>> lower;
  std::optional<std::vector<double>> upper;
};

struct OrderStudySettings {
  std::vector<std::string> schemes{"imex1", "imex2", "imex3", "imex4"};
  std::vector<double> dts{0.1, 0.05, 0.025, 0.0125};
  double order_tolerance = 0.4;
};

/// Everything a command needs; loaded from strict JSON, unknown keys are
/// rejected. to_json() gives the normalized form.
struct RunConfig {
  Problem problem = Problem::Piston;
  std::string scheme = "imex1";
  double t0 = 0.0;
  double dt = 0.01;
  double T = 1.0;
  std::vector<double> mu{1.0};
  /// "default" | "state-squared" | "component:<subsystem>:<index>"
  std::string qoi = "default";
  std::string output_dir = "pimex-out";
  /// "memory" | "file:<path>"
  std::string trajectory = "memory";
  double eps = 1e-6;
  bool parallel_fd = false;
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 50;
  /// Gradient agreement tolerances of grad-check.
  double tol_adjoint_direct = 1e-10;
  double tol_adjoint_fd = 1e-5;

  PistonConfig piston;
  LinearModelParams linear;
  double decay_u0 = 1.0;

  OptimizeSettings optimize;
  OrderStudySettings order_study;

  /// Test hook: relative perturbation of the parameter Jacobian of the
  /// first subsystem (0 = off).
  double corrupt_jacobian = 0.0;

  void validate() const;
  std::vector<double> time_grid() const;
  NewtonOptions newton() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

/// Defaults for a problem (piston: mu = 1 with bounds [0, 10]).
RunConfig default_config(Problem p);

/// Model instance described by a config.
struct ProblemInstance {
  CoupledSystem system;
  std::shared_ptr<const QoiModel> qoi;
};

ProblemInstance make_problem(const RunConfig& cfg, const Vector& mu);
ProblemInstance make_problem(const RunConfig& cfg);
BoxConstraints make_bounds(const RunConfig& cfg);

}  // namespace pimex
