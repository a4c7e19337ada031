// pimex command-line tool.

#include "pimex/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Flags {
  std::string config;
  std::string problem;
  std::string scheme;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<std::string> out;
  std::optional<double> eps;
  bool parallel_fd = false;
  std::optional<double> corrupt_jacobian;
};

pimex::RunConfig build_config(const Flags& f) {
  using namespace pimex;
  RunConfig cfg;
  if (!f.config.empty()) {
    cfg = load_config(f.config);
    if (!f.problem.empty() && problem_from_string(f.problem) != cfg.problem)
      throw ConfigError("--problem disagrees with the problem in " + f.config);
  } else {
    cfg = default_config(f.problem.empty() ? Problem::Piston : problem_from_string(f.problem));
  }
  if (!f.scheme.empty()) cfg.scheme = f.scheme;
  if (f.dt) cfg.dt = *f.dt;
  if (f.T) cfg.T = *f.T;
  if (f.eps) cfg.eps = *f.eps;
  if (f.parallel_fd) cfg.parallel_fd = true;
  if (f.corrupt_jacobian) cfg.corrupt_jacobian = *f.corrupt_jacobian;
  cfg.output_dir = resolve_output_dir(cfg, f.out);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partitioned IMEX Runge-Kutta integration with discrete sensitivities"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--problem", f.problem, "piston | linear-model | scalar-decay (without --config)");
  app.add_option("--scheme", f.scheme, "imex1 .. imex4");
  app.add_option("--dt", f.dt, "time step");
  app.add_option("--T", f.T, "final time");
  app.add_option("--out", f.out, "output directory (overrides PIMEX_OUT_DIR and the config)");
  app.add_option("--eps", f.eps, "finite-difference step");
  app.add_flag("--parallel-fd", f.parallel_fd, "run finite-difference integrations concurrently");
  app.add_option("--corrupt-jacobian", f.corrupt_jacobian)->group("");

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const pimex::RunConfig&, std::ostream&);
  };
  const Cmd cmds[] = {
      {"simulate", "integrate and write the time series", pimex::cmd_simulate},
      {"grad-check", "compare adjoint, direct and finite-difference gradients",
       pimex::cmd_grad_check},
      {"optimize", "minimize the objective within the parameter bounds", pimex::cmd_optimize},
      {"order-study", "observed temporal order against the analytic solution",
       pimex::cmd_order_study},
      {"verify-tableaux", "check tableau invariants and order conditions",
       pimex::cmd_verify_tableaux},
  };
  for (const auto& c : cmds) app.add_subcommand(c.name, c.help);

  CLI11_PARSE(app, argc, argv);

  pimex::RunConfig cfg;
  try {
    cfg = build_config(f);
  } catch (const std::exception& e) {
    std::cerr << "pimex: " << e.what() << '\n';
    return 2;
  }
  for (const auto& c : cmds)
    if (app.got_subcommand(c.name)) return c.run(cfg, std::cout);
  return 2;
}
