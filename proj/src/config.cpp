#include "pimex/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pimex {

using nlohmann::json;

std::string to_string(Problem p) {
  switch (p) {
    case Problem::Piston: return "piston";
    case Problem::LinearModel: return "linear-model";
    case Problem::ScalarDecay: return "scalar-decay";
  }
  return "?";
}

Problem problem_from_string(const std::string& name) {
  if (name == "piston") return Problem::Piston;
  if (name == "linear-model") return Problem::LinearModel;
  if (name == "scalar-decay") return Problem::ScalarDecay;
  throw ConfigError("unknown problem '" + name +
                    "' (valid: piston, linear-model, scalar-decay)");
}

namespace {

// Reads typed members of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("key '" + key + "' in " + where_ + " has the wrong type");
    }
  }

  void get(const std::string& key, double& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("key '" + key + "' in " + where_ + " must be a number");
    out = v.get<double>();
  }

  const json* object(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_piston(const json& j, PistonConfig& p, std::optional<double>& mu_k) {
  ObjectReader r(j, "'piston'");
  long long n_cells = p.n_cells;
  r.get("n_cells", n_cells);
  p.n_cells = static_cast<Index>(n_cells);
  r.get("length", p.length);
  r.get("gamma", p.gamma);
  r.get("rho0", p.rho0);
  r.get("p0", p.p0);
  r.get("m_s", p.m_s);
  r.get("c_s", p.c_s);
  if (r.has("mu_k")) {
    double v = 0.0;
    r.get("mu_k", v);
    mu_k = v;
  }
  r.get("u_eq", p.u_eq);
  r.get("p_ref", p.p_ref);
  r.get("area", p.area);
  r.get("rho_m", p.rho_m);
  r.get("E_m", p.E_m);
  r.get("c_m", p.c_m);
  r.get("entropy_fix", p.entropy_fix);
  r.get("u_s0", p.u_s0);
  r.get("udot_s0", p.udot_s0);
  r.get("mesh_d0", p.mesh_d0);
}

json piston_json(const PistonConfig& p) {
  return json{{"n_cells", p.n_cells}, {"length", p.length},   {"gamma", p.gamma},
              {"rho0", p.rho0},       {"p0", p.p0},           {"m_s", p.m_s},
              {"c_s", p.c_s},         {"mu_k", p.mu_k},       {"u_eq", p.u_eq},
              {"p_ref", p.p_ref},     {"area", p.area},       {"rho_m", p.rho_m},
              {"E_m", p.E_m},         {"c_m", p.c_m},         {"entropy_fix", p.entropy_fix},
              {"u_s0", p.u_s0},       {"udot_s0", p.udot_s0}, {"mesh_d0", p.mesh_d0}};
}

std::array<double, 2> pair_of(const Eigen::Vector2d& v) { return {v(0), v(1)}; }

void read_linear(const json& j, LinearModelParams& p) {
  ObjectReader r(j, "'linear_model'");
  r.get("a11", p.a11);
  r.get("a12", p.a12);
  r.get("a21", p.a21);
  r.get("a22", p.a22);
  std::array<double, 2> u0 = pair_of(p.u0), v0 = pair_of(p.v0);
  r.get("u0", u0);
  r.get("v0", v0);
  p.u0 = {u0[0], u0[1]};
  p.v0 = {v0[0], v0[1]};
}

json linear_json(const LinearModelParams& p) {
  return json{{"a11", p.a11}, {"a12", p.a12}, {"a21", p.a21}, {"a22", p.a22},
              {"u0", pair_of(p.u0)}, {"v0", pair_of(p.v0)}};
}

// Wraps a subsystem and perturbs its parameter Jacobian (negative control).
class CorruptedParamJacobian final : public Subsystem {
 public:
  CorruptedParamJacobian(SubsystemPtr inner, double scale)
      : inner_(std::move(inner)), scale_(scale) {}

  std::string name() const override { return inner_->name(); }
  Index state_dim() const override { return inner_->state_dim(); }
  Index coupling_dim() const override { return inner_->coupling_dim(); }
  Matrix mass_matrix() const override { return inner_->mass_matrix(); }
  Vector residual(const Vector& u, const Vector& c, const Vector& mu, double t) const override {
    return inner_->residual(u, c, mu, t);
  }
  Vector coupling(StateSpan s, const Vector& mu, double t) const override {
    return inner_->coupling(s, mu, t);
  }
  Matrix d_residual_d_state(const Vector& u, const Vector& c, const Vector& mu,
                            double t) const override {
    return inner_->d_residual_d_state(u, c, mu, t);
  }
  Matrix d_residual_d_coupling(const Vector& u, const Vector& c, const Vector& mu,
                               double t) const override {
    return inner_->d_residual_d_coupling(u, c, mu, t);
  }
  Matrix d_residual_d_param(const Vector& u, const Vector& c, const Vector& mu,
                            double t) const override {
    Matrix d = inner_->d_residual_d_param(u, c, mu, t);
    return (1.0 + scale_) * d.array() + scale_;
  }
  Matrix d_coupling_d_state(Index k, StateSpan s, const Vector& mu, double t) const override {
    return inner_->d_coupling_d_state(k, s, mu, t);
  }
  Matrix d_coupling_d_param(StateSpan s, const Vector& mu, double t) const override {
    return inner_->d_coupling_d_param(s, mu, t);
  }
  bool coupling_depends_on(Index k) const override { return inner_->coupling_depends_on(k); }
  Vector initial_state(const Vector& mu) const override { return inner_->initial_state(mu); }
  Matrix d_initial_d_param(const Vector& mu) const override {
    return inner_->d_initial_d_param(mu);
  }

 private:
  SubsystemPtr inner_;
  double scale_;
};

}  // namespace

RunConfig default_config(Problem p) {
  RunConfig cfg;
  cfg.problem = p;
  switch (p) {
    case Problem::Piston:
      cfg.mu = {cfg.piston.mu_k};
      cfg.optimize.lower = std::vector<double>{0.0};
      cfg.optimize.upper = std::vector<double>{10.0};
      break;
    case Problem::LinearModel:
      cfg.dt = 0.1;
      cfg.mu = {0.0};
      cfg.qoi = "state-squared";
      break;
    case Problem::ScalarDecay:
      cfg.scheme = "imex4";
      cfg.dt = 1e-3;
      cfg.mu = {1.0};
      cfg.qoi = "state-squared";
      break;
  }
  return cfg;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  std::string problem = "piston";
  if (j.contains("problem")) {
    if (!j.at("problem").is_string()) throw ConfigError("key 'problem' must be a string");
    problem = j.at("problem").get<std::string>();
  }
  RunConfig cfg = default_config(problem_from_string(problem));

  std::optional<double> mu_k;
  bool mu_given = false;
  {
    ObjectReader r(j, "configuration");
    r.get("problem", problem);
    r.get("scheme", cfg.scheme);
    r.get("t0", cfg.t0);
    r.get("dt", cfg.dt);
    r.get("T", cfg.T);
    mu_given = r.has("mu");
    r.get("mu", cfg.mu);
    r.get("qoi", cfg.qoi);
    r.get("output_dir", cfg.output_dir);
    r.get("trajectory", cfg.trajectory);
    r.get("eps", cfg.eps);
    r.get("parallel_fd", cfg.parallel_fd);
    if (const json* n = r.object("newton")) {
      ObjectReader nr(*n, "'newton'");
      nr.get("tolerance", cfg.newton_tolerance);
      nr.get("max_iterations", cfg.newton_max_iterations);
    }
    if (const json* t = r.object("tolerances")) {
      ObjectReader tr(*t, "'tolerances'");
      tr.get("adjoint_direct", cfg.tol_adjoint_direct);
      tr.get("adjoint_fd", cfg.tol_adjoint_fd);
    }
    if (const json* p = r.object("piston")) read_piston(*p, cfg.piston, mu_k);
    if (const json* l = r.object("linear_model")) read_linear(*l, cfg.linear);
    if (const json* s = r.object("scalar_decay")) {
      ObjectReader sr(*s, "'scalar_decay'");
      sr.get("u0", cfg.decay_u0);
    }
    if (const json* o = r.object("optimize")) {
      ObjectReader orr(*o, "'optimize'");
      orr.get("gradient", cfg.optimize.gradient);
      orr.get("cross_check", cfg.optimize.cross_check);
      orr.get("max_iterations", cfg.optimize.max_iterations);
      orr.get("pg_tolerance", cfg.optimize.pg_tolerance);
      for (const char* key : {"lower", "upper"}) {
        if (!orr.has(key)) continue;
        std::vector<double> v;
        orr.get(key, v);
        (std::string(key) == "lower" ? cfg.optimize.lower : cfg.optimize.upper) = v;
      }
    }
    if (const json* s = r.object("order_study")) {
      ObjectReader sr(*s, "'order_study'");
      sr.get("schemes", cfg.order_study.schemes);
      sr.get("dts", cfg.order_study.dts);
      sr.get("order_tolerance", cfg.order_study.order_tolerance);
    }
  }

  if (cfg.problem == Problem::Piston) {
    if (mu_k && mu_given && (cfg.mu.size() != 1 || cfg.mu[0] != *mu_k))
      throw ConfigError("'mu' and 'piston.mu_k' disagree");
    if (mu_k && !mu_given) cfg.mu = {*mu_k};
    if (cfg.mu.size() == 1) cfg.piston.mu_k = cfg.mu[0];
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json opt{{"gradient", cfg.optimize.gradient},
           {"cross_check", cfg.optimize.cross_check},
           {"max_iterations", cfg.optimize.max_iterations},
           {"pg_tolerance", cfg.optimize.pg_tolerance}};
  if (cfg.optimize.lower) opt["lower"] = *cfg.optimize.lower;
  if (cfg.optimize.upper) opt["upper"] = *cfg.optimize.upper;
  return json{{"problem", to_string(cfg.problem)},
              {"scheme", cfg.scheme},
              {"t0", cfg.t0},
              {"dt", cfg.dt},
              {"T", cfg.T},
              {"mu", cfg.mu},
              {"qoi", cfg.qoi},
              {"output_dir", cfg.output_dir},
              {"trajectory", cfg.trajectory},
              {"eps", cfg.eps},
              {"parallel_fd", cfg.parallel_fd},
              {"newton", {{"tolerance", cfg.newton_tolerance},
                          {"max_iterations", cfg.newton_max_iterations}}},
              {"tolerances", {{"adjoint_direct", cfg.tol_adjoint_direct},
                              {"adjoint_fd", cfg.tol_adjoint_fd}}},
              {"piston", piston_json(cfg.piston)},
              {"linear_model", linear_json(cfg.linear)},
              {"scalar_decay", {{"u0", cfg.decay_u0}}},
              {"optimize", opt},
              {"order_study", {{"schemes", cfg.order_study.schemes},
                               {"dts", cfg.order_study.dts},
                               {"order_tolerance", cfg.order_study.order_tolerance}}}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("configuration '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void RunConfig::validate() const {
  get_scheme(scheme);  // throws with the list of valid names
  if (!std::isfinite(t0) || !std::isfinite(T) || T < t0) throw ConfigError("need finite T >= t0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (mu.size() != 1) throw ConfigError("this problem has exactly one parameter; 'mu' must have length 1");
  for (double m : mu)
    if (!std::isfinite(m)) throw ConfigError("'mu' entries must be finite");
  if (!(newton_tolerance > 0.0) || newton_max_iterations < 1)
    throw ConfigError("invalid Newton settings");
  if (trajectory != "memory" && trajectory.rfind("file:", 0) != 0)
    throw ConfigError("trajectory must be 'memory' or 'file:<path>'");
  if (trajectory.rfind("file:", 0) == 0 && trajectory.size() == 5)
    throw ConfigError("trajectory 'file:' needs a path");
  const auto& g = optimize.gradient;
  if (g != "adjoint" && g != "direct" && g != "fd")
    throw ConfigError("optimize.gradient must be 'adjoint', 'direct' or 'fd'");
  if (optimize.max_iterations < 0) throw ConfigError("optimize.max_iterations must be >= 0");
  for (const auto& s : order_study.schemes) get_scheme(s);
  if (order_study.dts.size() < 2) throw ConfigError("order_study.dts needs at least two steps");
  for (double d : order_study.dts)
    if (!(d > 0.0)) throw ConfigError("order_study.dts must be positive");
  if (qoi != "default" && qoi != "state-squared" && qoi.rfind("component:", 0) != 0)
    throw ConfigError("qoi must be 'default', 'state-squared' or 'component:<i>:<k>'");
  if (problem == Problem::Piston) piston.validate();
  make_bounds(*this).validate();
}

std::vector<double> RunConfig::time_grid() const { return uniform_grid(t0, T, dt); }

NewtonOptions RunConfig::newton() const { return {newton_tolerance, newton_max_iterations}; }

namespace {

std::shared_ptr<const QoiModel> make_qoi(const RunConfig& cfg, const CoupledSystem& sys) {
  if (cfg.qoi == "default")
    return cfg.problem == Problem::Piston ? piston_qoi()
                                          : std::make_shared<StateSquaredQoi>();
  if (cfg.qoi == "state-squared") return std::make_shared<StateSquaredQoi>();
  // component:<i>:<k>
  std::istringstream in(cfg.qoi.substr(10));
  long long i = -1, k = -1;
  char colon = 0;
  if (!(in >> i >> colon >> k) || colon != ':' || i < 0 || i >= sys.size() || k < 0 ||
      k >= sys[static_cast<Index>(i)].state_dim()) {
    throw ConfigError("invalid qoi component selection '" + cfg.qoi + "'");
  }
  return std::make_shared<SquaredComponentQoi>(static_cast<Index>(i), static_cast<Index>(k));
}

}  // namespace

ProblemInstance make_problem(const RunConfig& cfg, const Vector& mu) {
  std::optional<CoupledSystem> sys;
  switch (cfg.problem) {
    case Problem::Piston: {
      PistonConfig p = cfg.piston;
      p.mu_k = mu(0);
      sys = build_piston(p);
      break;
    }
    case Problem::LinearModel: {
      LinearModelParams p = cfg.linear;
      p.mu = mu(0);
      sys = build_linear_model(p);
      break;
    }
    case Problem::ScalarDecay:
      sys = build_scalar_decay(mu(0), cfg.decay_u0);
      break;
  }
  if (cfg.corrupt_jacobian != 0.0) {
    auto subs = sys->subsystems();
    subs[0] = std::make_shared<CorruptedParamJacobian>(subs[0], cfg.corrupt_jacobian);
    sys = CoupledSystem(std::move(subs), mu);
  }
  auto qoi = make_qoi(cfg, *sys);
  return {std::move(*sys), std::move(qoi)};
}

ProblemInstance make_problem(const RunConfig& cfg) {
  return make_problem(cfg, Eigen::Map<const Vector>(cfg.mu.data(), static_cast<Index>(cfg.mu.size())));
}

BoxConstraints make_bounds(const RunConfig& cfg) {
  BoxConstraints box = BoxConstraints::unbounded(static_cast<Index>(cfg.mu.size()));
  auto fill = [&](const std::optional<std::vector<double>>& v, Vector& out, const char* what) {
    if (!v) return;
    if (v->size() != cfg.mu.size())
      throw ConfigError(std::string("optimize.") + what + " must have the length of 'mu'");
    for (size_t k = 0; k < v->size(); ++k) out(static_cast<Index>(k)) = (*v)[k];
  };
  fill(cfg.optimize.lower, box.lower, "lower");
  fill(cfg.optimize.upper, box.upper, "upper");
  return box;
}

}  // namespace pimex
