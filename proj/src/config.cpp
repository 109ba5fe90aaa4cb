#include "tdse/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace tdse {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "propagate", "eps_sweep", "parametrix", "commutator",
      "sensitivity", "continuity", "two_particle", "validate"};
  return names;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError(join(path, key), "unknown field");
  }
}

template <class T>
T read(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "cannot be read as the expected type");
  }
}

template <class T>
void opt(const YAML::Node& parent, const std::string& path, const char* key, T& out) {
  if (const YAML::Node n = parent[key]) out = read<T>(n, join(path, key));
}

template <class T>
void opt(const YAML::Node& parent, const std::string& path, const char* key,
         std::optional<T>& out) {
  if (const YAML::Node n = parent[key]) out = read<T>(n, join(path, key));
}

Interval read_interval(const YAML::Node& n, const std::string& path) {
  const auto v = read<std::vector<double>>(n, path);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(path, "expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

FamilyDefinition read_family(const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) {
    const std::string name = n.as<std::string>();
    if (!is_builtin_family(name)) throw ConfigError(path, "unknown family '" + name + "'");
    return builtin_family(name).definition();
  }
  check_keys(n, path, {"name", "dim", "V", "A", "M", "delta", "mass", "rho_range"});
  FamilyDefinition def;
  def.name = "custom";
  opt(n, path, "name", def.name);
  opt(n, path, "dim", def.dim);
  if (!n["V"]) throw ConfigError(join(path, "V"), "required");
  def.scalar = read<std::string>(n["V"], join(path, "V"));
  opt(n, path, "A", def.vector);
  opt(n, path, "M", def.growth_order);
  opt(n, path, "delta", def.delta);
  opt(n, path, "mass", def.mass);
  if (n["rho_range"]) def.rho_range = read_interval(n["rho_range"], join(path, "rho_range"));
  try {
    PotentialFamily check(def);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return def;
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("YAML syntax: ") + e.what());
  }
  check_keys(root, "",
             {"family", "rho", "grid", "propagator", "initial_state", "suites", "output",
              "seed", "workers", "propagate", "eps_sweep", "parametrix", "commutator",
              "sensitivity", "continuity", "two_particle", "validate"});
  ExperimentConfig cfg;
  if (!root["family"]) throw ConfigError("family", "required");
  cfg.family = read_family(root["family"], "family");
  cfg.rho = 0.5 * (cfg.family.rho_range.lo + cfg.family.rho_range.hi);
  opt(root, "", "rho", cfg.rho);
  require(cfg.family.rho_range.contains(cfg.rho), "rho", "outside the family's parameter interval");

  if (const YAML::Node g = root["grid"]) {
    check_keys(g, "grid", {"dim", "L", "N"});
    opt(g, "grid", "dim", cfg.grid.dim);
    opt(g, "grid", "L", cfg.grid.half_width);
    opt(g, "grid", "N", cfg.grid.points);
  }
  cfg.grid.dim = cfg.family.dim;
  if (root["grid"] && root["grid"]["dim"])
    require(read<int>(root["grid"]["dim"], "grid.dim") == cfg.family.dim, "grid.dim",
            "does not match the family dimension");
  require(cfg.grid.points >= 8 && cfg.grid.points % 2 == 0, "grid.N", "must be even and >= 8");
  require(cfg.grid.half_width > 0.0, "grid.L", "must be positive");

  if (const YAML::Node p = root["propagator"]) {
    check_keys(p, "propagator", {"scheme", "dt", "T", "solver_tol", "max_iter", "krylov_dim",
                                 "boundary_tol", "record_every", "cutoff_eps", "cutoff_mu"});
    std::string scheme = "crank_nicolson";
    opt(p, "propagator", "scheme", scheme);
    if (scheme == "crank_nicolson") cfg.propagator.scheme = Scheme::crank_nicolson;
    else if (scheme == "lanczos") cfg.propagator.scheme = Scheme::lanczos;
    else throw ConfigError("propagator.scheme", "expected crank_nicolson or lanczos");
    opt(p, "propagator", "dt", cfg.propagator.dt);
    opt(p, "propagator", "T", cfg.propagator.T);
    opt(p, "propagator", "solver_tol", cfg.propagator.solver_tol);
    opt(p, "propagator", "max_iter", cfg.propagator.max_iter);
    opt(p, "propagator", "krylov_dim", cfg.propagator.krylov_dim);
    opt(p, "propagator", "boundary_tol", cfg.propagator.boundary_tol);
    opt(p, "propagator", "record_every", cfg.propagator.record_every);
    if (p["cutoff_eps"]) {
      CutoffSpec spec;
      spec.eps = read<double>(p["cutoff_eps"], "propagator.cutoff_eps");
      opt(p, "propagator", "cutoff_mu", spec.mu);
      try {
        validate(spec);
      } catch (const std::exception& e) {
        throw ConfigError("propagator.cutoff_eps", e.what());
      }
      cfg.propagator.cutoff = spec;
    }
  }
  try {
    step_count(cfg.propagator);
  } catch (const std::exception& e) {
    throw ConfigError("propagator", e.what());
  }

  cfg.initial.center.assign(cfg.grid.dim, 0.0);
  if (const YAML::Node s = root["initial_state"]) {
    check_keys(s, "initial_state", {"center", "width", "momentum"});
    opt(s, "initial_state", "center", cfg.initial.center);
    opt(s, "initial_state", "width", cfg.initial.width);
    opt(s, "initial_state", "momentum", cfg.initial.momentum);
  }
  require(static_cast<int>(cfg.initial.center.size()) == cfg.grid.dim, "initial_state.center",
          "needs one entry per dimension");
  require(cfg.initial.momentum.empty() ||
              static_cast<int>(cfg.initial.momentum.size()) == cfg.grid.dim,
          "initial_state.momentum", "needs one entry per dimension");
  require(cfg.initial.width > 0.0, "initial_state.width", "must be positive");

  if (!root["suites"]) throw ConfigError("suites", "required");
  cfg.suites = read<std::vector<std::string>>(root["suites"], "suites");
  require(!cfg.suites.empty(), "suites", "must not be empty");
  for (std::size_t i = 0; i < cfg.suites.size(); ++i) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), cfg.suites[i]) == names.end())
      throw ConfigError("suites[" + std::to_string(i) + "]", "unknown suite '" + cfg.suites[i] + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (cfg.suites[j] == cfg.suites[i])
        throw ConfigError("suites[" + std::to_string(i) + "]", "listed twice");
  }
  std::string out = cfg.output.string();
  opt(root, "", "output", out);
  cfg.output = out;
  opt(root, "", "seed", cfg.seed);
  opt(root, "", "workers", cfg.workers);
  require(cfg.workers >= 1, "workers", "must be at least 1");

  if (const YAML::Node n = root["propagate"]) {
    check_keys(n, "propagate", {"orders", "drift_tol", "refine", "stability_tol"});
    opt(n, "propagate", "orders", cfg.propagate.orders);
    opt(n, "propagate", "drift_tol", cfg.propagate.drift_tol);
    opt(n, "propagate", "refine", cfg.propagate.refine);
    opt(n, "propagate", "stability_tol", cfg.propagate.stability_tol);
  }
  for (int a : cfg.propagate.orders)
    require(std::abs(a) <= 3, "propagate.orders", "|a| must be at most 3");
  if (const YAML::Node n = root["eps_sweep"]) {
    check_keys(n, "eps_sweep", {"eps", "mu", "final_tol", "norm_order", "uniform_spread"});
    opt(n, "eps_sweep", "eps", cfg.eps_sweep.eps);
    opt(n, "eps_sweep", "mu", cfg.eps_sweep.mu);
    opt(n, "eps_sweep", "final_tol", cfg.eps_sweep.final_tol);
    opt(n, "eps_sweep", "norm_order", cfg.eps_sweep.norm_order);
    opt(n, "eps_sweep", "uniform_spread", cfg.eps_sweep.uniform_spread);
  }
  for (double e : cfg.eps_sweep.eps)
    require(e > 0.0 && e <= 1.0, "eps_sweep.eps", "entries must lie in (0, 1]");
  if (const YAML::Node n = root["parametrix"]) {
    check_keys(n, "parametrix", {"t", "offset_start", "decades", "points", "n_probe",
                                 "iterations", "target_slope", "slope_tol"});
    auto& s = cfg.parametrix;
    opt(n, "parametrix", "t", s.t);
    opt(n, "parametrix", "offset_start", s.offset_start);
    opt(n, "parametrix", "decades", s.decades);
    opt(n, "parametrix", "points", s.points);
    opt(n, "parametrix", "n_probe", s.n_probe);
    opt(n, "parametrix", "iterations", s.iterations);
    opt(n, "parametrix", "target_slope", s.target_slope);
    opt(n, "parametrix", "slope_tol", s.slope_tol);
    require(s.points >= 2, "parametrix.points", "need at least two");
    require(s.offset_start > 0.0, "parametrix.offset_start", "must be positive");
  }
  if (const YAML::Node n = root["commutator"]) {
    check_keys(n, "commutator", {"t", "mu", "eps", "n_probe", "iterations", "max_spread"});
    auto& s = cfg.commutator;
    opt(n, "commutator", "t", s.t);
    opt(n, "commutator", "mu", s.mu);
    opt(n, "commutator", "eps", s.eps);
    opt(n, "commutator", "n_probe", s.n_probe);
    opt(n, "commutator", "iterations", s.iterations);
    opt(n, "commutator", "max_spread", s.max_spread);
    for (double e : s.eps) require(e > 0.0 && e <= 1.0, "commutator.eps", "entries must lie in (0, 1]");
  }
  if (const YAML::Node n = root["sensitivity"]) {
    check_keys(n, "sensitivity", {"taus", "a", "rho_samples", "min_order", "c_spread",
                                  "quotient_factor"});
    auto& s = cfg.sensitivity;
    opt(n, "sensitivity", "taus", s.taus);
    opt(n, "sensitivity", "a", s.a);
    opt(n, "sensitivity", "rho_samples", s.rho_samples);
    opt(n, "sensitivity", "min_order", s.min_order);
    opt(n, "sensitivity", "c_spread", s.c_spread);
    opt(n, "sensitivity", "quotient_factor", s.quotient_factor);
    for (double t : s.taus) require(t != 0.0, "sensitivity.taus", "tau must be nonzero");
  }
  if (const YAML::Node n = root["continuity"]) {
    check_keys(n, "continuity", {"deltas", "a"});
    opt(n, "continuity", "deltas", cfg.continuity.deltas);
    opt(n, "continuity", "a", cfg.continuity.a);
  }
  if (const YAML::Node n = root["two_particle"]) {
    const std::string p = "two_particle";
    check_keys(n, p, {"families", "interaction", "interaction_growth", "interaction_delta",
                      "rho", "rho_range", "L", "N", "centers", "width", "T", "dt", "orders",
                      "drift_tol", "factorization", "factor_tol"});
    auto& s = cfg.two_particle;
    opt(n, p, "families", s.families);
    opt(n, p, "interaction", s.interaction);
    opt(n, p, "interaction_growth", s.interaction_growth);
    opt(n, p, "interaction_delta", s.interaction_delta);
    opt(n, p, "rho", s.rho);
    if (n["rho_range"]) s.rho_range = read_interval(n["rho_range"], p + ".rho_range");
    opt(n, p, "L", s.half_width);
    opt(n, p, "N", s.points);
    opt(n, p, "centers", s.centers);
    opt(n, p, "width", s.width);
    opt(n, p, "T", s.T);
    opt(n, p, "dt", s.dt);
    opt(n, p, "orders", s.orders);
    opt(n, p, "drift_tol", s.drift_tol);
    opt(n, p, "factorization", s.factorization);
    opt(n, p, "factor_tol", s.factor_tol);
    require(s.families.size() == 2, p + ".families", "exactly two families");
    for (std::size_t i = 0; i < 2; ++i) {
      require(is_builtin_family(s.families[i]), p + ".families[" + std::to_string(i) + "]",
              "unknown family '" + s.families[i] + "'");
      require(builtin_family(s.families[i]).dim() == 1,
              p + ".families[" + std::to_string(i) + "]", "must be one-dimensional");
    }
    require(s.centers.size() == 2, p + ".centers", "one center per particle");
    require(s.points >= 8 && s.points % 2 == 0 && s.points <= 256, p + ".N",
            "must be even, >= 8 and <= 256");
    require(s.rho_range.contains(s.rho), p + ".rho", "outside rho_range");
    for (int a : s.orders) require(a >= 0, p + ".orders", "primed norms need a >= 0");
    try {
      make_interaction("interaction", s.interaction, s.interaction_growth, s.interaction_delta);
    } catch (const std::exception& e) {
      throw ConfigError(p + ".interaction", e.what());
    }
  }
  if (const YAML::Node n = root["validate"]) {
    check_keys(n, "validate", {"t_samples", "rho_samples", "alpha_max", "counterexample"});
    opt(n, "validate", "t_samples", cfg.validate.t_samples);
    opt(n, "validate", "rho_samples", cfg.validate.rho_samples);
    opt(n, "validate", "alpha_max", cfg.validate.alpha_max);
    opt(n, "validate", "counterexample", cfg.validate.counterexample);
    require(cfg.validate.alpha_max >= 1 && cfg.validate.alpha_max <= 4, "validate.alpha_max",
            "must lie in [1, 4]");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SpatialGrid make_grid(const GridConfig& g) {
  return make_grid(g.dim, g.half_width, g.points);
}

WaveFunction make_initial_state(const InitialState& s, const SpatialGrid& grid) {
  return gaussian(grid, s.center, s.width, s.momentum);
}

}  // namespace tdse
