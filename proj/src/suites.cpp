#include "tdse/suites.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "tdse/io.hpp"
#include "tdse/multiparticle.hpp"
#include "tdse/sensitivity.hpp"

namespace tdse {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  const ExperimentConfig& cfg;
  std::shared_ptr<const PotentialFamily> fam;
  SpatialGrid grid;
  WaveFunction u0;
  fs::path dir;
  SuiteResult& result;

  HamiltonianHandle handle(double rho) const { return HamiltonianHandle(fam, rho, grid); }
  fs::path file(const std::string& name) const {
    result.files.push_back(fs::path(result.name) / name);
    return dir / name;
  }
  json provenance() const {
    return {{"family", fam->name()}, {"rho", cfg.rho}, {"seed", cfg.seed},
            {"dt", cfg.propagator.dt}, {"T", cfg.propagator.T}};
  }
};

void suite_validate(Context& c) {
  const auto& s = c.cfg.validate;
  std::vector<double> ts = s.t_samples, rhos = s.rho_samples;
  if (ts.empty())
    for (int i = 0; i < 5; ++i) ts.push_back(c.cfg.propagator.T * i / 4.0);
  if (rhos.empty()) {
    const Interval r = c.fam->rho_range();
    for (double q : {0.25, 0.5, 0.75}) rhos.push_back(r.lo + q * (r.hi - r.lo));
  }
  const ValidationReport rep = validate_assumption(*c.fam, c.grid, ts, rhos, s.alpha_max);
  io::CsvWriter csv(c.file("checks.csv"),
                    {"family", "check", "constant", "slope", "pass", "witness_t", "witness_x",
                     "witness_rho"});
  json checks = json::array();
  auto dump = [&](const ValidationReport& r) {
    for (const auto& b : r.checks) {
      csv.row(std::vector<std::string>{
          r.family, b.name, io::format_double(b.constant), io::format_double(b.slope),
          b.pass ? "PASS" : "FAIL", io::format_double(b.witness.t),
          io::format_double(b.witness.x.empty() ? 0.0 : b.witness.x[0]),
          io::format_double(b.witness.rho)});
      checks.push_back({{"family", r.family}, {"check", b.name}, {"inequality", b.inequality},
                        {"constant", b.constant}, {"pass", b.pass}, {"reason", b.reason}});
    }
  };
  dump(rep);
  c.result.scalars = {{"c0", rep.c0}, {"c1", rep.c1}, {"c2", rep.c2}, {"nodes", rep.nodes},
                      {"time_samples", rep.time_samples}, {"rho_samples", rep.rho_samples},
                      {"alpha_max", rep.alpha_max}};
  c.result.pass = rep.pass;
  c.result.message = rep.pass ? "all sampled bounds hold" : "a sampled bound failed";
  if (s.counterexample) {
    const PotentialFamily cx = time_switched_quartic(c.fam->growth_order());
    const ValidationReport bad = validate_assumption(cx, make_grid(1, c.grid.half_width(),
                                                                   c.grid.points()),
                                                     ts, rhos, s.alpha_max);
    dump(bad);
    bool lower_failed = false;
    for (const auto& b : bad.checks)
      if (b.name == "scalar lower growth" && !b.pass) lower_failed = true;
    c.result.scalars["counterexample_rejected"] = lower_failed;
    if (!lower_failed) {
      c.result.pass = false;
      c.result.message += "; counterexample was not rejected";
    }
  }
  c.result.scalars["checks"] = checks;
}

void suite_propagate(Context& c) {
  const auto& s = c.cfg.propagate;
  const HamiltonianHandle h = c.handle(c.cfg.rho);
  const PropagationRun run = propagate(c.cfg.propagator, h, c.u0, s.orders);
  io::write_run_csv(c.file("run.csv"), run);
  io::write_state(c.file("final_state.bin"), run.final_state, c.provenance());
  json& out = c.result.scalars;
  out["max_norm_drift"] = run.max_norm_drift();
  out["max_boundary_mass"] = run.max_boundary_mass;
  out["steps"] = run.steps;
  bool pass = run.max_norm_drift() <= s.drift_tol && !run.boundary_flag;
  std::vector<EnergyFit> fits;
  for (std::size_t k = 0; k < s.orders.size(); ++k) {
    fits.push_back(energy_estimate_check(run, k));
    out["max_ratio_" + std::to_string(s.orders[k])] = fits.back().max_ratio;
    out["energy_c_" + std::to_string(s.orders[k])] = fits.back().c;
    pass = pass && fits.back().finite;
  }
  if (s.refine && !s.orders.empty()) {
    PropagatorConfig fine = c.cfg.propagator;
    fine.dt *= 0.5;
    fine.record_every *= 2;
    const PropagationRun run2 = propagate(fine, h, c.u0, s.orders);
    io::write_run_csv(c.file("run_half_dt.csv"), run2);
    for (std::size_t k = 0; k < s.orders.size(); ++k) {
      const auto cmp = compare_energy_fits(fits[k], energy_estimate_check(run2, k),
                                           s.stability_tol);
      out["ratio_change_" + std::to_string(s.orders[k])] = cmp.ratio_change;
      pass = pass && cmp.stable;
    }
  }
  c.result.pass = pass;
  c.result.message = run.boundary_flag ? "boundary mass above tolerance"
                                       : (pass ? "norm conserved, weighted norms bounded"
                                               : "drift or stability check failed");
}

void suite_eps_sweep(Context& c) {
  const auto& s = c.cfg.eps_sweep;
  const HamiltonianHandle h = c.handle(c.cfg.rho);
  PropagatorConfig base = c.cfg.propagator;
  base.cutoff.reset();
  double mu = 0.0;
  if (s.mu) {
    mu = *s.mu;
  } else {
    const double ts[2] = {0.0, base.T};
    mu = scan_ellipticity(*c.fam, c.grid, ts, c.cfg.rho).mu_min;
  }
  const NormOrder order = make_norm_order(s.norm_order, c.grid, c.fam->growth_order(),
                                          c.fam->mass());
  auto norm_probe = std::vector<NormProbe>{
      {"norm", [order](const WaveFunction& f) { return weighted_norm(order, f); }}};
  const PropagationRun ref = propagate_flow(base, h, c.u0, norm_probe);
  io::CsvWriter csv(c.file("eps_sweep.csv"), {"eps", "distance", "max_weighted_norm"});
  std::vector<double> dist, bounds;
  for (double eps : s.eps) {
    PropagatorConfig cfg = base;
    cfg.cutoff = CutoffSpec{eps, mu, CutoffProfile::gaussian};
    const MollifiedHamiltonian m(h, *cfg.cutoff);
    const PropagationRun run = propagate_flow(cfg, m, c.u0, norm_probe);
    dist.push_back(l2_distance(run.final_state, ref.final_state));
    double mx = 0.0;
    for (const auto& r : run.records) mx = std::max(mx, r.weighted[0]);
    bounds.push_back(mx);
    csv.row({eps, dist.back(), mx});
  }
  // order by decreasing eps
  std::vector<std::size_t> idx(s.eps.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.eps[a] > s.eps[b]; });
  bool decreasing = true;
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (!(dist[idx[i]] < dist[idx[i - 1]])) decreasing = false;
  const double final_dist = dist[idx.back()];
  const double spread = *std::max_element(bounds.begin(), bounds.end()) /
                        *std::min_element(bounds.begin(), bounds.end());
  std::vector<double> e(s.eps.begin(), s.eps.end());
  c.result.scalars = {{"mu", mu}, {"distances", dist}, {"eps", e},
                      {"final_distance", final_dist}, {"strictly_decreasing", decreasing},
                      {"uniform_norm_spread", spread},
                      {"observed_rate", loglog_slope(e, dist)}};
  c.result.pass = decreasing && final_dist <= s.final_tol && spread <= s.uniform_spread;
  c.result.message = c.result.pass ? "regularized solutions converge monotonically"
                                   : "eps sweep not monotone or final distance too large";
}

void suite_parametrix(Context& c) {
  const auto& s = c.cfg.parametrix;
  const double t = s.t;
  const EllipticityScan scan = scan_ellipticity(*c.fam, c.grid, std::span(&t, 1), c.cfg.rho);
  std::vector<double> mus;
  for (int i = 0; i < s.points; ++i)
    mus.push_back(scan.c1_star + s.offset_start * std::pow(10.0, s.decades * i / (s.points - 1)));
  const ResidualCurve curve = parametrix_residual(*c.fam, t, c.cfg.rho, c.grid, mus,
                                                  {s.n_probe, s.iterations, c.cfg.seed});
  io::CsvWriter csv(c.file("parametrix.csv"), {"mu", "mu_minus_c1", "residual", "probes"});
  for (const auto& p : curve.points) csv.row({p.mu, p.mu_offset, p.residual, double(p.probes)});
  const bool monotone = curve.points.size() >= 2 &&
                        curve.points.back().residual < curve.points.front().residual;
  c.result.scalars = {{"slope", curve.slope}, {"c0_star", curve.c0_star},
                      {"c1_star", curve.c1_star}, {"mu_min", curve.mu_min},
                      {"skipped", curve.skipped}, {"points", curve.points.size()}};
  c.result.pass = curve.points.size() >= 2 && monotone &&
                  std::abs(curve.slope - s.target_slope) <= s.slope_tol;
  c.result.message = "fitted slope " + io::format_double(curve.slope);
}

void suite_commutator(Context& c) {
  const auto& s = c.cfg.commutator;
  const double t = s.t;
  const double mu = s.mu ? *s.mu
                         : scan_ellipticity(*c.fam, c.grid, std::span(&t, 1), c.cfg.rho).mu_min;
  const BoundCurve curve = commutator_probe(*c.fam, t, c.cfg.rho, c.grid, mu, s.eps,
                                            {s.n_probe, s.iterations, c.cfg.seed});
  io::CsvWriter csv(c.file("commutator.csv"), {"eps", "bound", "probes"});
  for (const auto& p : curve.points) csv.row({p.eps, p.bound, double(p.probes)});
  c.result.scalars = {{"mu", mu}, {"sup", curve.sup}, {"spread", curve.spread},
                      {"diverges", curve.diverges}};
  c.result.pass = curve.spread <= s.max_spread;
  c.result.message = "max/min across eps " + io::format_double(curve.spread);
}

void suite_sensitivity(Context& c) {
  const auto& s = c.cfg.sensitivity;
  const FamilySystem sys(c.fam, c.grid);
  const PropagatorConfig& cfg = c.cfg.propagator;
  const VariationalRun var = solve_variational(sys, cfg, c.u0, c.cfg.rho, s.a);
  json& out = c.result.scalars;
  out["variational_max_norm"] = var.max_norm;
  if (!sys.depends_on_rho()) {
    c.result.pass = var.max_norm == 0.0;
    c.result.message = "rho-independent family: variational solution vanishes";
    return;
  }
  const DiscrepancyCurve central =
      discrepancy_curve(sys, cfg, c.u0, c.cfg.rho, s.taus, s.a, QuotientKind::central, var);
  const DiscrepancyCurve forward =
      discrepancy_curve(sys, cfg, c.u0, c.cfg.rho, s.taus, s.a, QuotientKind::forward, var);
  io::CsvWriter csv(c.file("discrepancy.csv"),
                    {"tau", "central_discrepancy", "forward_discrepancy",
                     "central_max_norm", "forward_max_norm"});
  for (std::size_t i = 0; i < s.taus.size(); ++i)
    csv.row({s.taus[i], central.points[i].discrepancy, forward.points[i].discrepancy,
             central.points[i].quotient_max_norm, forward.points[i].quotient_max_norm});
  std::vector<double> rhos = s.rho_samples;
  if (rhos.empty()) rhos.push_back(c.cfg.rho);
  io::CsvWriter bound(c.file("bound_constant.csv"), {"rho", "max_w_norm", "u0_norm", "ratio"});
  const double u0n = sys.norm(s.a + 1, c.u0);
  std::vector<double> cs;
  for (double rho : rhos) {
    const double w = rho == c.cfg.rho ? var.max_norm
                                      : solve_variational(sys, cfg, c.u0, rho, s.a).max_norm;
    cs.push_back(w / u0n);
    bound.row({rho, w, u0n, cs.back()});
  }
  const double c_spread = *std::max_element(cs.begin(), cs.end()) /
                          *std::min_element(cs.begin(), cs.end());
  const double qratio = forward.quotient_sup / var.max_norm;
  out["central_order"] = central.order;
  out["forward_order"] = forward.order;
  out["central_pairwise_orders"] = central.pairwise_orders;
  out["bound_constants"] = cs;
  out["bound_constant_spread"] = c_spread;
  out["quotient_sup"] = forward.quotient_sup;
  out["quotient_to_variational"] = qratio;
  c.result.pass = central.order >= s.min_order && c_spread <= s.c_spread &&
                  qratio <= s.quotient_factor && qratio >= 1.0 / s.quotient_factor;
  c.result.message = "central order " + io::format_double(central.order);
}

void suite_continuity(Context& c) {
  const auto& s = c.cfg.continuity;
  const FamilySystem sys(c.fam, c.grid);
  const ModulusCurve m =
      continuity_modulus(sys, c.cfg.propagator, c.u0, c.cfg.rho, s.deltas, s.a);
  io::CsvWriter csv(c.file("modulus.csv"), {"delta", "modulus"});
  std::vector<double> vals;
  for (const auto& p : m.points) {
    csv.row({p.delta, p.value});
    vals.push_back(p.value);
  }
  c.result.scalars = {{"values", vals}, {"order", m.order}, {"decreasing", m.decreasing}};
  c.result.pass = m.decreasing;
  c.result.message = m.decreasing ? "modulus shrinks with delta" : "modulus not decreasing";
}

void suite_two_particle(Context& c) {
  const auto& s = c.cfg.two_particle;
  auto f1 = std::make_shared<PotentialFamily>(builtin_family(s.families[0]));
  auto f2 = std::make_shared<PotentialFamily>(builtin_family(s.families[1]));
  const InteractionFamily w = make_interaction("interaction", s.interaction,
                                               s.interaction_growth, s.interaction_delta);
  const TwoParticleSystem sys(f1, f2, w, s.half_width, s.points, s.rho_range);
  const double c1 = s.centers[0], c2 = s.centers[1];
  const WaveFunction g1 = gaussian(sys.particle_grid(), std::span(&c1, 1), s.width);
  const WaveFunction g2 = gaussian(sys.particle_grid(), std::span(&c2, 1), s.width);
  const WaveFunction u0 = tensor_product(sys.grid(), g1, g2);
  PropagatorConfig cfg = c.cfg.propagator;
  cfg.cutoff.reset();
  cfg.T = s.T;
  cfg.dt = s.dt;
  cfg.record_every = std::max(1, static_cast<int>(std::lround(0.01 / s.dt)));
  const PropagationRun run = propagate_two_particle(sys, cfg, s.rho, u0, s.orders);
  io::write_run_csv(c.file("run.csv"), run);
  json& out = c.result.scalars;
  out["max_norm_drift"] = run.max_norm_drift();
  out["max_boundary_mass"] = run.max_boundary_mass;
  for (std::size_t k = 0; k < s.orders.size(); ++k)
    out["max_ratio_primed_" + std::to_string(s.orders[k])] = run.max_ratio(k);
  if (s.families[0] == s.families[1] && c1 == c2)
    out["exchange_asymmetry"] = exchange_asymmetry(run.final_state);
  bool pass = run.max_norm_drift() <= s.drift_tol && !run.boundary_flag;
  if (s.factorization) {
    const TwoParticleSystem free(f1, f2, std::nullopt, s.half_width, s.points, s.rho_range);
    PropagatorConfig lc = cfg;
    lc.scheme = Scheme::lanczos;
    const PropagationRun pair = propagate_two_particle(free, lc, s.rho, u0);
    const PropagationRun a = propagate(lc, HamiltonianHandle(f1, s.rho, sys.particle_grid()), g1);
    const PropagationRun b = propagate(lc, HamiltonianHandle(f2, s.rho, sys.particle_grid()), g2);
    const double err = l2_distance(tensor_product(sys.grid(), a.final_state, b.final_state),
                                   pair.final_state);
    out["factorization_error"] = err;
    pass = pass && err <= s.factor_tol;
  }
  c.result.pass = pass;
  c.result.message = pass ? "two-particle norm conserved" : "drift, boundary or factorization check failed";
}

}  // namespace

SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg) {
  SuiteResult result;
  result.name = name;
  try {
    const auto fam = std::make_shared<PotentialFamily>(cfg.family);
    const SpatialGrid grid = make_grid(cfg.grid);
    const fs::path dir = cfg.output / name;
    fs::create_directories(dir);
    Context c{cfg, fam, grid, make_initial_state(cfg.initial, grid), dir, result};
    if (name == "validate") suite_validate(c);
    else if (name == "propagate") suite_propagate(c);
    else if (name == "eps_sweep") suite_eps_sweep(c);
    else if (name == "parametrix") suite_parametrix(c);
    else if (name == "commutator") suite_commutator(c);
    else if (name == "sensitivity") suite_sensitivity(c);
    else if (name == "continuity") suite_continuity(c);
    else if (name == "two_particle") suite_two_particle(c);
    else throw std::invalid_argument("unknown suite " + name);
  } catch (const std::exception& e) {
    result.pass = false;
    result.error = true;
    result.message = e.what();
  }
  return result;
}

std::vector<SuiteResult> run_experiment(const ExperimentConfig& cfg) {
  std::vector<SuiteResult> results(cfg.suites.size());
  const int workers = std::max(1, std::min<int>(cfg.workers, cfg.suites.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < cfg.suites.size(); ++i) results[i] = run_suite(cfg.suites[i], cfg);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      omp_set_num_threads(1);
      for (std::size_t i; (i = next++) < cfg.suites.size();) results[i] = run_suite(cfg.suites[i], cfg);
    });
  for (auto& t : pool) t.join();
  return results;
}

json emit_report(const ExperimentConfig& cfg, const std::vector<SuiteResult>& results) {
  if (results.empty()) throw std::invalid_argument("emit_report: no suites ran");
  json suites = json::array();
  for (const auto& r : results) {
    json files = json::array();
    for (const auto& f : r.files) {
      const fs::path full = cfg.output / f;
      json entry = {{"path", f.generic_string()}};
      if (fs::exists(full)) {
        entry["sha256"] = io::sha256_file(full);
        entry["bytes"] = fs::file_size(full);
      }
      files.push_back(entry);
    }
    suites.push_back({{"suite", r.name},
                      {"verdict", r.pass ? "PASS" : "FAIL"},
                      {"error", r.error},
                      {"message", r.message},
                      {"scalars", r.scalars},
                      {"files", files}});
  }
  return {{"family", cfg.family.name},
          {"rho", cfg.rho},
          {"grid", {{"dim", cfg.grid.dim}, {"L", cfg.grid.half_width}, {"N", cfg.grid.points}}},
          {"propagator",
           {{"scheme", cfg.propagator.scheme == Scheme::lanczos ? "lanczos" : "crank_nicolson"},
            {"dt", cfg.propagator.dt},
            {"T", cfg.propagator.T},
            {"solver_tol", cfg.propagator.solver_tol}}},
          {"seed", cfg.seed},
          {"suites", suites},
          {"overall", exit_status(results) == 0 ? "PASS" : "FAIL"}};
}

int exit_status(const std::vector<SuiteResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace tdse
