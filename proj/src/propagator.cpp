#include "tdse/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tdse/kernels.hpp"

namespace tdse {

int step_count(const PropagatorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("propagator: dt must be positive");
  if (!(cfg.T >= 0.0)) throw std::invalid_argument("propagator: T must be nonnegative");
  if (!(cfg.solver_tol > 0.0) || !(cfg.boundary_tol > 0.0))
    throw std::invalid_argument("propagator: tolerances must be positive");
  if (cfg.max_iter < 1 || cfg.krylov_dim < 2 || cfg.record_every < 1 || cfg.save_every < 0)
    throw std::invalid_argument("propagator: bad iteration settings");
  const double n = cfg.T / cfg.dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw std::invalid_argument("propagator: T must be an integer multiple of dt");
  return static_cast<int>(r);
}

StepInfo step(const PropagatorConfig& cfg, const Evolution& evo, double t,
              double dt, std::span<const cplx> u, std::span<cplx> out,
              std::span<const cplx> source_mid) {
  const std::size_t n = u.size();
  const FrozenMap frozen = evo.frozen_map(t + 0.5 * dt);
  const LinearMap& h = frozen.apply;
  StepInfo info;
  if (cfg.scheme == Scheme::lanczos) {
    const KrylovStats ks = lanczos_expm(h, dt, u, out, cfg.krylov_dim, cfg.solver_tol);
    info.iterations = ks.substeps;
    info.residual = ks.error_estimate;
    if (!source_mid.empty()) {
      CVec half(n);
      lanczos_expm(h, 0.5 * dt, source_mid, half, cfg.krylov_dim, cfg.solver_tol);
      const cplx c(0.0, -dt);
      for (std::size_t i = 0; i < n; ++i) out[i] += c * half[i];
    }
    return info;
  }
  const cplx itau(0.0, 0.5 * dt);
  CVec hu(n), rhs(n);
  h(u, hu);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] - itau * hu[i];
  if (!source_mid.empty()) {
    const cplx c(0.0, -dt);
    for (std::size_t i = 0; i < n; ++i) rhs[i] += c * source_mid[i];
  }
  // Right preconditioning by (I + i tau D)^{-1}, D the diagonal part of H.
  // GMRES then still measures the true residual of the unpreconditioned system.
  CVec dinv(n, cplx(1.0)), x(n);
  if (frozen.diagonal.size() == n)
    for (std::size_t i = 0; i < n; ++i) dinv[i] = 1.0 / (1.0 + itau * frozen.diagonal[i]);
  LinearMap a = [&](std::span<const cplx> in, std::span<cplx> y) {
    for (std::size_t i = 0; i < n; ++i) x[i] = dinv[i] * in[i];
    h(x, y);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + itau * y[i];
  };
  for (std::size_t i = 0; i < n; ++i) out[i] = u[i] / dinv[i];
  const SolveStats st = gmres(a, rhs, out, cfg.solver_tol, cfg.max_iter);
  for (std::size_t i = 0; i < n; ++i) out[i] *= dinv[i];
  if (!st.converged)
    throw SolverError("crank-nicolson: inner solve did not converge at t = " +
                      std::to_string(t) + " (residual " +
                      std::to_string(st.relative_residual) + ")");
  info.iterations = st.iterations;
  info.residual = st.relative_residual;
  return info;
}

double PropagationRun::max_norm_drift() const {
  if (records.empty()) return 0.0;
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, std::abs(r.l2 - records.front().l2));
  return m;
}

double PropagationRun::max_ratio(std::size_t k) const {
  if (records.empty() || k >= norm_labels.size()) return 0.0;
  const double base = records.front().weighted[k];
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.weighted[k] / base);
  return m;
}

namespace {

StepRecord make_record(double t, const WaveFunction& u,
                       std::span<const NormProbe> norms, const StepInfo& info) {
  StepRecord r;
  r.t = t;
  r.l2 = l2_norm(u);
  for (const auto& p : norms) r.weighted.push_back(p.eval(u));
  r.boundary_mass = boundary_mass(u);
  r.step_residual = info.residual;
  r.iterations = info.iterations;
  return r;
}

}  // namespace

PropagationRun propagate_flow(const PropagatorConfig& cfg, const Evolution& evo,
                              const WaveFunction& u0,
                              std::span<const NormProbe> norms,
                              const Source& source) {
  const int n_steps = step_count(cfg);
  require_same_grid(evo.grid(), u0.grid);
  if (!u0.is_finite()) throw std::invalid_argument("propagate: initial state not finite");
  PropagationRun run;
  for (const auto& p : norms) run.norm_labels.push_back(p.label);

  auto note = [&](const StepRecord& r) {
    for (double w : r.weighted)
      if (!std::isfinite(w)) throw std::runtime_error("propagate: non-finite norm");
    run.max_boundary_mass = std::max(run.max_boundary_mass, r.boundary_mass);
    run.records.push_back(r);
  };

  WaveFunction u = u0, next(u0.grid);
  note(make_record(0.0, u, norms, {}));
  run.save_times.push_back(0.0);
  run.states.push_back(u);
  CVec f;
  if (source) f.resize(u.size());
  for (int s = 0; s < n_steps; ++s) {
    const double t = s * cfg.dt;
    if (source) source(t + 0.5 * cfg.dt, f);
    const StepInfo info = step(cfg, evo, t, cfg.dt, u.values, next.values, f);
    std::swap(u, next);
    run.total_iterations += info.iterations;
    const double t1 = (s + 1) * cfg.dt;
    const bool last = s + 1 == n_steps;
    if ((s + 1) % cfg.record_every == 0 || last) note(make_record(t1, u, norms, info));
    if (last || (cfg.save_every > 0 && (s + 1) % cfg.save_every == 0)) {
      run.save_times.push_back(t1);
      run.states.push_back(u);
    }
  }
  run.steps = n_steps;
  run.boundary_flag = run.max_boundary_mass > cfg.boundary_tol;
  run.final_state = u;
  return run;
}

std::vector<NormProbe> weighted_norm_probes(const HamiltonianHandle& h,
                                            std::span<const int> orders) {
  std::vector<NormProbe> probes;
  for (int a : orders) {
    const NormOrder order =
        make_norm_order(a, h.grid(), h.family().growth_order(), h.mass());
    probes.push_back({"norm_" + std::to_string(a),
                      [order](const WaveFunction& f) { return weighted_norm(order, f); }});
  }
  return probes;
}

PropagationRun propagate(const PropagatorConfig& cfg, const HamiltonianHandle& h,
                         const WaveFunction& u0, std::span<const int> orders) {
  const auto probes = weighted_norm_probes(h, orders);
  if (cfg.cutoff) {
    const MollifiedHamiltonian m(h, *cfg.cutoff);
    return propagate_flow(cfg, m, u0, probes);
  }
  return propagate_flow(cfg, h, u0, probes);
}

PropagationRun propagate_inhomogeneous(const PropagatorConfig& cfg,
                                       const HamiltonianHandle& h,
                                       const WaveFunction& u0, const Source& f,
                                       std::span<const int> orders) {
  const auto probes = weighted_norm_probes(h, orders);
  if (cfg.cutoff) {
    const MollifiedHamiltonian m(h, *cfg.cutoff);
    return propagate_flow(cfg, m, u0, probes, f);
  }
  return propagate_flow(cfg, h, u0, probes, f);
}

EnergyFit energy_estimate_check(const PropagationRun& run, std::size_t k) {
  EnergyFit fit;
  if (k >= run.norm_labels.size() || run.records.empty())
    throw std::out_of_range("energy_estimate_check: no such norm");
  fit.label = run.norm_labels[k];
  const double base = run.records.front().weighted[k];
  double c = 0.0, ratio = 0.0;
  for (const auto& r : run.records) {
    const double q = r.weighted[k] / base;
    ratio = std::max(ratio, q);
    if (r.t > 0.0 && q > 0.0) c = std::max(c, std::log(q) / r.t);
  }
  fit.c = c;
  fit.max_ratio = ratio;
  fit.finite = std::isfinite(c) && std::isfinite(ratio);
  return fit;
}

EnergyComparison compare_energy_fits(const EnergyFit& coarse,
                                     const EnergyFit& fine, double rel_tol) {
  EnergyComparison cmp{coarse, fine, 0.0, false};
  if (!coarse.finite || !fine.finite) return cmp;
  cmp.ratio_change = std::abs(coarse.max_ratio - fine.max_ratio) /
                     std::max(coarse.max_ratio, fine.max_ratio);
  cmp.stable = cmp.ratio_change <= rel_tol;
  return cmp;
}

}  // namespace tdse
