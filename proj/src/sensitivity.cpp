#include "tdse/sensitivity.hpp"

#include <algorithm>
#include <cmath>

namespace tdse {

FamilySystem::FamilySystem(std::shared_ptr<const PotentialFamily> fam,
                           SpatialGrid grid)
    : fam_(std::move(fam)), grid_(grid) {
  if (!fam_) throw std::invalid_argument("FamilySystem: null family");
  if (fam_->dim() != grid_.dim()) throw GridMismatch("FamilySystem: dimension");
}

std::shared_ptr<const Evolution> FamilySystem::flow(double rho) const {
  return std::make_shared<HamiltonianHandle>(fam_, rho, grid_);
}

std::shared_ptr<const Evolution> FamilySystem::rho_derivative(double rho) const {
  return std::make_shared<RhoDerivative>(HamiltonianHandle(fam_, rho, grid_));
}

double FamilySystem::norm(int a, const WaveFunction& f) const {
  return weighted_norm(make_norm_order(a, grid_, fam_->growth_order(), fam_->mass()), f);
}

Trajectory trajectory(const PropagatorConfig& cfg, const Evolution& evo,
                      const WaveFunction& u0) {
  const int n = step_count(cfg);
  require_same_grid(evo.grid(), u0.grid);
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(u0);
  WaveFunction u = u0, next(u0.grid);
  for (int s = 0; s < n; ++s) {
    tr.total_iterations += step(cfg, evo, s * cfg.dt, cfg.dt, u.values, next.values).iterations;
    std::swap(u, next);
    if ((s + 1) % cfg.record_every == 0 || s + 1 == n) {
      tr.times.push_back((s + 1) * cfg.dt);
      tr.states.push_back(u);
    }
  }
  return tr;
}

namespace {

void check_same_schedule(const Trajectory& x, const Trajectory& y) {
  if (x.times.size() != y.times.size())
    throw std::invalid_argument("trajectories sampled on different schedules");
}

WaveFunction combine(const WaveFunction& x, double cx, const WaveFunction& y,
                     double cy) {
  WaveFunction out(x.grid);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = cx * x.values[i] + cy * y.values[i];
  return out;
}

void check_parameter(const ParametricSystem& sys, double rho) {
  if (!sys.range().contains(rho))
    throw std::invalid_argument("parameter " + std::to_string(rho) +
                                " outside the family's open interval");
}

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(x[i]);
      ly.push_back(y[i]);
    }
  return lx.size() >= 2 ? loglog_slope(lx, ly) : 0.0;
}

}  // namespace

double max_distance(const ParametricSystem& sys, int a, const Trajectory& x,
                    const Trajectory& y) {
  check_same_schedule(x, y);
  double m = 0.0;
  for (std::size_t i = 0; i < x.states.size(); ++i)
    m = std::max(m, sys.norm(a, combine(x.states[i], 1.0, y.states[i], -1.0)));
  return m;
}

double max_norm(const ParametricSystem& sys, int a, const Trajectory& x) {
  double m = 0.0;
  for (const auto& s : x.states) m = std::max(m, sys.norm(a, s));
  return m;
}

ModulusCurve continuity_modulus(const ParametricSystem& sys,
                                const PropagatorConfig& cfg,
                                const WaveFunction& u0, double rho,
                                std::span<const double> deltas, int a) {
  check_parameter(sys, rho);
  const Trajectory base = trajectory(cfg, *sys.flow(rho), u0);
  ModulusCurve curve;
  curve.a = a;
  std::vector<double> xs, ys;
  for (double d : deltas) {
    double value = 0.0;
    if (d != 0.0) {
      check_parameter(sys, rho + d);
      value = max_distance(sys, a, trajectory(cfg, *sys.flow(rho + d), u0), base);
    }
    curve.points.push_back({d, value});
    xs.push_back(std::abs(d));
    ys.push_back(value);
  }
  std::vector<ModulusPoint> sorted = curve.points;
  std::sort(sorted.begin(), sorted.end(), [](const auto& p, const auto& q) {
    return std::abs(p.delta) > std::abs(q.delta);
  });
  curve.decreasing = true;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!(sorted[i].value < sorted[i - 1].value) &&
        !(sorted[i].value == 0.0 && sorted[i - 1].value == 0.0))
      curve.decreasing = false;
  curve.order = fitted_order(xs, ys);
  return curve;
}

QuotientRun difference_quotient(const ParametricSystem& sys,
                                const PropagatorConfig& cfg,
                                const WaveFunction& u0, double rho, double tau,
                                int a, QuotientKind kind) {
  if (tau == 0.0) throw std::invalid_argument("difference_quotient: tau must be nonzero");
  check_parameter(sys, rho);
  check_parameter(sys, rho + tau);
  const Trajectory up = trajectory(cfg, *sys.flow(rho + tau), u0);
  Trajectory lo;
  double scale = 1.0 / tau;
  if (kind == QuotientKind::central) {
    check_parameter(sys, rho - tau);
    lo = trajectory(cfg, *sys.flow(rho - tau), u0);
    scale = 0.5 / tau;
  } else {
    lo = trajectory(cfg, *sys.flow(rho), u0);
  }
  QuotientRun q;
  q.tau = tau;
  q.kind = kind;
  q.w.times = up.times;
  q.w.total_iterations = up.total_iterations + lo.total_iterations;
  for (std::size_t i = 0; i < up.states.size(); ++i)
    q.w.states.push_back(combine(up.states[i], scale, lo.states[i], -scale));
  q.max_norm = max_norm(sys, a, q.w);
  return q;
}

VariationalRun solve_variational(const ParametricSystem& sys,
                                 const PropagatorConfig& cfg,
                                 const WaveFunction& u0, double rho, int a) {
  check_parameter(sys, rho);
  const int n = step_count(cfg);
  const auto h = sys.flow(rho);
  const auto dh = sys.rho_derivative(rho);
  VariationalRun run;
  WaveFunction u = u0, u_next(u0.grid), w(u0.grid), w_next(u0.grid);
  run.u.times.push_back(0.0);
  run.u.states.push_back(u);
  run.w.times.push_back(0.0);
  run.w.states.push_back(w);
  CVec mean(u.size()), src(u.size());
  for (int s = 0; s < n; ++s) {
    const double t = s * cfg.dt;
    run.u.total_iterations += step(cfg, *h, t, cfg.dt, u.values, u_next.values).iterations;
    for (std::size_t i = 0; i < mean.size(); ++i)
      mean[i] = 0.5 * (u.values[i] + u_next.values[i]);
    dh->at(t + 0.5 * cfg.dt)(mean, src);
    run.w.total_iterations +=
        step(cfg, *h, t, cfg.dt, w.values, w_next.values, src).iterations;
    std::swap(u, u_next);
    std::swap(w, w_next);
    if ((s + 1) % cfg.record_every == 0 || s + 1 == n) {
      const double t1 = (s + 1) * cfg.dt;
      run.u.times.push_back(t1);
      run.u.states.push_back(u);
      run.w.times.push_back(t1);
      run.w.states.push_back(w);
    }
  }
  run.max_norm = max_norm(sys, a, run.w);
  return run;
}

DiscrepancyCurve discrepancy_curve(const ParametricSystem& sys,
                                   const PropagatorConfig& cfg,
                                   const WaveFunction& u0, double rho,
                                   std::span<const double> taus, int a,
                                   QuotientKind kind, const VariationalRun& var) {
  DiscrepancyCurve curve;
  curve.kind = kind;
  curve.a = a;
  curve.variational_max_norm = var.max_norm;
  std::vector<double> xs, ys;
  for (double tau : taus) {
    const QuotientRun q = difference_quotient(sys, cfg, u0, rho, tau, a, kind);
    const double d = max_distance(sys, a, q.w, var.w);
    curve.points.push_back({tau, d, q.max_norm});
    curve.quotient_sup = std::max(curve.quotient_sup, q.max_norm);
    xs.push_back(std::abs(tau));
    ys.push_back(d);
  }
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (ys[i] > 0.0 && ys[i - 1] > 0.0)
      curve.pairwise_orders.push_back(std::log(ys[i - 1] / ys[i]) /
                                      std::log(xs[i - 1] / xs[i]));
  curve.order = fitted_order(xs, ys);
  return curve;
}

DiscrepancyCurve discrepancy_curve(const ParametricSystem& sys,
                                   const PropagatorConfig& cfg,
                                   const WaveFunction& u0, double rho,
                                   std::span<const double> taus, int a,
                                   QuotientKind kind) {
  return discrepancy_curve(sys, cfg, u0, rho, taus, a, kind,
                           solve_variational(sys, cfg, u0, rho, a));
}

}  // namespace tdse
