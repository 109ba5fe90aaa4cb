#include "tdse/multiparticle.hpp"

#include <algorithm>
#include <cmath>

#include "tdse/kernels.hpp"

namespace tdse {
namespace {

class TwoParticleFlow : public Evolution {
 public:
  TwoParticleFlow(const TwoParticleSystem& sys, double rho, bool derivative)
      : sys_(sys), rho_(rho), derivative_(derivative) {}
  const SpatialGrid& grid() const override { return sys_.grid(); }
  LinearMap at(double t) const override {
    return as_map(derivative_ ? sys_.frozen_rho_derivative(t, rho_)
                              : sys_.frozen(t, rho_));
  }
  FrozenMap frozen_map(double t) const override {
    return frozen_map_of(derivative_ ? sys_.frozen_rho_derivative(t, rho_)
                                     : sys_.frozen(t, rho_));
  }

 private:
  const TwoParticleSystem& sys_;
  double rho_;
  bool derivative_;
};

// Broadcast a per-particle line sample to the composite grid.
RVec spread(const SpatialGrid& composite, const RVec& line, int axis) {
  RVec out(composite.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = line[composite.axis_index(i, axis)];
  return out;
}

}  // namespace

TwoParticleSystem::TwoParticleSystem(std::shared_ptr<const PotentialFamily> first,
                                     std::shared_ptr<const PotentialFamily> second,
                                     std::optional<InteractionFamily> interaction,
                                     double half_width, int points, Interval range)
    : first_(std::move(first)),
      second_(std::move(second)),
      w_(std::move(interaction)),
      line_(make_grid(1, half_width, points)),
      grid_(make_grid(2, half_width, points)),
      range_(range) {
  if (!first_ || !second_) throw std::invalid_argument("TwoParticleSystem: null family");
  if (first_->dim() != 1 || second_->dim() != 1)
    throw std::invalid_argument("TwoParticleSystem: particle families must be one-dimensional");
  if (points > kMaxPoints)
    throw std::invalid_argument("TwoParticleSystem: at most 256 points per axis");
}

bool TwoParticleSystem::depends_on_rho() const {
  return first_->depends_on_rho() || second_->depends_on_rho() ||
         (w_ && w_->potential.depends_on(Var::rho));
}

double TwoParticleSystem::relative(double x1, double x2) const {
  const double l = line_.half_width();
  double r = std::fmod(x1 - x2 + l, 2.0 * l);
  if (r < 0.0) r += 2.0 * l;
  return r - l;
}

std::shared_ptr<const FrozenOperator> TwoParticleSystem::frozen(double t, double rho) const {
  const std::size_t n = grid_.size();
  RVec s(n, 0.0);
  std::vector<RVec> b(2);
  const PotentialFamily* fams[2] = {first_.get(), second_.get()};
  for (int k = 0; k < 2; ++k) {
    PotentialSamples p = eval_potential(*fams[k], t, rho, line_);
    RVec line = p.scalar;
    if (fams[k]->magnetic()) {
      for (std::size_t i = 0; i < line.size(); ++i)
        line[i] += p.vector[0][i] * p.vector[0][i] / (2.0 * fams[k]->mass());
      b[k] = spread(grid_, p.vector[0], k);
    }
    const RVec full = spread(grid_, line, k);
    for (std::size_t i = 0; i < n; ++i) s[i] += full[i];
  }
  if (w_) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = w_->eval(t, relative(grid_.coordinate(i, 0), grid_.coordinate(i, 1)), rho);
      if (!std::isfinite(v)) throw InvalidFamily("interaction: non-finite value");
      s[i] += v;
    }
  }
  return std::make_shared<FrozenOperator>(
      grid_, std::vector<double>{first_->mass(), second_->mass()}, 1.0,
      std::move(b), std::move(s));
}

std::shared_ptr<const FrozenOperator> TwoParticleSystem::frozen_rho_derivative(
    double t, double rho) const {
  const std::size_t n = grid_.size();
  RVec s(n, 0.0);
  std::vector<RVec> b(2);
  const PotentialFamily* fams[2] = {first_.get(), second_.get()};
  for (int k = 0; k < 2; ++k) {
    if (!fams[k]->depends_on_rho()) continue;
    PotentialSamples d = partial_rho(*fams[k], t, rho, line_);
    RVec line = d.scalar;
    if (fams[k]->magnetic() && !fams[k]->vector_drho(0).is_zero()) {
      const PotentialSamples p = eval_potential(*fams[k], t, rho, line_);
      for (std::size_t i = 0; i < line.size(); ++i)
        line[i] += p.vector[0][i] * d.vector[0][i] / fams[k]->mass();
      b[k] = spread(grid_, d.vector[0], k);
    }
    const RVec full = spread(grid_, line, k);
    for (std::size_t i = 0; i < n; ++i) s[i] += full[i];
  }
  if (w_) {
    const Expression dw = w_->drho();
    if (!dw.is_zero()) {
      VarValues vals;
      vals[Var::t] = t;
      vals[Var::rho] = rho;
      for (std::size_t i = 0; i < n; ++i) {
        vals[Var::r] = relative(grid_.coordinate(i, 0), grid_.coordinate(i, 1));
        s[i] += dw.eval(vals);
      }
    }
  }
  return std::make_shared<FrozenOperator>(
      grid_, std::vector<double>{first_->mass(), second_->mass()}, 0.0,
      std::move(b), std::move(s));
}

std::shared_ptr<const Evolution> TwoParticleSystem::flow(double rho) const {
  return std::make_shared<TwoParticleFlow>(*this, rho, false);
}

std::shared_ptr<const Evolution> TwoParticleSystem::rho_derivative(double rho) const {
  return std::make_shared<TwoParticleFlow>(*this, rho, true);
}

double TwoParticleSystem::norm(int a, const WaveFunction& f) const {
  return weighted_norm_primed({a, first_->growth_order(), second_->growth_order()}, f);
}

WaveFunction apply_two_particle_hamiltonian(const TwoParticleSystem& sys,
                                            double t, double rho,
                                            const WaveFunction& f) {
  require_same_grid(sys.grid(), f.grid);
  return sys.frozen(t, rho)->apply(f);
}

double weighted_norm_primed(const PrimedNormOrder& order, const WaveFunction& f) {
  if (f.grid.dim() != 2) throw GridMismatch("weighted_norm_primed: composite grid expected");
  if (order.a < 0)
    throw std::invalid_argument("weighted_norm_primed: negative orders are not supported");
  if (order.a == 0) return l2_norm(f);
  double total = l2_norm(f) + derivative_norm_sum(f, 2 * order.a);
  const double growth[2] = {order.m1, order.m2};
  WaveFunction wf(f.grid);
  for (int k = 0; k < 2; ++k) {
    const RVec x = coordinate_array(f.grid, k);
    RVec w(x.size());
    const double p = order.a * (growth[k] + 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(1.0 + x[i] * x[i], p);
    kernels::multiply(w, f.values, wf.values);
    total += l2_norm(wf);
  }
  return total;
}

PropagationRun propagate_two_particle(const TwoParticleSystem& sys,
                                      const PropagatorConfig& cfg, double rho,
                                      const WaveFunction& u0,
                                      std::span<const int> orders) {
  if (cfg.cutoff)
    throw std::invalid_argument("propagate_two_particle: no regularized flow on composite grids");
  std::vector<NormProbe> probes;
  for (int a : orders) {
    const PrimedNormOrder o{a, sys.particle(0).growth_order(), sys.particle(1).growth_order()};
    probes.push_back({"norm_primed_" + std::to_string(a),
                      [o](const WaveFunction& f) { return weighted_norm_primed(o, f); }});
  }
  const auto evo = sys.flow(rho);
  return propagate_flow(cfg, *evo, u0, probes);
}

WaveFunction tensor_product(const SpatialGrid& composite, const WaveFunction& g,
                            const WaveFunction& h) {
  if (composite.dim() != 2 || g.grid.dim() != 1 || h.grid.dim() != 1 ||
      g.size() != static_cast<std::size_t>(composite.points()) || !(g.grid == h.grid))
    throw GridMismatch("tensor_product: incompatible grids");
  WaveFunction out(composite);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = g.values[composite.axis_index(i, 0)] * h.values[composite.axis_index(i, 1)];
  return out;
}

double exchange_asymmetry(const WaveFunction& f) {
  if (f.grid.dim() != 2) throw GridMismatch("exchange_asymmetry: composite grid expected");
  const std::size_t n = f.grid.points();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m = std::max(m, std::abs(f.values[i * n + j] - f.values[j * n + i]));
  return m;
}

InteractionFamily quadratic_interaction() {
  return make_interaction("quadratic", "rho*(1 + r^2)", 2.0, 2.0);
}

}  // namespace tdse
