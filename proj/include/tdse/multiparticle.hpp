#pragma once

#include <memory>

#include "tdse/sensitivity.hpp"

namespace tdse {

/// Two particles on a line, each driven by a one-dimensional family, coupled
/// by W(t, x1 - x2; rho). The composite state lives on a square d = 2 grid
/// with axis 0 for particle 1. Both particles and W see the same rho.
class TwoParticleSystem : public ParametricSystem {
 public:
  static constexpr int kMaxPoints = 256;

  TwoParticleSystem(std::shared_ptr<const PotentialFamily> first,
                    std::shared_ptr<const PotentialFamily> second,
                    std::optional<InteractionFamily> interaction,
                    double half_width, int points, Interval range = {-1.0, 1.0});

  const SpatialGrid& grid() const override { return grid_; }
  const SpatialGrid& particle_grid() const { return line_; }
  Interval range() const override { return range_; }
  bool depends_on_rho() const override;
  std::shared_ptr<const Evolution> flow(double rho) const override;
  std::shared_ptr<const Evolution> rho_derivative(double rho) const override;
  /// Primed norm ||f||'_a (a >= 0).
  double norm(int a, const WaveFunction& f) const override;

  const PotentialFamily& particle(int k) const { return k == 0 ? *first_ : *second_; }
  const std::optional<InteractionFamily>& interaction() const { return w_; }

  std::shared_ptr<const FrozenOperator> frozen(double t, double rho) const;
  std::shared_ptr<const FrozenOperator> frozen_rho_derivative(double t, double rho) const;

  /// x1 - x2 wrapped to [-L, L).
  double relative(double x1, double x2) const;

 private:
  std::shared_ptr<const PotentialFamily> first_, second_;
  std::optional<InteractionFamily> w_;
  SpatialGrid line_, grid_;
  Interval range_;
};

WaveFunction apply_two_particle_hamiltonian(const TwoParticleSystem& sys,
                                            double t, double rho,
                                            const WaveFunction& f);

struct PrimedNormOrder {
  int a = 0;
  double m1 = 0.0;  ///< growth order of particle 1
  double m2 = 0.0;  ///< growth order of particle 2
};

/// ||f|| + sum_{1<=|alpha|<=2a} ||d^alpha f|| + sum_k ||<x^(k)>^{2a(M_k+1)} f||.
double weighted_norm_primed(const PrimedNormOrder& order, const WaveFunction& f);

PropagationRun propagate_two_particle(const TwoParticleSystem& sys,
                                      const PropagatorConfig& cfg, double rho,
                                      const WaveFunction& u0,
                                      std::span<const int> orders = {});

/// f(x1, x2) = g(x1) h(x2).
WaveFunction tensor_product(const SpatialGrid& composite, const WaveFunction& g,
                            const WaveFunction& h);

/// max |f(x1, x2) - f(x2, x1)| over the grid.
double exchange_asymmetry(const WaveFunction& f);

/// The interaction used by the two-particle suite: W = rho (1 + r^2).
InteractionFamily quadratic_interaction();

}  // namespace tdse
