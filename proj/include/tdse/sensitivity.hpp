#pragma once

#include <memory>
#include <vector>

#include "tdse/propagator.hpp"

namespace tdse {

/// A rho-dependent family of generators H(t; rho) on one grid.
class ParametricSystem {
 public:
  virtual ~ParametricSystem() = default;
  virtual const SpatialGrid& grid() const = 0;
  virtual Interval range() const = 0;
  virtual bool depends_on_rho() const = 0;
  virtual std::shared_ptr<const Evolution> flow(double rho) const = 0;
  /// d_rho H(t; rho) as a time-dependent map.
  virtual std::shared_ptr<const Evolution> rho_derivative(double rho) const = 0;
  /// ||f||_a for the system's norm family.
  virtual double norm(int a, const WaveFunction& f) const = 0;
};

/// One particle driven by a PotentialFamily.
class FamilySystem : public ParametricSystem {
 public:
  FamilySystem(std::shared_ptr<const PotentialFamily> fam, SpatialGrid grid);
  const SpatialGrid& grid() const override { return grid_; }
  Interval range() const override { return fam_->rho_range(); }
  bool depends_on_rho() const override { return fam_->depends_on_rho(); }
  std::shared_ptr<const Evolution> flow(double rho) const override;
  std::shared_ptr<const Evolution> rho_derivative(double rho) const override;
  double norm(int a, const WaveFunction& f) const override;

 private:
  std::shared_ptr<const PotentialFamily> fam_;
  SpatialGrid grid_;
};

/// d_rho H of a HamiltonianHandle, frozen per time.
class RhoDerivative : public Evolution {
 public:
  explicit RhoDerivative(HamiltonianHandle h) : h_(std::move(h)) {}
  const SpatialGrid& grid() const override { return h_.grid(); }
  LinearMap at(double t) const override { return as_map(h_.rho_derivative(t)); }

 private:
  HamiltonianHandle h_;
};

/// States at every cfg.record_every-th step, plus the final one.
struct Trajectory {
  std::vector<double> times;
  std::vector<WaveFunction> states;
  int total_iterations = 0;
};

Trajectory trajectory(const PropagatorConfig& cfg, const Evolution& evo,
                      const WaveFunction& u0);

/// max over common sample times of norm(a, x(t) - y(t)).
double max_distance(const ParametricSystem& sys, int a, const Trajectory& x,
                    const Trajectory& y);
double max_norm(const ParametricSystem& sys, int a, const Trajectory& x);

struct ModulusPoint {
  double delta = 0.0;
  double value = 0.0;
};

struct ModulusCurve {
  int a = 0;
  std::vector<ModulusPoint> points;
  bool decreasing = false;  ///< strictly decreasing as |delta| shrinks
  double order = 0.0;       ///< fitted log-log slope in |delta|
};

/// max_t ||u(t; rho + delta) - u(t; rho)||_a for each delta.
ModulusCurve continuity_modulus(const ParametricSystem& sys,
                                const PropagatorConfig& cfg,
                                const WaveFunction& u0, double rho,
                                std::span<const double> deltas, int a);

enum class QuotientKind { forward, central };

struct QuotientRun {
  double tau = 0.0;
  QuotientKind kind = QuotientKind::forward;
  Trajectory w;
  double max_norm = 0.0;  ///< max_t ||w_tau(t)||_a
};

/// w_tau = (u(rho + tau) - u(rho)) / tau, or the central variant.
QuotientRun difference_quotient(const ParametricSystem& sys,
                                const PropagatorConfig& cfg,
                                const WaveFunction& u0, double rho, double tau,
                                int a, QuotientKind kind = QuotientKind::forward);

struct VariationalRun {
  Trajectory u;
  Trajectory w;
  double max_norm = 0.0;  ///< max_t ||w(t)||_a
};

/// i w' = H w + (d_rho H) u, w(0) = 0, advanced in lockstep with u. The
/// source at each half step is d_rho H applied to the mean of u at the two
/// ends of the step.
VariationalRun solve_variational(const ParametricSystem& sys,
                                 const PropagatorConfig& cfg,
                                 const WaveFunction& u0, double rho, int a);

struct DiscrepancyPoint {
  double tau = 0.0;
  double discrepancy = 0.0;  ///< max_t ||w_tau - w||_a
  double quotient_max_norm = 0.0;
};

struct DiscrepancyCurve {
  QuotientKind kind = QuotientKind::forward;
  int a = 0;
  std::vector<DiscrepancyPoint> points;
  std::vector<double> pairwise_orders;
  double order = 0.0;  ///< least-squares log-log slope
  double variational_max_norm = 0.0;
  double quotient_sup = 0.0;
};

DiscrepancyCurve discrepancy_curve(const ParametricSystem& sys,
                                   const PropagatorConfig& cfg,
                                   const WaveFunction& u0, double rho,
                                   std::span<const double> taus, int a,
                                   QuotientKind kind);

/// Same as above, reusing a finished variational run.
DiscrepancyCurve discrepancy_curve(const ParametricSystem& sys,
                                   const PropagatorConfig& cfg,
                                   const WaveFunction& u0, double rho,
                                   std::span<const double> taus, int a,
                                   QuotientKind kind, const VariationalRun& var);

}  // namespace tdse
