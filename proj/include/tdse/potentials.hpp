#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdse/expression.hpp"
#include "tdse/grid.hpp"

namespace tdse {

class InvalidFamily : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Open parameter interval.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  bool contains(double v) const { return v > lo && v < hi; }
};

struct FamilyDefinition {
  std::string name;
  int dim = 1;
  std::string scalar;               ///< V(t, x; rho)
  std::vector<std::string> vector;  ///< A_j(t, x; rho); empty means A = 0
  double growth_order = 0.0;        ///< M
  double delta = 1.0;               ///< margin in |A| <= C<x>^{M+1-delta}
  double mass = 1.0;
  Interval rho_range{-1.0, 1.0};
};

/// Closed-form electromagnetic potentials (V, A) with growth metadata.
/// Time and parameter partials are derived symbolically at construction.
class PotentialFamily {
 public:
  explicit PotentialFamily(FamilyDefinition def);

  const FamilyDefinition& definition() const { return def_; }
  const std::string& name() const { return def_.name; }
  int dim() const { return def_.dim; }
  double growth_order() const { return def_.growth_order; }
  double delta() const { return def_.delta; }
  double mass() const { return def_.mass; }
  Interval rho_range() const { return def_.rho_range; }

  const Expression& scalar() const { return v_; }
  const Expression& vector(int axis) const { return a_[axis]; }
  const Expression& scalar_dt() const { return v_t_; }
  const Expression& scalar_drho() const { return v_rho_; }
  const Expression& vector_dt(int axis) const { return a_t_[axis]; }
  const Expression& vector_drho(int axis) const { return a_rho_[axis]; }
  const Expression& divergence() const { return div_a_; }

  bool magnetic() const { return magnetic_; }
  bool depends_on_rho() const { return rho_dependent_; }

  /// Variable bindings for a point x (length dim).
  VarValues bind(double t, std::span<const double> x, double rho) const;

 private:
  FamilyDefinition def_;
  Expression v_, v_t_, v_rho_, div_a_;
  std::vector<Expression> a_, a_t_, a_rho_;
  bool magnetic_ = false;
  bool rho_dependent_ = false;
};

struct PotentialSamples {
  RVec scalar;               ///< V at every node
  std::vector<RVec> vector;  ///< A_j at every node (dim arrays)
};

/// Samples (V, A) on the grid nodes; throws InvalidFamily on non-finite values.
PotentialSamples eval_potential(const PotentialFamily& fam, double t,
                                double rho, const SpatialGrid& grid);
/// Closed-form (d_rho V, d_rho A); zero arrays for rho-independent families.
PotentialSamples partial_rho(const PotentialFamily& fam, double t, double rho,
                             const SpatialGrid& grid);
/// div A at the nodes.
RVec eval_divergence(const PotentialFamily& fam, double t, double rho,
                     const SpatialGrid& grid);

/// W(t, r; rho) acting on the relative coordinate of two particles.
struct InteractionFamily {
  std::string name;
  Expression potential;         ///< in variables t, r, rho
  double growth_exponent = 2.0; ///< |W| <= C<r>^{growth_exponent}
  double delta = 1.0;           ///< growth_exponent = 2(M0 + 1) - delta
  Expression drho() const { return potential.derivative(Var::rho); }
  double eval(double t, double r, double rho) const;
};

InteractionFamily make_interaction(std::string name, const std::string& text,
                                   double growth_exponent, double delta);

// Catalog ------------------------------------------------------------------

/// Names: harmonic, confined_quartic, anharmonic_rho, oscillating_quartic,
/// magnetic_quartic_2d.
const std::vector<FamilyDefinition>& builtin_definitions();
PotentialFamily builtin_family(const std::string& name);
bool is_builtin_family(const std::string& name);
/// V = t|x|^4 + |x|^2, A = 0: escapes the lower growth bound at t = 0.
PotentialFamily time_switched_quartic(double growth_order = 1.0);

// Assumption validation -----------------------------------------------------

struct Witness {
  double t = 0.0;
  std::vector<double> x;
  double rho = 0.0;
};

struct BoundCheck {
  std::string name;
  std::string inequality;
  double constant = 0.0;        ///< fitted constant on the sample
  double slope = 0.0;           ///< shell-fit log-log slope of the ratio
  bool pass = true;
  std::string reason;
  Witness witness;
};

struct ValidationReport {
  std::string family;
  bool pass = true;
  std::vector<BoundCheck> checks;
  double c0 = 0.0;  ///< lower growth constant
  double c1 = 0.0;  ///< lower growth offset
  double c2 = 0.0;  ///< upper growth constant
  int nodes = 0;
  int time_samples = 0;
  int rho_samples = 0;
  int alpha_max = 0;
  double slope_tolerance = 0.0;
};

inline constexpr double kShellSlopeTolerance = 0.2;

/// Sampling-based check of the growth assumptions on (V, A) and their x, t
/// and rho derivatives (x derivatives by central finite differences of the
/// closed forms, |alpha| <= alpha_max <= 4).
ValidationReport validate_assumption(const PotentialFamily& fam,
                                     const SpatialGrid& grid,
                                     std::span<const double> t_samples,
                                     std::span<const double> rho_samples,
                                     int alpha_max);

ValidationReport validate_interaction(const InteractionFamily& w,
                                      const SpatialGrid& grid,
                                      std::span<const double> t_samples,
                                      std::span<const double> rho_samples,
                                      int alpha_max);

/// n-th central finite difference of f at x with step h (second order).
double central_difference(const std::function<double(double)>& f, double x,
                          int order, double h);

}  // namespace tdse
