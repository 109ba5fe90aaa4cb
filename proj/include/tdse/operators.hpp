#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "tdse/grid.hpp"
#include "tdse/linalg.hpp"
#include "tdse/potentials.hpp"
#include "tdse/symbolcalc.hpp"

namespace tdse {

/// A frozen second-order operator in expanded symmetric form
///
///   sum_j [ kinetic p_j^2 - (B_j p_j + p_j B_j) ] / (2 m_j) + S(x),
///
/// with p_j = -i d/dx_j applied spectrally. H(t) uses kinetic = 1, B = A and
/// S = |A|^2/2m + V; its rho-derivative uses kinetic = 0, B = d_rho A and
/// S = A.d_rho A / m + d_rho V. Hermitian for real B and S.
class FrozenOperator {
 public:
  FrozenOperator(SpatialGrid grid, std::vector<double> masses, double kinetic,
                 std::vector<RVec> vector, RVec scalar);

  const SpatialGrid& grid() const { return grid_; }
  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  WaveFunction apply(const WaveFunction& f) const;
  const RVec& scalar() const { return scalar_; }
  const std::vector<RVec>& vector() const { return vector_; }

 private:
  SpatialGrid grid_;
  std::vector<double> masses_;
  double kinetic_;
  std::vector<RVec> vector_;  // empty entry means B_j = 0
  RVec scalar_;
  std::vector<RVec> freq_;
};

/// An operator frozen at one time, with an optional real diagonal that
/// approximates it (used to precondition implicit steps).
struct FrozenMap {
  LinearMap apply;
  RVec diagonal;
};

/// A time-dependent Hermitian generator sampled at fixed times.
class Evolution {
 public:
  virtual ~Evolution() = default;
  virtual const SpatialGrid& grid() const = 0;
  virtual LinearMap at(double t) const = 0;
  virtual FrozenMap frozen_map(double t) const { return {at(t), {}}; }
};

/// The map of a frozen operator with its scalar part as the diagonal.
FrozenMap frozen_map_of(std::shared_ptr<const FrozenOperator> op);

LinearMap as_map(std::shared_ptr<const FrozenOperator> op);

/// H(t; rho) for one particle on a grid.
class HamiltonianHandle : public Evolution {
 public:
  HamiltonianHandle(std::shared_ptr<const PotentialFamily> fam, double rho,
                    SpatialGrid grid);

  const SpatialGrid& grid() const override { return grid_; }
  const PotentialFamily& family() const { return *fam_; }
  std::shared_ptr<const PotentialFamily> family_ptr() const { return fam_; }
  double rho() const { return rho_; }
  double mass() const { return fam_->mass(); }

  std::shared_ptr<const FrozenOperator> frozen(double t) const;
  /// d_rho H(t; rho) in the same expanded symmetric form.
  std::shared_ptr<const FrozenOperator> rho_derivative(double t) const;
  LinearMap at(double t) const override;
  FrozenMap frozen_map(double t) const override { return frozen_map_of(frozen(t)); }

 private:
  std::shared_ptr<const PotentialFamily> fam_;
  double rho_;
  SpatialGrid grid_;
};

WaveFunction apply_hamiltonian(const HamiltonianHandle& h, double t,
                               const WaveFunction& f);

/// H_eps(t) = X_eps(t)^dagger H(t) X_eps(t), X_eps the Kohn–Nirenberg
/// quantization of chi(eps (mu + h)).
class MollifiedHamiltonian : public Evolution {
 public:
  MollifiedHamiltonian(const HamiltonianHandle& h, CutoffSpec spec);
  const SpatialGrid& grid() const override { return h_.grid(); }
  LinearMap at(double t) const override;

 private:
  HamiltonianHandle h_;
  CutoffSpec spec_;
};

WaveFunction apply_mollified(const HamiltonianHandle& h, const CutoffSpec& spec,
                             double t, const WaveFunction& f);

// Weighted norms -------------------------------------------------------------

struct NormOrder {
  int a = 0;
  double growth_order = 0.0;  ///< M
  double mu_prime = 1.0;
  double mass = 1.0;
};

/// mu' from a scan of the unshifted lambda_M on the grid: the shift that lifts
/// its minimum to at least 1.
double choose_mu_prime(const SpatialGrid& grid, double growth_order,
                       double mass = 1.0);
NormOrder make_norm_order(int a, const SpatialGrid& grid, double growth_order,
                          double mass = 1.0);

/// Lambda_M = mu' + |xi|^2/2m + <x>^{2(M+1)} (separable, exactly Hermitian).
void apply_lambda_m(const NormOrder& order, const SpatialGrid& grid,
                    std::span<const cplx> in, std::span<cplx> out);

struct LambdaSolveOptions {
  double tol = 1e-10;
  int max_iter = 2000;
};

/// (Lambda_M)^a f; negative powers by conjugate gradient. Throws SolverError.
WaveFunction apply_lambda_m_power(const NormOrder& order, const WaveFunction& f,
                                  LambdaSolveOptions opts = {});

/// ||f||_a = ||f|| + sum_{1<=|alpha|<=2a} ||d^alpha f|| + ||<x>^{2a(M+1)} f||
/// for a >= 1, ||f|| for a = 0, ||Lambda_M^a f|| for a < 0.
double weighted_norm(const NormOrder& order, const WaveFunction& f,
                     LambdaSolveOptions opts = {});

/// sum over 1 <= |alpha| <= max_order of ||d^alpha f||, via Parseval.
double derivative_norm_sum(const WaveFunction& f, int max_order);

}  // namespace tdse
