#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

#include "tdse/grid.hpp"

namespace tdse {

/// y = A x for a matrix-free operator; x and y never alias.
using LinearMap = std::function<void(std::span<const cplx>, std::span<cplx>)>;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with modified Gram–Schmidt; x holds the initial guess.
SolveStats gmres(const LinearMap& op, std::span<const cplx> rhs,
                 std::span<cplx> x, double tol, int max_iter, int restart = 60);

/// Conjugate gradient for Hermitian positive-definite operators.
SolveStats conjugate_gradient(const LinearMap& op, std::span<const cplx> rhs,
                              std::span<cplx> x, double tol, int max_iter);

struct KrylovStats {
  int substeps = 0;
  int max_dim = 0;
  double error_estimate = 0.0;
};

/// out = exp(-i dt H) u by Lanczos with full reorthogonalization. The step
/// is subdivided until the a posteriori estimate drops below tol * ||u||.
KrylovStats lanczos_expm(const LinearMap& hermitian, double dt,
                         std::span<const cplx> u, std::span<cplx> out,
                         int krylov_dim, double tol);

struct NormEstimate {
  double value = 0.0;  ///< largest singular value found (a lower bound)
  int probes = 0;
  int iterations = 0;
};

/// Randomized subspace iteration on A^dagger A from n_probe seeded random
/// vectors. Returns the largest Ritz singular value of A.
NormEstimate estimate_operator_norm(const LinearMap& op,
                                    const LinearMap& adjoint, std::size_t n,
                                    int n_probe, int iterations,
                                    std::uint64_t seed);

}  // namespace tdse
