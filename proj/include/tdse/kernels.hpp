#pragma once

#include <span>

#include "tdse/grid.hpp"

// Data-parallel inner loops. Every kernel has a plain serial reference in
// `serial` and an OpenMP version in `omp`; the unqualified names dispatch to
// `omp`. Reductions in `omp` sum fixed-size chunks in index order so results
// do not depend on the thread count.

namespace tdse::kernels {

/// Twiddles exp(2 pi i m / n), m = 0..n-1.
CVec twiddles(int n);

namespace serial {

/// out_j = sum_k exp(i 2pi j.k/N) symbol[j, k] fhat_k   (Kohn–Nirenberg)
void kn_apply(int n, int dim, std::span<const cplx> symbol,
              std::span<const cplx> fhat, std::span<cplx> out);
/// out_k = sum_j exp(-i 2pi j.k/N) conj(symbol[j, k]) g_j
void kn_adjoint_gather(int n, int dim, std::span<const cplx> symbol,
                       std::span<const cplx> g, std::span<cplx> out);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> a);
void multiply(std::span<const double> w, std::span<const cplx> f,
              std::span<cplx> out);

}  // namespace serial

namespace omp {

void kn_apply(int n, int dim, std::span<const cplx> symbol,
              std::span<const cplx> fhat, std::span<cplx> out);
void kn_adjoint_gather(int n, int dim, std::span<const cplx> symbol,
                       std::span<const cplx> g, std::span<cplx> out);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> a);
void multiply(std::span<const double> w, std::span<const cplx> f,
              std::span<cplx> out);

}  // namespace omp

using omp::dot;
using omp::kn_adjoint_gather;
using omp::kn_apply;
using omp::multiply;
using omp::norm_sq;

}  // namespace tdse::kernels
