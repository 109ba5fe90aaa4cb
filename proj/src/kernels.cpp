#include "tdse/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace tdse::kernels {
namespace {

constexpr std::size_t kChunk = 4096;

std::size_t phase_size(int n, int dim) {
  return dim == 1 ? static_cast<std::size_t>(n)
                  : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
}

void check_symbol(int n, int dim, std::size_t symbol_size) {
  const std::size_t m = phase_size(n, dim);
  if (symbol_size != m * m) throw std::invalid_argument("kernel: symbol size");
}

// Phase index (j.k) mod n for flat node j and flat frequency k.
inline int phase_index(int n, int dim, std::size_t j, std::size_t k) {
  if (dim == 1) return static_cast<int>((j * k) % n);
  const std::size_t j0 = j / n, j1 = j % n, k0 = k / n, k1 = k % n;
  return static_cast<int>((j0 * k0 + j1 * k1) % n);
}

cplx kn_row(int n, int dim, const CVec& tw, std::span<const cplx> symbol,
            std::span<const cplx> fhat, std::size_t j) {
  const std::size_t m = phase_size(n, dim);
  const cplx* row = symbol.data() + j * m;
  cplx acc = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    acc += tw[phase_index(n, dim, j, k)] * row[k] * fhat[k];
  return acc;
}

cplx adjoint_column(int n, int dim, const CVec& tw,
                    std::span<const cplx> symbol, std::span<const cplx> g,
                    std::size_t k) {
  const std::size_t m = phase_size(n, dim);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    acc += std::conj(tw[phase_index(n, dim, j, k)] * symbol[j * m + k]) * g[j];
  return acc;
}

}  // namespace

CVec twiddles(int n) {
  CVec tw(n);
  for (int m = 0; m < n; ++m) {
    const double angle = 2.0 * SpatialGrid::kPi * m / n;
    tw[m] = {std::cos(angle), std::sin(angle)};
  }
  return tw;
}

namespace serial {

void kn_apply(int n, int dim, std::span<const cplx> symbol,
              std::span<const cplx> fhat, std::span<cplx> out) {
  check_symbol(n, dim, symbol.size());
  const CVec tw = twiddles(n);
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = kn_row(n, dim, tw, symbol, fhat, j);
}

void kn_adjoint_gather(int n, int dim, std::span<const cplx> symbol,
                       std::span<const cplx> g, std::span<cplx> out) {
  check_symbol(n, dim, symbol.size());
  const CVec tw = twiddles(n);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = adjoint_column(n, dim, tw, symbol, g, k);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

double norm_sq(std::span<const cplx> a) {
  double acc = 0.0;
  for (const cplx& v : a) acc += std::norm(v);
  return acc;
}

void multiply(std::span<const double> w, std::span<const cplx> f,
              std::span<cplx> out) {
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = w[i] * f[i];
}

}  // namespace serial

namespace omp {

void kn_apply(int n, int dim, std::span<const cplx> symbol,
              std::span<const cplx> fhat, std::span<cplx> out) {
  check_symbol(n, dim, symbol.size());
  const CVec tw = twiddles(n);
  const auto m = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < m; ++j)
    out[j] = kn_row(n, dim, tw, symbol, fhat, static_cast<std::size_t>(j));
}

void kn_adjoint_gather(int n, int dim, std::span<const cplx> symbol,
                       std::span<const cplx> g, std::span<cplx> out) {
  check_symbol(n, dim, symbol.size());
  const CVec tw = twiddles(n);
  const auto m = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < m; ++k)
    out[k] = adjoint_column(n, dim, tw, symbol, g, static_cast<std::size_t>(k));
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t chunks = (a.size() + kChunk - 1) / kChunk;
  if (chunks <= 1) return serial::dot(a, b);
  CVec partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = c * kChunk;
    const std::size_t len = std::min(kChunk, a.size() - lo);
    partial[c] = serial::dot(a.subspan(lo, len), b.subspan(lo, len));
  }
  cplx acc = 0.0;
  for (const cplx& p : partial) acc += p;
  return acc;
}

double norm_sq(std::span<const cplx> a) {
  const std::size_t chunks = (a.size() + kChunk - 1) / kChunk;
  if (chunks <= 1) return serial::norm_sq(a);
  RVec partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = c * kChunk;
    partial[c] = serial::norm_sq(a.subspan(lo, std::min(kChunk, a.size() - lo)));
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

void multiply(std::span<const double> w, std::span<const cplx> f,
              std::span<cplx> out) {
  const auto m = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static) if (m > 16384)
  for (std::ptrdiff_t i = 0; i < m; ++i) out[i] = w[i] * f[i];
}

}  // namespace omp
}  // namespace tdse::kernels
