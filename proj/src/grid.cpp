#include "tdse/grid.hpp"

#include <cmath>
#include <string>

#include "tdse/fft.hpp"
#include "tdse/kernels.hpp"

namespace tdse {

SpatialGrid make_grid(int dim, double half_width, int points) {
  if (dim < 1 || dim > 2)
    throw std::invalid_argument("make_grid: dim must be 1 or 2, got " +
                                std::to_string(dim));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("make_grid: half width must be positive");
  if (points < 8 || points % 2 != 0)
    throw std::invalid_argument("make_grid: points must be even and >= 8, got " +
                                std::to_string(points));
  SpatialGrid g;
  g.dim_ = dim;
  g.half_width_ = half_width;
  g.points_ = points;
  return g;
}

std::size_t SpatialGrid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim_; ++a) n *= static_cast<std::size_t>(points_);
  return n;
}

double SpatialGrid::cell_volume() const { return std::pow(dx(), dim_); }

int SpatialGrid::axis_index(std::size_t flat, int axis) const {
  if (dim_ == 1) return static_cast<int>(flat);
  return static_cast<int>(axis == 0 ? flat / points_ : flat % points_);
}

double SpatialGrid::coordinate(std::size_t flat, int axis) const {
  return node(axis_index(flat, axis));
}

double SpatialGrid::wavenumber(std::size_t flat, int axis) const {
  return frequency(axis_index(flat, axis));
}

WaveFunction::WaveFunction(const SpatialGrid& g, CVec v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw GridMismatch("WaveFunction: values length does not match grid");
}

bool WaveFunction::is_finite() const {
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b) {
  if (!(a == b)) throw GridMismatch("grid mismatch");
}

cplx l2_inner_product(const WaveFunction& f, const WaveFunction& g) {
  require_same_grid(f.grid, g.grid);
  return f.grid.cell_volume() * kernels::dot(f.values, g.values);
}

double l2_norm(const SpatialGrid& grid, std::span<const cplx> values) {
  return std::sqrt(grid.cell_volume() * kernels::norm_sq(values));
}

double l2_norm(const WaveFunction& f) { return l2_norm(f.grid, f.values); }

double l2_distance(const WaveFunction& f, const WaveFunction& g) {
  require_same_grid(f.grid, g.grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += std::norm(f.values[i] - g.values[i]);
  return std::sqrt(f.grid.cell_volume() * acc);
}

WaveFunction spectral_derivative(const WaveFunction& f, int axis, int order) {
  if (order < 1) throw std::invalid_argument("spectral_derivative: order >= 1");
  if (axis < 0 || axis >= f.grid.dim())
    throw std::invalid_argument("spectral_derivative: axis out of range");
  WaveFunction out = f;
  fft::forward_axis(f.grid, out.values, axis);
  const double inv_n = 1.0 / f.grid.points();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx ik(0.0, f.grid.wavenumber(i, axis));
    out.values[i] *= std::pow(ik, order) * inv_n;
  }
  fft::backward_axis(f.grid, out.values, axis);
  return out;
}

RVec japanese_bracket(const SpatialGrid& grid) {
  RVec w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double x = grid.coordinate(i, a);
      r2 += x * x;
    }
    w[i] = std::sqrt(1.0 + r2);
  }
  return w;
}

RVec coordinate_array(const SpatialGrid& grid, int axis) {
  RVec x(grid.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = grid.coordinate(i, axis);
  return x;
}

RVec frequency_array(const SpatialGrid& grid, int axis) {
  RVec k(grid.size());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = grid.wavenumber(i, axis);
  return k;
}

double boundary_mass(const WaveFunction& f) {
  const double edge = 0.9 * f.grid.half_width();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool outer = false;
    for (int a = 0; a < f.grid.dim(); ++a)
      outer = outer || std::abs(f.grid.coordinate(i, a)) >= edge;
    if (outer) acc += std::norm(f.values[i]);
  }
  return acc * f.grid.cell_volume();
}

WaveFunction gaussian(const SpatialGrid& grid, std::span<const double> center,
                      double width, std::span<const double> momentum) {
  const int d = grid.dim();
  if (!center.empty() && static_cast<int>(center.size()) != d)
    throw std::invalid_argument("gaussian: center dimension");
  if (!momentum.empty() && static_cast<int>(momentum.size()) != d)
    throw std::invalid_argument("gaussian: momentum dimension");
  const double norm = std::pow(SpatialGrid::kPi * width * width, -0.25 * d);
  WaveFunction out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < d; ++a) {
      const double x = grid.coordinate(i, a);
      const double c = center.empty() ? 0.0 : center[a];
      r2 += (x - c) * (x - c);
      if (!momentum.empty()) phase += momentum[a] * x;
    }
    out.values[i] = norm * std::exp(-r2 / (2.0 * width * width)) *
                    std::polar(1.0, phase);
  }
  return out;
}

WaveFunction plane_wave(const SpatialGrid& grid, int axis, int mode) {
  WaveFunction out(grid);
  const double kappa = mode * grid.dxi();
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = std::polar(1.0, kappa * grid.coordinate(i, axis));
  return out;
}

}  // namespace tdse
