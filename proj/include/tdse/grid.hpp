#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdse {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

/// Uniform periodic grid on [-L, L)^d with its discrete-Fourier dual.
///
/// Flat indices put axis 0 slowest: for d = 2 the node (j0, j1) lives at
/// j0 * N + j1. Frequencies use FFT ordering: k < N/2 maps to k * dxi and
/// k >= N/2 to (k - N) * dxi, so the dual grid covers [-pi/dx, pi/dx).
class SpatialGrid {
 public:
  SpatialGrid() = default;

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points() const { return points_; }
  double dx() const { return 2.0 * half_width_ / points_; }
  double dxi() const { return kPi / half_width_; }
  double max_frequency() const { return kPi / dx(); }
  std::size_t size() const;
  double cell_volume() const;

  double node(int j) const { return -half_width_ + j * dx(); }
  double frequency(int k) const {
    return (k < points_ / 2 ? k : k - points_) * dxi();
  }

  /// Coordinate of a flat index along one axis.
  double coordinate(std::size_t flat, int axis) const;
  /// Frequency of a flat (dual) index along one axis.
  double wavenumber(std::size_t flat, int axis) const;
  int axis_index(std::size_t flat, int axis) const;

  bool operator==(const SpatialGrid&) const = default;

  static constexpr double kPi = 3.14159265358979323846;

 private:
  friend SpatialGrid make_grid(int, double, int);
  int dim_ = 1;
  double half_width_ = 1.0;
  int points_ = 8;
};

/// Throws std::invalid_argument for odd N, N < 8, L <= 0 or d outside {1, 2}.
SpatialGrid make_grid(int dim, double half_width, int points);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WaveFunction {
  SpatialGrid grid;
  CVec values;

  WaveFunction() = default;
  explicit WaveFunction(const SpatialGrid& g) : grid(g), values(g.size()) {}
  WaveFunction(const SpatialGrid& g, CVec v);

  std::size_t size() const { return values.size(); }
  std::span<const cplx> view() const { return values; }
  std::span<cplx> view() { return values; }
  bool is_finite() const;
};

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b);

/// (f, g) = dx^d * sum f_j conj(g_j).
cplx l2_inner_product(const WaveFunction& f, const WaveFunction& g);
double l2_norm(const WaveFunction& f);
double l2_norm(const SpatialGrid& grid, std::span<const cplx> values);
double l2_distance(const WaveFunction& f, const WaveFunction& g);

/// Fourier-multiplier derivative (i xi)^order along one axis.
WaveFunction spectral_derivative(const WaveFunction& f, int axis, int order);

/// <x> = sqrt(1 + |x|^2) sampled at every node.
RVec japanese_bracket(const SpatialGrid& grid);
/// Per-axis coordinate array (length N^d).
RVec coordinate_array(const SpatialGrid& grid, int axis);
/// Per-axis frequency array (length N^d, FFT ordering).
RVec frequency_array(const SpatialGrid& grid, int axis);

/// Mass in the outer 10% of the box along any axis.
double boundary_mass(const WaveFunction& f);

/// (pi w^2)^(-d/4) exp(-|x - c|^2 / (2 w^2)) exp(i k.x), unit L2 norm in R^d.
WaveFunction gaussian(const SpatialGrid& grid, std::span<const double> center,
                      double width, std::span<const double> momentum = {});
WaveFunction plane_wave(const SpatialGrid& grid, int axis, int mode);

}  // namespace tdse
