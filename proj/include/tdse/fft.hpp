#pragma once

#include <span>

#include "tdse/grid.hpp"

namespace tdse::fft {

// Unnormalized in-place transforms. Forward uses exp(-i j k 2pi/N),
// backward exp(+i j k 2pi/N); backward(forward(f)) = N^d f.

void forward_axis(const SpatialGrid& grid, std::span<cplx> data, int axis);
void backward_axis(const SpatialGrid& grid, std::span<cplx> data, int axis);
void forward(const SpatialGrid& grid, std::span<cplx> data);
void backward(const SpatialGrid& grid, std::span<cplx> data);

}  // namespace tdse::fft
