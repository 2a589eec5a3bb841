#pragma once

#include "casper/grid/grid.hpp"
#include "casper/isa/kernel.hpp"

namespace casper::grid {

/// One functional timestep. Interior points are the coefficient-weighted sum
/// of their neighbors accumulated in canonical order starting from +0.0;
/// points within the kernel radius of a face are copied from the input.
/// Throws DimensionError when an extent is smaller than 2*radius+1.
Grid golden_step(const isa::StencilKernel& kernel, const Grid& input);

/// Applies golden_step `timesteps` times.
Grid golden_run(const isa::StencilKernel& kernel, Grid input, int timesteps);

/// Throws DimensionError unless every extent admits at least one interior point.
void check_extents(const isa::StencilKernel& kernel, const Extents& extents);

}  // namespace casper::grid
