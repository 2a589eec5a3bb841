#pragma once

#include <cstdint>

#include "casper/grid/grid.hpp"
#include "casper/isa/kernel.hpp"
#include "casper/memory/address_map.hpp"

namespace casper::grid {

struct GridPair {
  Grid input;
  Grid output;
};

/// Bytes of stencil segment needed by place_grids for these extents.
std::uint64_t required_segment_bytes(const Extents& extents, const memory::AddressMap& map);

/// Places an input/output pair inside the segment. Both bases sit a whole
/// number of hash periods (block_size * n_slices) from the segment base, so
/// equal indices of the two grids always map to the same slice. One period
/// precedes the input and each grid is followed by slack, so the widened
/// windows of edge groups stay inside the segment.
/// Throws SegmentOverflow when the segment is too small.
GridPair place_grids(const isa::StencilKernel& kernel, const Extents& extents, const memory::StencilSegment& segment,
                     const memory::AddressMap& map);

}  // namespace casper::grid
