#include "casper/grid/placement.hpp"

#include "casper/error.hpp"
#include "casper/grid/golden.hpp"

namespace casper::grid {

namespace {

// Edge groups read at most one line plus the maximum shift beyond the grid.
constexpr std::uint64_t kSlackBytes = 2 * memory::kLineBytes;

std::uint64_t grid_span(const Extents& extents, const memory::AddressMap& map) {
  return memory::round_up(extents.size() * memory::kElementBytes + kSlackBytes, map.period());
}

}  // namespace

std::uint64_t required_segment_bytes(const Extents& extents, const memory::AddressMap& map) {
  return map.period() + 2 * grid_span(extents, map);
}

GridPair place_grids(const isa::StencilKernel& kernel, const Extents& extents, const memory::StencilSegment& segment,
                     const memory::AddressMap& map) {
  check_extents(kernel, extents);
  if (segment.base % map.block_size() != 0) throw SegmentOverflow("segment base is not block aligned");
  const std::uint64_t need = required_segment_bytes(extents, map);
  if (segment.size < need) {
    throw SegmentOverflow("segment of " + std::to_string(segment.size) + " bytes cannot hold two grids needing " +
                          std::to_string(need) + " bytes");
  }
  const std::uint64_t in_base = segment.base + map.period();
  const std::uint64_t out_base = in_base + grid_span(extents, map);
  return GridPair{Grid(extents, in_base), Grid(extents, out_base)};
}

}  // namespace casper::grid
