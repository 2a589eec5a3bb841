#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "casper/grid/placement.hpp"
#include "casper/isa/kernel.hpp"
#include "casper/memory/address_map.hpp"

namespace casper::sim {

/// Contiguous interior stretch of one output row.
struct RowSpan {
  std::size_t start = 0;  // linear index of the first interior element
  std::size_t n = 0;
};

/// Interior of every row in row-major order.
std::vector<RowSpan> interior_rows(const isa::StencilKernel& kernel, const grid::Extents& extents);

/// One SPU's work inside a phase.
struct Run {
  unsigned spu = 0;
  std::size_t out_linear = 0;
  std::uint64_t n_elements = 0;
  std::uint64_t out_addr = 0;
  std::vector<std::uint64_t> in_addrs;  // per input stream, by stream index

  std::uint64_t lead() const noexcept { return (out_addr % memory::kLineBytes) / memory::kElementBytes; }
  std::uint64_t groups() const noexcept { return (lead() + n_elements + memory::kLanes - 1) / memory::kLanes; }
};

struct Phase {
  std::vector<Run> runs;  // at most one per SPU
};

struct PhasePlan {
  std::vector<Phase> phases;

  std::uint64_t elements() const noexcept;
  std::uint64_t groups() const noexcept;
  std::size_t runs() const noexcept;
};

/// Splits the output interior at block and row boundaries. Each piece goes
/// to the SPU whose slice holds its output block under the segment hash; the
/// p-th piece of every SPU forms phase p.
PhasePlan plan_phases(const isa::StencilKernel& kernel, const grid::GridPair& grids,
                      const memory::StencilSegment& segment, std::uint64_t block_bytes, unsigned n_spus);

}  // namespace casper::sim
