#include "casper/sim/planner.hpp"

#include "casper/error.hpp"
#include "casper/grid/golden.hpp"
#include "casper/isa/program.hpp"

namespace casper::sim {

std::vector<RowSpan> interior_rows(const isa::StencilKernel& kernel, const grid::Extents& e) {
  grid::check_extents(kernel, e);
  std::array<std::size_t, 3> r{0, 0, 0};
  for (int d = 0; d < e.dims; ++d) r[static_cast<std::size_t>(d)] = static_cast<std::size_t>(kernel.radius(d));

  std::vector<RowSpan> rows;
  const auto inner = static_cast<std::size_t>(e.dims - 1);
  const std::size_t n = e.n[inner] - 2 * r[inner];
  if (e.dims == 1) {
    rows.push_back({r[0], n});
  } else if (e.dims == 2) {
    for (std::size_t j = r[0]; j < e.n[0] - r[0]; ++j) rows.push_back({j * e.n[1] + r[1], n});
  } else {
    for (std::size_t k = r[0]; k < e.n[0] - r[0]; ++k) {
      for (std::size_t j = r[1]; j < e.n[1] - r[1]; ++j) rows.push_back({(k * e.n[1] + j) * e.n[2] + r[2], n});
    }
  }
  return rows;
}

std::uint64_t PhasePlan::elements() const noexcept {
  std::uint64_t n = 0;
  for (const auto& p : phases) {
    for (const auto& r : p.runs) n += r.n_elements;
  }
  return n;
}

std::uint64_t PhasePlan::groups() const noexcept {
  std::uint64_t n = 0;
  for (const auto& p : phases) {
    for (const auto& r : p.runs) n += r.groups();
  }
  return n;
}

std::size_t PhasePlan::runs() const noexcept {
  std::size_t n = 0;
  for (const auto& p : phases) n += p.runs.size();
  return n;
}

PhasePlan plan_phases(const isa::StencilKernel& kernel, const grid::GridPair& grids,
                      const memory::StencilSegment& segment, std::uint64_t block_bytes, unsigned n_spus) {
  if (kernel.inner_radius() > static_cast<int>(isa::kMaxShift)) {
    throw DimensionError("kernel '" + kernel.name + "' needs shifts beyond 7 elements");
  }
  const auto& in = grids.input;
  const auto& out = grids.output;
  if (in.extents() != out.extents()) throw DimensionError("input and output extents differ");
  const auto& e = out.extents();

  // Byte displacement of each input stream from the output point it feeds.
  std::vector<std::int64_t> displacement;
  for (const auto& o : isa::input_stream_offsets(kernel)) {
    std::int64_t elems = 0;
    for (int d = 0; d < e.dims; ++d) {
      elems += static_cast<std::int64_t>(o[static_cast<std::size_t>(d)]) * static_cast<std::int64_t>(e.stride(d));
    }
    displacement.push_back(elems * static_cast<std::int64_t>(memory::kElementBytes));
  }

  std::vector<std::vector<Run>> per_spu(n_spus);
  for (const auto& row : interior_rows(kernel, e)) {
    std::size_t linear = row.start;
    std::size_t left = row.n;
    while (left > 0) {
      const std::uint64_t addr = out.address_of(linear);
      if (!segment.contains(addr)) throw SegmentOverflow("output grid lies outside the stencil segment");
      const std::uint64_t block = (addr - segment.base) / block_bytes;
      const std::uint64_t block_end = segment.base + (block + 1) * block_bytes;
      const std::size_t take = std::min<std::size_t>(left, (block_end - addr) / memory::kElementBytes);

      Run run;
      run.spu = static_cast<unsigned>(block % n_spus);
      run.out_linear = linear;
      run.n_elements = take;
      run.out_addr = addr;
      for (const auto disp : displacement) {
        run.in_addrs.push_back(static_cast<std::uint64_t>(static_cast<std::int64_t>(in.address_of(linear)) + disp));
      }
      per_spu[run.spu].push_back(std::move(run));
      linear += take;
      left -= take;
    }
  }

  PhasePlan plan;
  std::size_t depth = 0;
  for (const auto& runs : per_spu) depth = std::max(depth, runs.size());
  plan.phases.resize(depth);
  for (auto& runs : per_spu) {
    for (std::size_t p = 0; p < runs.size(); ++p) plan.phases[p].runs.push_back(std::move(runs[p]));
  }
  return plan;
}

}  // namespace casper::sim
