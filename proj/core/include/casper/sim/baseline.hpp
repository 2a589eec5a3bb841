#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "casper/grid/grid.hpp"
#include "casper/isa/kernel.hpp"
#include "casper/memory/memory_system.hpp"
#include "casper/sim/config.hpp"
#include "casper/sim/planner.hpp"

namespace casper::sim {

struct CoreStats {
  std::uint64_t instructions = 0;
  std::uint64_t groups = 0;
  std::uint64_t load_accesses = 0;  // L1 line accesses made by vector loads
  std::uint64_t load_completions = 0;
  std::uint64_t stores = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t prefetches = 0;
  std::uint64_t writebacks = 0;        // dirty lines sent to the LLC
  std::uint64_t coherence_transfers = 0;
  std::uint64_t invalidations = 0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t finish_cycle = 0;

  CoreStats& operator+=(const CoreStats& o);
};

/// Contiguous output stretch handled by one core.
struct CoreTask {
  std::size_t out_linear = 0;
  std::uint64_t n_elements = 0;
};

/// Static contiguous partition of the output interior over `cores`. Rows
/// are dealt out in order; when there are fewer rows than cores, rows are
/// cut at cache-line boundaries of the output.
std::vector<std::vector<CoreTask>> partition_rows(const isa::StencilKernel& kernel, const grid::Grid& output,
                                                  unsigned cores);

class Core;

/// Simplified multi-core baseline: in-order vector cores with non-blocking
/// loads (bounded by L1/L2 MSHRs), private L1/L2 with next-line prefetchers,
/// a directory keeping private copies coherent, and the shared sliced LLC.
/// Core k sits on mesh node k.
class BaselineSystem {
 public:
  BaselineSystem(const SimConfig& config, memory::MemorySystem& mem);
  ~BaselineSystem();
  BaselineSystem(const BaselineSystem&) = delete;
  BaselineSystem& operator=(const BaselineSystem&) = delete;

  /// One timestep from `input` to `output` (both resident in memory()).
  /// Returns the cycle at which the last core finished.
  std::uint64_t run_step(const isa::StencilKernel& kernel, const grid::Grid& input, const grid::Grid& output);

  std::uint64_t cycle() const noexcept { return cycle_; }
  CoreStats stats() const;
  void reset_stats();
  memory::MemorySystem& memory() noexcept { return *mem_; }
  unsigned cores() const noexcept { return static_cast<unsigned>(cores_.size()); }

 private:
  friend class Core;
  struct DirEntry {
    std::uint32_t sharers = 0;
    int owner = -1;  // core holding the line dirty, or -1
  };

  void on_llc_evict(std::uint64_t line);

  const SimConfig& config_;
  memory::MemorySystem* mem_;
  std::vector<std::unique_ptr<Core>> cores_;
  std::unordered_map<std::uint64_t, DirEntry> directory_;
  std::uint64_t cycle_ = 0;
};

}  // namespace casper::sim
