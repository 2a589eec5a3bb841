#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "casper/isa/instruction.hpp"
#include "casper/memory/address_map.hpp"
#include "casper/memory/dram.hpp"
#include "casper/memory/tag_array.hpp"

namespace casper::memory {

struct SliceParams {
  std::uint64_t capacity_bytes = 2 * 1024 * 1024;
  unsigned associativity = 16;
  unsigned mshrs = 32;
  std::uint64_t hit_latency = 8;  // load-to-use for a requester on the same node
  std::uint64_t hit_energy_pj = 945;
  std::uint64_t miss_energy_pj = 1904;

  std::size_t sets() const noexcept {
    return static_cast<std::size_t>(capacity_bytes / kLineBytes / associativity);
  }
};

enum class AccessKind : std::uint8_t { AlignedLoad, UnalignedLoad, Store };

const char* to_string(AccessKind kind) noexcept;

struct SliceRequest {
  AccessKind kind = AccessKind::AlignedLoad;
  std::uint64_t line_addr = 0;
  isa::ShiftDir dir = isa::ShiftDir::Forward;  // UnalignedLoad only
  std::uint8_t amt = 0;                        // UnalignedLoad only
};

struct SliceResponse {
  bool accepted = false;
  bool hit = false;
  /// Loads: cycle the data leaves the slice. Stores: the acceptance cycle.
  std::uint64_t ready_cycle = 0;
  /// Earliest cycle worth retrying a rejected request.
  std::uint64_t retry_cycle = 0;
  unsigned dram_reads = 0;
  unsigned dram_writes = 0;
};

struct SliceStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t loads = 0;
  std::uint64_t unaligned_loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t rejections = 0;
};

/// One LLC slice: tags, LRU, MSHRs, a single load/store port and the
/// unaligned-load extension (a second tag port, so both lines are looked up
/// in the same cycle and a resident pair costs exactly one aligned access).
class LlcSlice {
 public:
  LlcSlice(unsigned id, SliceParams params, const AddressMap& map, Dram& dram);

  unsigned id() const noexcept { return id_; }
  const SliceParams& params() const noexcept { return params_; }

  SliceResponse access(const SliceRequest& req, std::uint64_t cycle);

  /// True when the line is resident and its fill has landed by `cycle`.
  bool resident(std::uint64_t line_addr, std::uint64_t cycle);
  unsigned mshrs_in_use(std::uint64_t cycle);

  /// Called with (line, dirty) when a valid line is evicted.
  void set_evict_hook(std::function<void(std::uint64_t, bool)> hook) { evict_hook_ = std::move(hook); }

  const SliceStats& stats() const noexcept { return stats_; }
  void reset_stats() noexcept { stats_ = {}; }

 private:
  std::size_t set_of(std::uint64_t line_addr) const noexcept {
    return static_cast<std::size_t>(map_->slice_local_line(line_addr) % tags_.sets());
  }
  void purge_mshrs(std::uint64_t cycle);

  unsigned id_;
  SliceParams params_;
  const AddressMap* map_;
  Dram* dram_;
  TagArray tags_;
  std::vector<std::uint64_t> mshr_fill_;  // fill cycle of each outstanding miss
  std::uint64_t last_accept_ = kNever;
  SliceStats stats_;
  std::function<void(std::uint64_t, bool)> evict_hook_;
};

}  // namespace casper::memory
