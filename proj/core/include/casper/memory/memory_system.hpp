#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <ostream>
#include <queue>
#include <vector>

#include "casper/memory/address_map.hpp"
#include "casper/memory/dram.hpp"
#include "casper/memory/noc.hpp"
#include "casper/memory/physical_memory.hpp"
#include "casper/memory/slice.hpp"

namespace casper::memory {

/// Receiver of completions. Completions are delivered when a slice accepts a
/// request and carry the (possibly future) cycle at which they take effect.
class MemClient {
 public:
  virtual ~MemClient() = default;
  /// Lanes of `data` selected by `lane_mask` belong to the request `tag`;
  /// they are usable at `ready_cycle`.
  virtual void on_load(std::uint64_t tag, std::uint64_t ready_cycle, const LineData& data,
                       std::uint8_t lane_mask, bool hit) = 0;
  virtual void on_store_accepted(std::uint64_t tag, std::uint64_t cycle) = 0;
};

struct FabricStats {
  std::uint64_t loads_local = 0;    // slice requests served by the requester's own slice
  std::uint64_t loads_remote = 0;
  std::uint64_t loads_unaligned = 0;  // windows not starting on a line boundary
  std::uint64_t split_loads = 0;      // windows whose two lines live in different slices
  std::uint64_t stores_local = 0;
  std::uint64_t stores_remote = 0;
  std::uint64_t load_completions = 0;
};

/// Sliced LLC, mesh NoC and DRAM behind one request interface. Node k of
/// the mesh hosts slice k and its SPU (or core).
class MemorySystem {
 public:
  MemorySystem(AddressMap map, PhysicalMemory memory, SliceParams slice = {}, NocParams noc = {},
               DramParams dram = {});
  MemorySystem(const MemorySystem&) = delete;
  MemorySystem& operator=(const MemorySystem&) = delete;

  const AddressMap& map() const noexcept { return map_; }
  PhysicalMemory& memory() noexcept { return memory_; }
  const PhysicalMemory& memory() const noexcept { return memory_; }
  LlcSlice& slice(unsigned i) { return *slices_[i]; }
  unsigned n_slices() const noexcept { return static_cast<unsigned>(slices_.size()); }
  MeshNoc& noc() noexcept { return noc_; }
  Dram& dram() noexcept { return dram_; }

  /// 64-byte read starting at any 8-byte aligned address. Returns the number
  /// of slice requests generated (2 when the two lines live in different slices).
  unsigned load_window(unsigned src, std::uint64_t addr, std::uint64_t cycle, MemClient* client,
                       std::uint64_t tag);
  /// Masked store of one line.
  void store_line(unsigned src, std::uint64_t line_addr, const LineData& data, std::uint8_t lane_mask,
                  std::uint64_t cycle, MemClient* client, std::uint64_t tag);
  /// Tag-only line request (no functional data), used by private cache hierarchies.
  void request_line(unsigned src, AccessKind kind, std::uint64_t line_addr, std::uint64_t cycle,
                    MemClient* client, std::uint64_t tag);

  /// Delivers arrivals due by `cycle`, then lets each slice accept at most one request.
  /// Returns the number of requests accepted.
  unsigned tick(std::uint64_t cycle);

  bool idle() const noexcept;
  std::size_t queued() const noexcept;

  const FabricStats& stats() const noexcept { return stats_; }
  std::uint64_t llc_hits() const;
  std::uint64_t llc_misses() const;
  void reset_stats();

  /// Line-delimited access trace: cycle requester slice addr kind hit|miss.
  void set_trace(std::ostream* out) noexcept { trace_ = out; }

 private:
  struct Request {
    AccessKind kind = AccessKind::AlignedLoad;
    std::uint64_t line_addr = 0;
    isa::ShiftDir dir = isa::ShiftDir::Forward;
    std::uint8_t amt = 0;
    std::uint64_t window = 0;     // window start for loads carrying data
    bool functional = true;       // false for tag-only requests
    unsigned src = 0;
    unsigned slice = 0;
    MemClient* client = nullptr;
    std::uint64_t tag = 0;
    LineData store_data{};
    std::uint8_t store_mask = 0;
  };
  struct Arrival {
    std::uint64_t cycle;
    std::uint64_t seq;
    Request req;
    bool operator>(const Arrival& o) const noexcept { return cycle != o.cycle ? cycle > o.cycle : seq > o.seq; }
  };

  void route(Request req, std::uint64_t cycle, std::uint64_t payload_bytes);
  void complete(const Request& req, const SliceResponse& resp, std::uint64_t cycle);

  AddressMap map_;
  PhysicalMemory memory_;
  Dram dram_;
  MeshNoc noc_;
  std::vector<std::unique_ptr<LlcSlice>> slices_;
  std::vector<std::deque<Request>> queues_;
  std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> in_flight_;
  std::uint64_t seq_ = 0;
  FabricStats stats_;
  std::ostream* trace_ = nullptr;
};

/// Mesh dimensions for a slice count (square-ish factorization).
NocParams mesh_for(unsigned n_slices, NocParams base = {});

}  // namespace casper::memory
