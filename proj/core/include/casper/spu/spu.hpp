#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <ostream>
#include <span>

#include "casper/isa/program.hpp"
#include "casper/memory/memory_system.hpp"

namespace casper::spu {

/// Consecutive same-typed elements walked 64 bytes at a time.
struct StreamDescriptor {
  std::uint64_t start_addr = 0;
  std::uint32_t elem_width = 8;
  std::uint64_t n_elements = 0;
  std::uint64_t position = 0;  // bytes from the line-aligned start, multiple of 64
  bool configured = false;

  void advance() noexcept { position += memory::kLineBytes; }
};

struct SpuParams {
  unsigned load_queue_entries = 10;
  std::uint64_t instruction_energy_pj = 16;
};

struct SpuStats {
  std::uint64_t committed = 0;
  std::uint64_t loads_issued = 0;      // 64-byte windows
  std::uint64_t load_requests = 0;     // slice requests those windows became
  std::uint64_t load_completions = 0;  // completions received
  std::uint64_t stores = 0;
  std::uint64_t stall_cycles = 0;  // active cycles without a commit
  std::uint64_t active_cycles = 0;
  std::uint64_t finish_cycle = 0;
  std::uint64_t max_occupancy = 0;
  std::uint64_t order_violations = 0;  // commits that did not follow issue order (must stay 0)
};

/// Cycle-level Stencil Processing Unit: one instruction issued and one
/// committed per cycle, a load queue that commits strictly in issue order,
/// and an 8-lane double-precision accumulator.
///
/// Streams advance in 64-byte steps from the cache line holding their start
/// address. The output stream's offset inside that line (the lead) masks the
/// leading lanes of the first group; the element count masks the tail.
class Spu final : public memory::MemClient {
 public:
  Spu(unsigned id, memory::MemorySystem& mem, SpuParams params = {});

  unsigned id() const noexcept { return id_; }

  void load_program(const isa::StencilProgram& program);
  void set_constant(unsigned idx, double value);
  void set_stream(unsigned idx, std::uint64_t start_addr);
  void set_n_elements(std::uint64_t n);
  /// Arms the unit for the configured run. Throws ConfigError on missing configuration.
  void start(std::uint64_t cycle);

  bool active() const noexcept { return active_; }
  bool done() const noexcept { return !active_ || finished_; }

  /// Pipeline stages for one cycle. Return true when they made progress.
  bool commit(std::uint64_t cycle);
  bool issue(std::uint64_t cycle);

  std::size_t occupancy() const noexcept { return lq_.size() + pending_stores_; }
  std::uint64_t groups() const noexcept { return groups_; }
  std::uint8_t group_mask(std::uint64_t group) const noexcept;
  const memory::LineData& accumulator() const noexcept { return acc_; }
  std::span<const StreamDescriptor> streams() const noexcept { return streams_; }
  std::span<const double> constants() const noexcept { return constants_; }
  const SpuStats& stats() const noexcept { return stats_; }
  std::uint64_t energy_pj() const noexcept { return stats_.committed * params_.instruction_energy_pj; }
  void reset_stats() noexcept { stats_ = {}; }
  /// Drops stream and element configuration, keeping program and constants.
  void clear_run();

  /// Pipeline trace: cycle spu event pc positions.
  void set_trace(std::ostream* out) noexcept { trace_ = out; }

  void on_load(std::uint64_t tag, std::uint64_t ready_cycle, const memory::LineData& data, std::uint8_t lane_mask,
               bool hit) override;
  void on_store_accepted(std::uint64_t tag, std::uint64_t cycle) override;

 private:
  struct Entry {
    std::uint64_t seq = 0;
    std::uint64_t issue_cycle = 0;
    std::uint64_t ready = 0;
    std::uint8_t pc = 0;
    std::uint8_t parts_pending = 0;
    std::uint8_t lanes = 0;
    memory::LineData data{};
  };

  std::uint64_t aligned_base(unsigned stream) const noexcept {
    return streams_[stream].start_addr - lead_ * memory::kElementBytes;
  }
  void trace(std::uint64_t cycle, const char* event, unsigned pc);

  unsigned id_;
  memory::MemorySystem* mem_;
  SpuParams params_;
  isa::StencilProgram program_;
  bool has_program_ = false;
  std::array<double, isa::kConstantSlots> constants_{};
  std::array<StreamDescriptor, isa::kStreamSlots> streams_{};
  std::array<std::uint64_t, isa::kStreamSlots> issue_pos_{};
  std::uint64_t n_elements_ = 0;
  bool n_set_ = false;

  std::uint64_t lead_ = 0;
  std::uint64_t groups_ = 0;
  std::uint64_t issue_groups_left_ = 0;
  std::uint64_t commit_group_ = 0;
  unsigned pc_ = 0;
  std::deque<Entry> lq_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t last_committed_seq_ = 0;
  bool any_committed_ = false;
  std::size_t pending_stores_ = 0;
  memory::LineData acc_{};
  bool active_ = false;
  bool finished_ = false;

  SpuStats stats_;
  std::ostream* trace_ = nullptr;
};

}  // namespace casper::spu
