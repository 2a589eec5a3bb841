#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "casper/isa/program.hpp"
#include "casper/memory/memory_system.hpp"
#include "casper/sim/config.hpp"
#include "casper/spu/spu.hpp"

namespace casper::sim {

/// Physical address at which stencil segments are allocated.
inline constexpr std::uint64_t kSegmentBase = 0x1'0000'0000ULL;

/// The programmer-visible machine: a sliced LLC with one SPU per slice,
/// driven through the six Casper API calls.
class CasperMachine {
 public:
  /// With `segment_hash` false the segment is still allocated but every
  /// address keeps the line-interleave hash.
  explicit CasperMachine(SimConfig config, bool segment_hash = true);
  ~CasperMachine();
  CasperMachine(const CasperMachine&) = delete;
  CasperMachine& operator=(const CasperMachine&) = delete;

  /// Allocates a block-aligned segment of at least `size` bytes; returns its base.
  std::uint64_t init_stencil_segment(std::uint64_t size);
  /// Broadcasts the program to every SPU.
  void init_stencil_code(const isa::StencilProgram& program);
  /// Writes constant slot `idx` of every SPU.
  void init_constant(double value, unsigned idx);
  void init_stream(std::uint64_t addr, unsigned stream_id, unsigned spu_id);
  void set_n_elements(std::uint64_t n, unsigned spu_id);
  /// Runs every configured SPU to completion and returns the finish cycle.
  /// SPUs without an element count stay idle. Stream and element
  /// configuration is consumed by the run.
  std::uint64_t start_accelerator();

  const SimConfig& config() const noexcept { return config_; }
  bool has_segment() const noexcept { return mem_ != nullptr; }
  const memory::StencilSegment& segment() const;
  memory::MemorySystem& memory();
  spu::Spu& spu(unsigned k);
  unsigned n_spus() const noexcept { return config_.n_spus; }

  std::uint64_t cycle() const noexcept { return cycle_; }
  /// Idles the machine for `cycles` (phase reprogramming).
  void advance(std::uint64_t cycles) noexcept { cycle_ += cycles; }
  void reset_stats();

  void set_access_trace(std::ostream* out);
  void set_pipeline_trace(std::ostream* out);

 private:
  void require_segment(const char* call) const;

  SimConfig config_;
  bool segment_hash_;
  memory::StencilSegment segment_;
  std::unique_ptr<memory::MemorySystem> mem_;
  std::vector<std::unique_ptr<spu::Spu>> spus_;
  std::optional<isa::StencilProgram> program_;
  std::vector<bool> configured_;
  std::uint64_t cycle_ = 0;
  std::ostream* pipeline_trace_ = nullptr;
};

}  // namespace casper::sim
