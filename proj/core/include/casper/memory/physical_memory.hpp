#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "casper/isa/instruction.hpp"
#include "casper/memory/address_map.hpp"

namespace casper::memory {

using LineData = std::array<double, kLanes>;
using LineBytes = std::array<std::byte, kLineBytes>;

/// Functional backing store for the simulated physical space. Timing models
/// only track tags; all data lives here.
class PhysicalMemory {
 public:
  PhysicalMemory() = default;
  PhysicalMemory(std::uint64_t base, std::uint64_t size);

  std::uint64_t base() const noexcept { return base_; }
  std::uint64_t size() const noexcept { return words_.size() * kElementBytes; }
  std::uint64_t end() const noexcept { return base_ + size(); }
  bool contains(std::uint64_t addr, std::uint64_t bytes) const noexcept {
    return addr >= base_ && addr <= end() && bytes <= end() - addr;
  }

  /// 64 bytes starting at any 8-byte aligned address.
  LineData read_window(std::uint64_t addr) const;
  /// Writes the lanes of `data` selected by `lane_mask` into the line at `line_addr`.
  void write_line(std::uint64_t line_addr, const LineData& data, std::uint8_t lane_mask);

  double load(std::uint64_t addr) const;
  void store(std::uint64_t addr, double value);
  void write_block(std::uint64_t addr, std::span<const double> values);
  void read_block(std::uint64_t addr, std::span<double> out) const;

 private:
  std::size_t word_index(std::uint64_t addr, std::uint64_t bytes) const;

  std::uint64_t base_ = 0;
  std::vector<double> words_;
};

/// Unaligned read: the 64 bytes at line_addr shifted by amt elements in `dir`.
LineBytes unaligned_read_bytes(const PhysicalMemory& mem, std::uint64_t line_addr, isa::ShiftDir dir,
                               unsigned amt);

/// Effective start address of a shifted window.
std::uint64_t shifted_address(std::uint64_t line_addr, isa::ShiftDir dir, unsigned amt);

LineBytes to_bytes(const LineData& data) noexcept;

}  // namespace casper::memory
