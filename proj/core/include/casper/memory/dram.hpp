#pragma once

#include <cstdint>
#include <vector>

namespace casper::memory {

struct DramParams {
  unsigned channels = 4;
  std::uint64_t latency = 200;           // cycles from channel start to data
  std::uint64_t bytes_per_cycle = 32;    // per channel
  std::uint64_t energy_pj = 160'000;     // per 64B read or write
};

/// Fixed-latency DRAM with per-channel bandwidth; channels interleave at line granularity.
class Dram {
 public:
  explicit Dram(DramParams params = {});

  const DramParams& params() const noexcept { return params_; }
  unsigned channel_of(std::uint64_t addr) const noexcept;

  /// Schedules a line read issued at `cycle`; returns the cycle its data arrives.
  std::uint64_t read(std::uint64_t line_addr, std::uint64_t cycle);
  /// Schedules a line writeback; returns the cycle the channel finishes it.
  std::uint64_t write(std::uint64_t line_addr, std::uint64_t cycle);

  std::uint64_t reads() const noexcept { return reads_; }
  std::uint64_t writes() const noexcept { return writes_; }
  void reset_stats() noexcept { reads_ = writes_ = 0; }

 private:
  std::uint64_t reserve(std::uint64_t line_addr, std::uint64_t cycle);

  DramParams params_;
  std::uint64_t transfer_cycles_;
  std::vector<std::uint64_t> channel_free_;
  std::uint64_t reads_ = 0;
  std::uint64_t writes_ = 0;
};

}  // namespace casper::memory
