#include "casper/memory/dram.hpp"

#include <algorithm>

#include "casper/error.hpp"
#include "casper/memory/address_map.hpp"

namespace casper::memory {

Dram::Dram(DramParams params) : params_(params) {
  if (params_.channels == 0) throw ConfigError("DRAM needs at least one channel");
  if (params_.bytes_per_cycle == 0) throw ConfigError("DRAM bandwidth must be positive");
  transfer_cycles_ = (kLineBytes + params_.bytes_per_cycle - 1) / params_.bytes_per_cycle;
  channel_free_.assign(params_.channels, 0);
}

unsigned Dram::channel_of(std::uint64_t addr) const noexcept {
  return static_cast<unsigned>((addr / kLineBytes) % params_.channels);
}

std::uint64_t Dram::reserve(std::uint64_t line_addr, std::uint64_t cycle) {
  auto& free = channel_free_[channel_of(line_addr)];
  const std::uint64_t start = std::max(cycle, free);
  free = start + transfer_cycles_;
  return start;
}

std::uint64_t Dram::read(std::uint64_t line_addr, std::uint64_t cycle) {
  ++reads_;
  return reserve(line_addr, cycle) + params_.latency;
}

std::uint64_t Dram::write(std::uint64_t line_addr, std::uint64_t cycle) {
  ++writes_;
  return reserve(line_addr, cycle) + transfer_cycles_;
}

}  // namespace casper::memory
