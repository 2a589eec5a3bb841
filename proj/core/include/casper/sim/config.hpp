#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "casper/memory/address_map.hpp"
#include "casper/memory/dram.hpp"
#include "casper/memory/noc.hpp"
#include "casper/memory/slice.hpp"
#include "casper/spu/spu.hpp"

namespace casper::sim {

/// One private cache level of a baseline core.
struct CacheLevelParams {
  std::uint64_t capacity_bytes = 0;
  unsigned associativity = 8;
  std::uint64_t latency = 4;  // round trip, cycles
  unsigned mshrs = 16;
  std::uint64_t hit_energy_pj = 0;
  std::uint64_t miss_energy_pj = 0;
  unsigned load_ports = 1;
  unsigned store_ports = 1;
};

/// Simplified multi-core baseline: in-order vector cores.
struct BaselineParams {
  unsigned cores = 16;
  unsigned issue_width = 8;
  std::uint64_t fma_latency = 1;  // back-to-back accumulation, as in the SPU
  std::uint64_t instruction_energy_pj = 80;
  std::uint64_t l3_extra_latency = 4;  // core-side LLC access overhead over an SPU's
  bool prefetch = true;
  unsigned prefetch_degree = 4;
  CacheLevelParams l1{32 * 1024, 8, 4, 16, 15, 33, 2, 1};
  CacheLevelParams l2{256 * 1024, 8, 12, 16, 46, 93, 1, 1};
};

struct SimConfig {
  unsigned n_spus = memory::kDefaultSlices;
  std::uint64_t block_bytes = memory::kDefaultBlockBytes;
  double clock_hz = 2.0e9;
  std::uint64_t phase_reprogram_cycles = 0;
  unsigned warmup = 2;
  std::uint64_t seed = 1;
  std::uint64_t deadlock_cycles = 1'000'000;

  memory::SliceParams slice;
  memory::NocParams noc;
  memory::DramParams dram;
  spu::SpuParams spu;
  BaselineParams baseline;

  /// Throws ConfigError when values are inconsistent.
  void validate() const;
  /// Canonical INI text with every key, in a fixed order.
  std::string to_ini() const;
  /// FNV-1a of to_ini(), as 16 hex digits.
  std::string digest() const;
};

/// `[section]` headers and `key = value` lines; `#` and `;` start comments.
/// Keys absent from the text keep their defaults. Unknown sections or keys
/// and malformed values throw ConfigError naming the line.
SimConfig parse_config(std::istream& in, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path);

}  // namespace casper::sim
