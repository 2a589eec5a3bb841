#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace casper::sim {

inline constexpr int kSchemaVersion = 1;

/// Energy in picojoules, kept as integers so totals recompute exactly.
struct EnergyBreakdown {
  std::uint64_t compute_pj = 0;  // SPU or core instructions
  std::uint64_t l1_pj = 0;
  std::uint64_t l2_pj = 0;
  std::uint64_t llc_pj = 0;
  std::uint64_t dram_pj = 0;
  std::uint64_t noc_pj = 0;

  std::uint64_t total_pj() const noexcept { return compute_pj + l1_pj + l2_pj + llc_pj + dram_pj + noc_pj; }
  bool operator==(const EnergyBreakdown&) const = default;
};

struct Report {
  std::string kernel;
  std::string size_class;  // l2, l3, dram or "custom"
  std::string extents;     // contiguous dimension first
  std::string mode;        // casper or baseline
  std::string mapping;     // segment or interleave
  std::uint64_t seed = 0;
  unsigned timesteps = 0;  // functional steps applied (warm-up + measured)

  std::uint64_t cycles = 0;
  double seconds = 0.0;
  std::uint64_t committed_instructions = 0;
  std::uint64_t loads_issued = 0;      // slice requests (casper) or L1 accesses (baseline)
  std::uint64_t load_completions = 0;
  std::uint64_t loads_local = 0;
  std::uint64_t loads_remote = 0;
  std::uint64_t loads_unaligned = 0;
  std::uint64_t stores = 0;
  std::uint64_t llc_accesses = 0;
  std::uint64_t llc_hits = 0;
  std::uint64_t llc_misses = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t dram_reads = 0;
  std::uint64_t dram_writes = 0;
  std::uint64_t noc_flits = 0;
  std::uint64_t noc_remote_units = 0;  // 64B units of remote requests and responses
  EnergyBreakdown energy;
  std::uint64_t output_checksum = 0;
  std::string config_digest;

  double local_fraction() const noexcept {
    const auto n = loads_local + loads_remote;
    return n == 0 ? 0.0 : static_cast<double>(loads_local) / static_cast<double>(n);
  }
  double ipc() const noexcept;
  bool operator==(const Report&) const = default;
};

/// Pretty-printed JSON with a fixed key order.
std::string to_json(const Report& r);
/// JSON array of reports.
std::string to_json(const std::vector<Report>& reports);
Report report_from_json(const std::string& text);

/// Header line matching csv_row(); the first column is the schema version.
std::string csv_header();
/// One CSV line; `status` is "ok" or a short failure reason.
std::string csv_row(const Report& r, const std::string& status = "ok");

struct Comparison {
  double speedup = 0.0;       // baseline cycles / casper cycles
  double energy_ratio = 0.0;  // casper energy / baseline energy
  std::map<std::string, std::int64_t> deltas;  // casper minus baseline, per counter
};

/// Throws ConfigError when the reports describe different workloads.
Comparison compare(const Report& casper, const Report& baseline);

/// Human readable one-paragraph summary.
void print_summary(std::ostream& out, const Report& r);

}  // namespace casper::sim
