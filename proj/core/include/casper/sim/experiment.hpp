#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "casper/grid/catalog.hpp"
#include "casper/grid/grid.hpp"
#include "casper/isa/kernel.hpp"
#include "casper/sim/config.hpp"
#include "casper/sim/report.hpp"

namespace casper::sim {

struct Workload {
  isa::StencilKernel kernel;
  grid::Extents extents;
  std::string size_class = "custom";
};

/// Throws ConfigError for unknown kernels and DimensionError for extents of the wrong rank.
Workload make_workload(const std::string& kernel, grid::SizeClass size);
Workload make_workload(const std::string& kernel, const grid::Extents& extents);

struct RunOptions {
  std::optional<unsigned> warmup;      // untimed timesteps; config value when unset
  std::optional<std::uint64_t> seed;   // config value when unset
  bool segment_hash = true;
  bool verify = true;                  // compare with the golden executor
  std::ostream* access_trace = nullptr;    // measured timestep only
  std::ostream* pipeline_trace = nullptr;  // measured timestep only
  /// Test hook: overwrite constant slot `first` with `second` after programming.
  std::optional<std::pair<unsigned, double>> corrupt_constant;
};

/// Runs warm-up timesteps, then measures one timestep on the Casper machine.
/// Throws FunctionalMismatch when the result differs from the golden executor.
Report run_casper(const Workload& w, const SimConfig& config, const RunOptions& options = {});

/// Same protocol on the multi-core baseline.
Report run_baseline(const Workload& w, const SimConfig& config, const RunOptions& options = {});

struct Ablation {
  Report interleave;  // SPUs near the slices, default line-interleave hash
  Report segment;     // SPUs near the slices, stencil-segment hash
  Report baseline;
  double speedup_mapping_only = 0.0;  // interleave cycles / segment cycles
  double speedup_full = 0.0;          // baseline cycles / segment cycles
};

Ablation ablate_mapping(const Workload& w, const SimConfig& config, const RunOptions& options = {});

}  // namespace casper::sim
