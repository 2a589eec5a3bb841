#include "casper/sim/experiment.hpp"

#include <array>
#include <cstring>

#include "casper/error.hpp"
#include "casper/grid/golden.hpp"
#include "casper/grid/placement.hpp"
#include "casper/isa/program.hpp"
#include "casper/sim/api.hpp"
#include "casper/sim/baseline.hpp"
#include "casper/sim/planner.hpp"

namespace casper::sim {

namespace {

struct Setup {
  unsigned warmup;
  std::uint64_t seed;
  grid::Grid init;
};

Setup prepare(const Workload& w, const SimConfig& config, const RunOptions& o) {
  isa::check_kernel(w.kernel);
  grid::check_extents(w.kernel, w.extents);
  Setup s{o.warmup.value_or(config.warmup), o.seed.value_or(config.seed), grid::Grid(w.extents)};
  grid::fill_random(s.init, s.seed);
  return s;
}

Report blank_report(const Workload& w, const SimConfig& config, const Setup& s, const char* mode,
                    bool segment_hash) {
  Report r;
  r.kernel = w.kernel.name;
  r.size_class = w.size_class;
  r.extents = grid::format_extents(w.extents);
  r.mode = mode;
  r.mapping = segment_hash ? "segment" : "interleave";
  r.seed = s.seed;
  r.timesteps = s.warmup + 1;
  r.config_digest = config.digest();
  return r;
}

void load_grids(memory::PhysicalMemory& mem, const grid::GridPair& pair, const grid::Grid& init) {
  mem.write_block(pair.input.base_addr(), init.data());
  // The output starts as a copy so boundary points carry over.
  mem.write_block(pair.output.base_addr(), init.data());
}

grid::Grid read_result(const memory::PhysicalMemory& mem, const grid::Grid& where) {
  grid::Grid g(where.extents(), where.base_addr());
  mem.read_block(where.base_addr(), g.data());
  return g;
}

void verify(const Workload& w, const Setup& s, const grid::Grid& result, const char* mode) {
  const grid::Grid expect = grid::golden_run(w.kernel, s.init, static_cast<int>(s.warmup + 1));
  const std::size_t i = grid::first_difference(expect, result);
  if (i != expect.size()) {
    throw FunctionalMismatch(std::string(mode) + " result differs from the golden executor at index " +
                                 std::to_string(i),
                             i, expect[i], result[i]);
  }
}

void fill_memory_counters(Report& r, memory::MemorySystem& mem, const SimConfig& config) {
  const auto& f = mem.stats();
  r.loads_local = f.loads_local;
  r.loads_remote = f.loads_remote;
  r.loads_unaligned = f.loads_unaligned;
  r.llc_hits = mem.llc_hits();
  r.llc_misses = mem.llc_misses();
  for (unsigned s = 0; s < mem.n_slices(); ++s) {
    r.llc_accesses += mem.slice(s).stats().loads + mem.slice(s).stats().stores;
  }
  r.dram_reads = mem.dram().reads();
  r.dram_writes = mem.dram().writes();
  r.noc_flits = mem.noc().flits();
  r.noc_remote_units = 2 * f.loads_remote + f.stores_remote;
  r.energy.llc_pj = r.llc_hits * config.slice.hit_energy_pj + r.llc_misses * config.slice.miss_energy_pj;
  r.energy.dram_pj = (r.dram_reads + r.dram_writes) * config.dram.energy_pj;
  r.energy.noc_pj = mem.noc().flit_hops() * config.noc.flit_hop_energy_pj;
  r.seconds = static_cast<double>(r.cycles) / config.clock_hz;
}

}  // namespace

Workload make_workload(const std::string& kernel, grid::SizeClass size) {
  auto k = grid::find_kernel(kernel);
  if (!k) throw ConfigError("unknown kernel '" + kernel + "'");
  return Workload{*k, grid::domain_extents(k->dims, size), grid::to_string(size)};
}

Workload make_workload(const std::string& kernel, const grid::Extents& extents) {
  auto k = grid::find_kernel(kernel);
  if (!k) throw ConfigError("unknown kernel '" + kernel + "'");
  if (extents.dims != k->dims) {
    throw DimensionError("kernel '" + kernel + "' is " + std::to_string(k->dims) + "-dimensional but extents have " +
                         std::to_string(extents.dims) + " dimensions");
  }
  return Workload{*k, extents, "custom"};
}

Report run_casper(const Workload& w, const SimConfig& config, const RunOptions& o) {
  const Setup s = prepare(w, config, o);
  const auto program = isa::build_program(w.kernel);

  CasperMachine m(config, o.segment_hash);
  const memory::AddressMap layout(config.n_spus, config.block_bytes);
  m.init_stencil_segment(grid::required_segment_bytes(w.extents, layout));
  const auto pair = grid::place_grids(w.kernel, w.extents, m.segment(), layout);
  load_grids(m.memory().memory(), pair, s.init);

  m.init_stencil_code(program);
  for (unsigned i = 0; i < program.constants.size(); ++i) m.init_constant(program.constants[i], i);
  if (o.corrupt_constant) m.init_constant(o.corrupt_constant->second, o.corrupt_constant->first);

  const std::array<grid::Grid, 2> g{pair.input, pair.output};
  const std::array<PhasePlan, 2> plans{
      plan_phases(w.kernel, {g[0], g[1]}, m.segment(), config.block_bytes, config.n_spus),
      plan_phases(w.kernel, {g[1], g[0]}, m.segment(), config.block_bytes, config.n_spus)};

  const unsigned steps = s.warmup + 1;
  std::uint64_t start = 0;
  for (unsigned t = 0; t < steps; ++t) {
    if (t == s.warmup) {
      m.reset_stats();
      m.set_access_trace(o.access_trace);
      m.set_pipeline_trace(o.pipeline_trace);
      start = m.cycle();
    }
    bool first = true;
    for (const auto& phase : plans[t % 2].phases) {
      if (!first) m.advance(config.phase_reprogram_cycles);
      first = false;
      for (const auto& run : phase.runs) {
        for (unsigned st = 0; st < run.in_addrs.size(); ++st) m.init_stream(run.in_addrs[st], st, run.spu);
        m.init_stream(run.out_addr, program.output_stream_idx, run.spu);
        m.set_n_elements(run.n_elements, run.spu);
      }
      m.start_accelerator();
    }
  }
  m.set_access_trace(nullptr);
  m.set_pipeline_trace(nullptr);

  const grid::Grid result = read_result(m.memory().memory(), g[steps % 2]);
  if (o.verify) verify(w, s, result, "casper");

  Report r = blank_report(w, config, s, "casper", o.segment_hash);
  r.cycles = m.cycle() - start;
  for (unsigned k = 0; k < m.n_spus(); ++k) {
    const auto& st = m.spu(k).stats();
    r.committed_instructions += st.committed;
    r.loads_issued += st.load_requests;
    r.load_completions += st.load_completions;
    r.stores += st.stores;
    r.energy.compute_pj += m.spu(k).energy_pj();
  }
  fill_memory_counters(r, m.memory(), config);
  r.output_checksum = grid::checksum(result);
  return r;
}

Report run_baseline(const Workload& w, const SimConfig& config, const RunOptions& o) {
  config.validate();
  const Setup s = prepare(w, config, o);
  const memory::AddressMap map(config.n_spus, config.block_bytes);
  const memory::StencilSegment region{kSegmentBase,
                                      memory::round_up(grid::required_segment_bytes(w.extents, map),
                                                       config.block_bytes)};
  memory::MemorySystem mem(map, memory::PhysicalMemory(region.base, region.size), config.slice, config.noc,
                           config.dram);
  const auto pair = grid::place_grids(w.kernel, w.extents, region, map);
  load_grids(mem.memory(), pair, s.init);
  const std::array<grid::Grid, 2> g{pair.input, pair.output};

  BaselineSystem sys(config, mem);
  const unsigned steps = s.warmup + 1;
  std::uint64_t start = 0;
  for (unsigned t = 0; t < steps; ++t) {
    if (t == s.warmup) {
      sys.reset_stats();
      mem.set_trace(o.access_trace);
      start = sys.cycle();
    }
    sys.run_step(w.kernel, g[t % 2], g[(t + 1) % 2]);
  }
  mem.set_trace(nullptr);

  const grid::Grid result = read_result(mem.memory(), g[steps % 2]);
  if (o.verify) verify(w, s, result, "baseline");

  Report r = blank_report(w, config, s, "baseline", false);
  r.cycles = sys.cycle() - start;
  const CoreStats st = sys.stats();
  const auto& bp = config.baseline;
  r.committed_instructions = st.instructions;
  r.loads_issued = st.load_accesses;
  r.load_completions = st.load_completions;
  r.stores = st.stores;
  r.l1_hits = st.l1_hits;
  r.l1_misses = st.l1_misses;
  r.l2_hits = st.l2_hits;
  r.l2_misses = st.l2_misses;
  fill_memory_counters(r, mem, config);
  r.energy.compute_pj = st.instructions * bp.instruction_energy_pj;
  r.energy.l1_pj = st.l1_hits * bp.l1.hit_energy_pj + st.l1_misses * bp.l1.miss_energy_pj;
  r.energy.l2_pj = st.l2_hits * bp.l2.hit_energy_pj + st.l2_misses * bp.l2.miss_energy_pj;
  r.output_checksum = grid::checksum(result);
  return r;
}

Ablation ablate_mapping(const Workload& w, const SimConfig& config, const RunOptions& options) {
  Ablation a;
  RunOptions o = options;
  o.segment_hash = false;
  a.interleave = run_casper(w, config, o);
  o.segment_hash = true;
  a.segment = run_casper(w, config, o);
  a.baseline = run_baseline(w, config, options);
  const auto seg = static_cast<double>(a.segment.cycles);
  a.speedup_mapping_only = static_cast<double>(a.interleave.cycles) / seg;
  a.speedup_full = static_cast<double>(a.baseline.cycles) / seg;
  return a;
}

}  // namespace casper::sim
