#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "casper/error.hpp"
#include "casper/grid/catalog.hpp"
#include "casper/grid/placement.hpp"
#include "casper/sim/api.hpp"
#include "casper/sim/baseline.hpp"
#include "casper/sim/experiment.hpp"
#include "casper/sim/planner.hpp"

using namespace casper;
using namespace casper::sim;

namespace {

struct Planned {
  memory::StencilSegment seg;
  grid::GridPair grids;
  PhasePlan plan;
};

Planned plan_for(const isa::StencilKernel& k, const grid::Extents& e) {
  const memory::AddressMap probe(16, memory::kDefaultBlockBytes);
  const memory::StencilSegment seg{kSegmentBase, grid::required_segment_bytes(e, probe)};
  const memory::AddressMap map(16, memory::kDefaultBlockBytes, seg);
  auto grids = grid::place_grids(k, e, seg, map);
  auto plan = plan_phases(k, grids, seg, memory::kDefaultBlockBytes, 16);
  return {seg, std::move(grids), std::move(plan)};
}

std::uint64_t recompute_energy(const Report& r, const SimConfig& c) {
  const auto& b = c.baseline;
  const bool spu = r.mode == "casper";
  std::uint64_t e = r.committed_instructions * (spu ? c.spu.instruction_energy_pj : b.instruction_energy_pj);
  e += r.l1_hits * b.l1.hit_energy_pj + r.l1_misses * b.l1.miss_energy_pj;
  e += r.l2_hits * b.l2.hit_energy_pj + r.l2_misses * b.l2.miss_energy_pj;
  e += r.llc_hits * c.slice.hit_energy_pj + r.llc_misses * c.slice.miss_energy_pj;
  e += (r.dram_reads + r.dram_writes) * c.dram.energy_pj;
  return e;  // flit-hop energy is zero by default
}

}  // namespace

TEST(Planner, Jacobi1dMegaElement) {
  const auto p = plan_for(grid::jacobi1d(), grid::make_extents({1048576}));
  // 128kB blocks hold 16384 doubles
  const std::uint64_t blocks = 1048576 / 16384;
  EXPECT_EQ(p.plan.elements(), 1048574u);
  EXPECT_EQ(p.plan.runs(), blocks);
  EXPECT_EQ(p.plan.phases.size(), blocks / 16);
  for (const auto& ph : p.plan.phases) EXPECT_EQ(ph.runs.size(), 16u);
}

TEST(Planner, CoversInteriorOnceWithLocalStores) {
  for (const auto& [name, ext] : std::vector<std::pair<std::string, std::string>>{
           {"jacobi1d", "100000"}, {"blur2d", "200x300"}, {"pt33_3d", "40x30x20"}, {"jacobi2d", "512x512"}}) {
    const auto k = *grid::find_kernel(name);
    const auto e = grid::parse_extents(ext);
    const auto p = plan_for(k, e);
    const memory::AddressMap map(16, memory::kDefaultBlockBytes, p.seg);
    std::set<std::size_t> seen;
    for (const auto& ph : p.plan.phases) {
      std::set<unsigned> spus;
      for (const auto& r : ph.runs) {
        EXPECT_TRUE(spus.insert(r.spu).second) << "two runs of one SPU in a phase";
        for (std::uint64_t i = 0; i < r.n_elements; ++i) {
          EXPECT_TRUE(seen.insert(r.out_linear + i).second);
          ASSERT_EQ(map.map_slice(p.grids.output.address_of(r.out_linear + i)), r.spu);
        }
        EXPECT_EQ(r.out_addr, p.grids.output.address_of(r.out_linear));
      }
    }
    std::set<std::size_t> interior;
    for (const auto& row : interior_rows(k, e))
      for (std::size_t i = 0; i < row.n; ++i) interior.insert(row.start + i);
    EXPECT_EQ(seen, interior) << name;
  }
}

TEST(Planner, StreamAddresses) {
  const auto k = grid::jacobi2d();
  const auto p = plan_for(k, grid::parse_extents("64x64"));
  const auto& r = p.plan.phases.at(0).runs.at(0);
  ASSERT_EQ(r.in_addrs.size(), 3u);
  const auto at = p.grids.input.address_of(r.out_linear);
  EXPECT_EQ(r.in_addrs[0], at - 64 * 8);
  EXPECT_EQ(r.in_addrs[1], at);
  EXPECT_EQ(r.in_addrs[2], at + 64 * 8);
}

TEST(Baseline, PartitionCoversInterior) {
  for (const char* ext : {"4096", "64x64", "16x16x8", "512x3"}) {
    const auto e = grid::parse_extents(ext);
    const auto k = e.dims == 1 ? grid::jacobi1d() : e.dims == 2 ? grid::jacobi2d() : grid::pt7_3d();
    grid::Grid out(e, kSegmentBase);
    const auto parts = partition_rows(k, out, 16);
    ASSERT_EQ(parts.size(), 16u);
    std::set<std::size_t> seen;
    for (const auto& tasks : parts)
      for (const auto& t : tasks)
        for (std::uint64_t i = 0; i < t.n_elements; ++i) EXPECT_TRUE(seen.insert(t.out_linear + i).second);
    std::size_t n = 0;
    for (const auto& row : interior_rows(k, e)) n += row.n;
    EXPECT_EQ(seen.size(), n) << ext;
  }
}

TEST(Config, ParseAndErrors) {
  std::istringstream in(
      "# comment\n[system]\nseed = 9\nwarmup=1\n\n[llc]\nhit_latency = 10 ; trailing\n[l1]\nmshrs = 4\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.warmup, 1u);
  EXPECT_EQ(c.slice.hit_latency, 10u);
  EXPECT_EQ(c.baseline.l1.mshrs, 4u);
  EXPECT_EQ(c.dram.latency, 200u);

  auto fails_on_line = [](const std::string& text, const std::string& line) {
    std::istringstream s(text);
    try {
      parse_config(s);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(line) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_on_line("[system]\nseed = 1\nbogus = 2\n", "line 3"));
  EXPECT_TRUE(fails_on_line("[nope]\n", "line 1"));
  EXPECT_TRUE(fails_on_line("[llc]\nhit_latency = ten\n", "line 2"));
  EXPECT_TRUE(fails_on_line("seed = 1\n", "line 1"));
}

TEST(Config, IniRoundTrip) {
  SimConfig c;
  c.seed = 77;
  c.baseline.prefetch = false;
  c.noc.hop_latency = 3;
  std::istringstream in(c.to_ini());
  const auto back = parse_config(in);
  EXPECT_EQ(back.to_ini(), c.to_ini());
  EXPECT_EQ(back.digest(), c.digest());
  EXPECT_NE(SimConfig{}.digest(), c.digest());
  EXPECT_EQ(c.digest().size(), 16u);
}

TEST(Config, Validation) {
  SimConfig c;
  c.n_spus = 12;  // mesh is 4x4
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig{};
  c.block_bytes = 100;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Workload, Errors) {
  EXPECT_THROW(make_workload("nope", grid::SizeClass::L2), ConfigError);
  EXPECT_THROW(make_workload("pt7_3d", grid::parse_extents("64x64")), DimensionError);
  EXPECT_THROW(run_casper(make_workload("pt7_1d", grid::parse_extents("5")), SimConfig{}), DimensionError);
  EXPECT_EQ(make_workload("blur2d", grid::SizeClass::L3).extents, grid::make_extents({1024, 1024}));
}

TEST(Experiment, BothModesMatchGolden) {
  for (const auto& [name, ext] : std::vector<std::pair<std::string, std::string>>{
           {"jacobi1d", "4096"}, {"blur2d", "64x64"}, {"pt33_3d", "16x16x8"}}) {
    const auto w = make_workload(name, grid::parse_extents(ext));
    const auto a = run_casper(w, SimConfig{});
    const auto b = run_baseline(w, SimConfig{});
    EXPECT_EQ(a.output_checksum, b.output_checksum) << name;
    EXPECT_EQ(a.timesteps, 3u);
  }
}

TEST(Experiment, CorruptConstantDetected) {
  RunOptions o;
  o.corrupt_constant = std::pair{0u, 0.5};
  EXPECT_THROW(run_casper(make_workload("jacobi1d", grid::parse_extents("4096")), SimConfig{}, o),
               FunctionalMismatch);
}

TEST(Experiment, DeterministicReports) {
  const auto w = make_workload("jacobi2d", grid::parse_extents("128x64"));
  EXPECT_EQ(to_json(run_casper(w, SimConfig{})), to_json(run_casper(w, SimConfig{})));
  EXPECT_EQ(to_json(run_baseline(w, SimConfig{})), to_json(run_baseline(w, SimConfig{})));
  RunOptions o;
  o.seed = 5;
  EXPECT_NE(run_casper(w, SimConfig{}, o).output_checksum, run_casper(w, SimConfig{}).output_checksum);
}

TEST(Experiment, ConservationAndEnergy) {
  const SimConfig c;
  for (const auto& [name, ext] : std::vector<std::pair<std::string, std::string>>{
           {"jacobi1d", "8192"}, {"jacobi2d", "128x64"}, {"pt7_3d", "32x16x16"}}) {
    const auto w = make_workload(name, grid::parse_extents(ext));
    for (const auto& r : {run_casper(w, c), run_baseline(w, c)}) {
      EXPECT_EQ(r.loads_issued, r.load_completions) << name << ' ' << r.mode;
      EXPECT_EQ(r.llc_hits + r.llc_misses, r.llc_accesses);
      if (r.mode == "casper") EXPECT_EQ(r.l1_hits + r.l1_misses, 0u);
      EXPECT_EQ(r.noc_flits, r.noc_remote_units);
      EXPECT_EQ(r.energy.total_pj(), recompute_energy(r, c));
      EXPECT_GT(r.cycles, 0u);
    }
  }
}

TEST(Experiment, CasperCounters) {
  const auto w = make_workload("jacobi1d", grid::parse_extents("16386"));
  const auto r = run_casper(w, SimConfig{});
  // points 1..16383 fill block 0 in 2048 groups (lead 1); point 16384 opens block 1
  EXPECT_EQ(r.committed_instructions, 2049u * 3);
  EXPECT_EQ(r.stores, 2049u);
  EXPECT_EQ(r.llc_misses, 0u);
  EXPECT_GT(r.local_fraction(), 0.99);
}

TEST(Experiment, AblationShowsMappingEffect) {
  const auto w = make_workload("jacobi1d", grid::parse_extents("65536"));
  const auto a = ablate_mapping(w, SimConfig{});
  EXPECT_EQ(a.interleave.mapping, "interleave");
  EXPECT_NEAR(a.interleave.local_fraction(), 1.0 / 16, 0.02);
  EXPECT_GT(a.segment.local_fraction(), 0.99);
  EXPECT_DOUBLE_EQ(a.speedup_mapping_only,
                   static_cast<double>(a.interleave.cycles) / static_cast<double>(a.segment.cycles));
  EXPECT_DOUBLE_EQ(a.speedup_full, static_cast<double>(a.baseline.cycles) / static_cast<double>(a.segment.cycles));
}

TEST(Report, JsonAndCsvRoundTrip) {
  const auto w = make_workload("jacobi1d", grid::parse_extents("4096"));
  const auto r = run_casper(w, SimConfig{});
  EXPECT_EQ(report_from_json(to_json(r)), r);
  const auto header = csv_header();
  const auto row = csv_row(r);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(header.rfind("schema_version,", 0), 0u);
  EXPECT_EQ(row.rfind("1,", 0), 0u);
  EXPECT_THROW(report_from_json("{}"), Error);
}

TEST(Report, Compare) {
  const auto w = make_workload("jacobi1d", grid::parse_extents("4096"));
  const auto a = run_casper(w, SimConfig{});
  const auto b = run_baseline(w, SimConfig{});
  const auto cmp = compare(a, b);
  EXPECT_DOUBLE_EQ(cmp.speedup, static_cast<double>(b.cycles) / static_cast<double>(a.cycles));
  EXPECT_EQ(cmp.deltas.at("cycles"), static_cast<std::int64_t>(a.cycles) - static_cast<std::int64_t>(b.cycles));
  const auto other = run_casper(make_workload("pt7_1d", grid::parse_extents("4096")), SimConfig{});
  EXPECT_THROW(compare(other, b), ConfigError);
}

TEST(Experiment, ThroughputCeiling) {
  for (const char* k : {"jacobi1d", "pt7_1d"}) {
    const auto r = run_casper(make_workload(k, grid::parse_extents("65536")), SimConfig{});
    EXPECT_GE(r.cycles * 16, r.llc_accesses) << k;
  }
  const auto r = run_casper(make_workload("blur2d", grid::parse_extents("256x128")), SimConfig{});
  EXPECT_GE(r.cycles * 16, r.llc_accesses);
}

TEST(Experiment, BaselineL2SizedHitsPrivately) {
  const auto r = run_baseline(make_workload("jacobi2d", grid::SizeClass::L2), SimConfig{});
  const auto hits = r.l1_hits + r.l2_hits;
  const auto all = r.l1_hits + r.l1_misses;
  EXPECT_GT(static_cast<double>(hits) / static_cast<double>(all + r.l2_misses), 0.9);
}

TEST(Experiment, MappingNeverChangesOutput) {
  const auto w = make_workload("pt7_3d", grid::parse_extents("32x32x32"));
  const auto a = ablate_mapping(w, SimConfig{});
  EXPECT_EQ(a.interleave.output_checksum, a.segment.output_checksum);
  EXPECT_EQ(a.segment.output_checksum, a.baseline.output_checksum);
  const auto j = ablate_mapping(make_workload("jacobi1d", grid::parse_extents("32768")), SimConfig{});
  const double gain3d = a.segment.local_fraction() - a.interleave.local_fraction();
  const double gain1d = j.segment.local_fraction() - j.interleave.local_fraction();
  EXPECT_LT(gain3d, gain1d);
}

TEST(Api, PaperExamples) {
  CasperMachine m(SimConfig{});
  const auto base = m.init_stencil_segment(4 << 20);
  EXPECT_EQ(base % 131072, 0u);

  m.init_stencil_code(isa::build_program(grid::jacobi1d()));
  m.init_constant(0.2, 0);
  for (unsigned k = 0; k < 16; ++k) EXPECT_EQ(m.spu(k).constants()[0], 0.2);
  // one group of 8 outputs: 3 commits and 1 store
  m.init_stream(base + 4096, 0, 2);
  m.init_stream(base + 2 * 131072 + 4096, isa::kOutputStream, 2);
  m.set_n_elements(8, 2);
  m.start_accelerator();
  EXPECT_EQ(m.spu(2).stats().committed, 3u);
  EXPECT_EQ(m.spu(2).stats().stores, 1u);
}
