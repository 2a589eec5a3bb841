#include <benchmark/benchmark.h>

#include "casper/grid/catalog.hpp"
#include "casper/grid/golden.hpp"
#include "casper/isa/instruction.hpp"
#include "casper/memory/memory_system.hpp"
#include "casper/sim/experiment.hpp"

using namespace casper;

static void BM_DecodeEncode(benchmark::State& state) {
  std::uint16_t w = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(isa::encode(isa::decode(w)));
    w = static_cast<std::uint16_t>((w + 1) & isa::kInstructionMask);
  }
}
BENCHMARK(BM_DecodeEncode);

static void BM_GoldenStep(benchmark::State& state) {
  const auto k = *grid::find_kernel(state.range(0) == 0 ? "jacobi2d" : "pt33_3d");
  grid::Grid g(state.range(0) == 0 ? grid::parse_extents("512x512") : grid::parse_extents("64x64x32"));
  grid::fill_random(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(grid::golden_step(k, g));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.size()));
}
BENCHMARK(BM_GoldenStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SliceHits(benchmark::State& state) {
  const std::uint64_t base = 0x1'0000'0000ULL;
  const memory::AddressMap map(16, 131072, memory::StencilSegment{base, 1 << 22});
  memory::Dram dram;
  memory::LlcSlice s(0, {}, map, dram);
  std::uint64_t c = 0;
  for (std::uint64_t l = 0; l < 1024; ++l) s.access({memory::AccessKind::AlignedLoad, base + 64 * l}, c++);
  c += 1000;
  std::uint64_t l = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.access({memory::AccessKind::AlignedLoad, base + 64 * l}, c++));
    l = (l + 1) % 1024;
  }
}
BENCHMARK(BM_SliceHits);

// Simulated cycles per wall-clock second for whole runs.
static void BM_Simulate(benchmark::State& state) {
  const bool casper = state.range(0) == 0;
  const auto w = sim::make_workload("jacobi2d", grid::parse_extents("256x256"));
  sim::RunOptions o;
  o.verify = false;
  o.warmup = 0;
  std::uint64_t cycles = 0;
  for (auto _ : state) {
    const auto r = casper ? sim::run_casper(w, {}, o) : sim::run_baseline(w, {}, o);
    cycles += r.cycles;
  }
  state.counters["sim_cycles/s"] = benchmark::Counter(static_cast<double>(cycles), benchmark::Counter::kIsRate);
  state.SetLabel(casper ? "casper" : "baseline");
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
