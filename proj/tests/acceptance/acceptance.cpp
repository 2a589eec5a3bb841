// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "casper/grid/catalog.hpp"
#include "casper/grid/golden.hpp"
#include "casper/grid/placement.hpp"
#include "casper/isa/instruction.hpp"
#include "casper/isa/program.hpp"
#include "casper/memory/memory_system.hpp"
#include "casper/sim/api.hpp"
#include "casper/sim/experiment.hpp"

using namespace casper;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

sim::Workload wl(const std::string& k, const std::string& ext) {
  return sim::make_workload(k, grid::parse_extents(ext));
}

double ratio(std::uint64_t a, std::uint64_t b) { return static_cast<double>(a) / static_cast<double>(b); }

// 1. casper and baseline equal golden_step applied three times, bit for bit
void functional(Verdict& v) {
  const std::pair<const char*, const char*> cases[] = {{"jacobi1d", "4096"},  {"pt7_1d", "4096"},
                                                       {"jacobi2d", "64x64"}, {"blur2d", "64x64"},
                                                       {"pt7_3d", "16x16x8"}, {"pt33_3d", "16x16x8"}};
  sim::RunOptions o;
  o.warmup = 2;
  const sim::SimConfig cfg;
  int ok = 0;
  for (auto [k, e] : cases) {
    const auto w = wl(k, e);
    grid::Grid init(w.extents);
    grid::fill_random(init, cfg.seed);
    const auto want = grid::checksum(grid::golden_run(w.kernel, init, 3));
    try {
      const auto a = sim::run_casper(w, cfg, o);
      const auto b = sim::run_baseline(w, cfg, o);
      const bool good = a.output_checksum == want && b.output_checksum == want && a.timesteps == 3;
      v.check(good, std::string(k) + " checksum");
      ok += good;
    } catch (const std::exception& ex) {
      v.check(false, std::string(k) + ": " + ex.what());
    }
  }
  v.detail << ok << "/6 kernels bit-identical in both modes after 3 timesteps";
}

// 2. exhaustive encode/decode and the Jacobi-2D microcode
void isa_roundtrip(Verdict& v) {
  unsigned bad = 0;
  for (unsigned w = 0; w < (1u << 15); ++w) {
    const auto in = isa::decode(static_cast<std::uint16_t>(w));
    const unsigned packed = static_cast<unsigned>(in.const_idx) << 11 | static_cast<unsigned>(in.stream_idx) << 7 |
                            (in.shift_dir == isa::ShiftDir::Backward) << 6 | in.shift_amt << 3 |
                            in.clear_acc << 2 | in.enable_output << 1 | in.advance_stream;
    if (isa::encode(in) != w || packed != w) ++bad;
  }
  v.check(bad == 0, std::to_string(bad) + " words");
  const auto prog = isa::build_program(grid::jacobi2d());
  bool shape = prog.instructions.size() == 5;
  for (std::size_t i = 0; shape && i < 5; ++i) {
    const auto& in = prog.instructions[i];
    shape = in.clear_acc == (i == 0) && in.enable_output == (i == 4) && in.advance_stream == (i == 0 || i == 3 || i == 4);
  }
  v.check(shape, "jacobi2d control bits");
  v.detail << (1u << 15) << " words round-trip, " << bad << " mismatches; jacobi2d program has "
           << prog.instructions.size() << " instructions";
}

// 3. unaligned reads equal two aligned loads spliced; warm unaligned latency equals aligned
void unaligned(Verdict& v) {
  constexpr std::uint64_t base = sim::kSegmentBase, size = 1 << 20;
  memory::PhysicalMemory pm(base, size);
  std::mt19937_64 rng(2024);
  for (std::uint64_t a = base; a < base + size; a += 8) pm.store(a, std::bit_cast<double>(rng() >> 2));
  std::uniform_int_distribution<std::uint64_t> line(1, size / 64 - 2);
  std::uniform_int_distribution<unsigned> amt(0, 7), dir(0, 1);
  unsigned bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t la = base + 64 * line(rng);
    const auto d = dir(rng) ? isa::ShiftDir::Backward : isa::ShiftDir::Forward;
    const unsigned k = amt(rng);
    const std::uint64_t lo = d == isa::ShiftDir::Forward ? la : la - 64;
    std::byte both[128];
    const auto a = memory::to_bytes(pm.read_window(lo));
    const auto b = memory::to_bytes(pm.read_window(lo + 64));
    std::memcpy(both, a.data(), 64);
    std::memcpy(both + 64, b.data(), 64);
    const std::size_t off = d == isa::ShiftDir::Forward ? 8 * k : 64 - 8 * k;
    const auto got = memory::unaligned_read_bytes(pm, la, d, k);
    if (std::memcmp(got.data(), both + off, 64) != 0) ++bad;
  }
  v.check(bad == 0, std::to_string(bad) + " splice mismatches");

  struct Sink : memory::MemClient {
    std::uint64_t ready = 0;
    void on_load(std::uint64_t, std::uint64_t r, const memory::LineData&, std::uint8_t, bool) override {
      ready = std::max(ready, r);
    }
    void on_store_accepted(std::uint64_t, std::uint64_t) override {}
  };
  unsigned latency_bad = 0;
  for (unsigned shift = 1; shift < 8; ++shift) {
    std::uint64_t ready[2];
    for (int u = 0; u < 2; ++u) {
      memory::MemorySystem m(memory::AddressMap(16, 131072, memory::StencilSegment{base, size}),
                             memory::PhysicalMemory(base, size));
      std::uint64_t c = 0;
      m.load_window(3, base + 3 * 131072 + 128, c, nullptr, 0);
      m.load_window(3, base + 3 * 131072 + 192, c, nullptr, 0);
      while (!m.idle()) m.tick(c++);
      c += 1000;  // past the DRAM fills
      Sink s;
      m.load_window(3, base + 3 * 131072 + 128 + (u ? 8 * shift : 0), c, &s, 1);
      while (!m.idle()) m.tick(c++);
      ready[u] = s.ready;
    }
    latency_bad += ready[0] != ready[1];
  }
  v.check(latency_bad == 0, "warm unaligned latency");
  v.detail << "10000 random (line, dir, amt) cases, " << bad << " mismatches; warm unaligned vs aligned latency differs in "
           << latency_bad << "/7 shifts";
}

// 4. segment hash law and co-placement
void slice_law(Verdict& v) {
  const memory::StencilSegment seg{sim::kSegmentBase, 1ULL << 30};
  const memory::AddressMap map(16, 131072, seg);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> off(0, seg.size - 1);
  unsigned bad = 0;
  for (int i = 0; i < 1000000; ++i) {
    const std::uint64_t a = seg.base + off(rng);
    const std::uint64_t rel = a - seg.base;
    if (map.map_slice(a) != (rel >> 17 & 15)) ++bad;  // independent: shift and mask
  }
  v.check(bad == 0, "hash");
  unsigned coplace_bad = 0;
  for (const auto& name : grid::kernel_names()) {
    const auto k = *grid::find_kernel(name);
    const auto e = k.dims == 1 ? grid::parse_extents("262144") : k.dims == 2 ? grid::parse_extents("512x512")
                                                                             : grid::parse_extents("64x64x32");
    const memory::AddressMap probe(16, 131072);
    const memory::StencilSegment s{sim::kSegmentBase, grid::required_segment_bytes(e, probe)};
    const memory::AddressMap m2(16, 131072, s);
    const auto gp = grid::place_grids(k, e, s, m2);
    for (std::size_t i = 0; i < gp.input.size(); i += 7) {
      coplace_bad += m2.map_slice(gp.input.address_of(i)) != m2.map_slice(gp.output.address_of(i));
    }
  }
  v.check(coplace_bad == 0, "co-placement");
  v.detail << "1000000 random addresses, " << bad << " mismatches; co-placed grids differ at " << coplace_bad
           << " sampled indices";
}

// 5. warm local jacobi1d at peak LLC bandwidth
void peak_bandwidth(Verdict& v) {
  const sim::SimConfig cfg;
  const auto r = sim::run_casper(wl("jacobi1d", "262144"), cfg);
  const std::uint64_t groups = r.stores;
  const double ipc = ratio(r.committed_instructions, r.cycles) / cfg.n_spus;
  const double delivery = ratio(r.llc_accesses, r.cycles) / cfg.n_spus;  // 64B accesses per slice per cycle
  const double load_delivery = ratio(r.llc_accesses - r.stores, r.cycles) / cfg.n_spus;
  v.check(groups >= 10000, "group count");
  v.check(r.llc_misses == 0, "warm");
  v.check(ipc >= 0.9, "per-SPU IPC >= 0.9");
  v.check(delivery >= 0.9, "LLC delivery >= 0.9 of 16x64B/cycle");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%llu groups, local %.4f, per-SPU IPC %.3f, LLC port utilization %.3f (loads alone %.3f)",
                static_cast<unsigned long long>(groups), r.local_fraction(), ipc, delivery, load_delivery);
  v.detail << buf;
}

// 6. local-load fraction at L3 sizes
void locality(Verdict& v) {
  const sim::SimConfig cfg;
  sim::RunOptions o;
  o.verify = false;
  double f[4];
  const char* names[4] = {"jacobi1d", "jacobi2d", "pt7_3d", "pt33_3d"};
  for (int i = 0; i < 4; ++i) f[i] = sim::run_casper(sim::make_workload(names[i], grid::SizeClass::L3), cfg, o).local_fraction();
  o.segment_hash = false;
  const double inter = sim::run_casper(sim::make_workload("jacobi1d", grid::SizeClass::L3), cfg, o).local_fraction();
  v.check(f[0] > 0.95 && f[1] > 0.95, "1D/2D above 0.95");
  v.check(f[2] < std::min(f[0], f[1]) && f[3] < std::min(f[0], f[1]), "3D strictly lower");
  v.check(f[0] > inter, "segment beats interleave");
  char buf[256];
  std::snprintf(buf, sizeof buf, "local fraction jacobi1d %.4f jacobi2d %.4f pt7_3d %.4f pt33_3d %.4f; jacobi1d interleave %.4f",
                f[0], f[1], f[2], f[3], inter);
  v.detail << buf;
}

// 7. speedup and energy trends at desk-scaled L3 sizes
void trends(Verdict& v) {
  const sim::SimConfig cfg;
  struct Pair {
    sim::Report c, b;
  };
  auto both = [&](const char* k, const char* e) { return Pair{sim::run_casper(wl(k, e), cfg), sim::run_baseline(wl(k, e), cfg)}; };
  const Pair j1 = both("jacobi1d", "262144"), j2 = both("jacobi2d", "512x512"), p7 = both("pt7_3d", "64x64x32"),
             p33 = both("pt33_3d", "64x64x32");
  auto speedup = [](const Pair& p) { return ratio(p.b.cycles, p.c.cycles); };
  auto eratio = [](const Pair& p) { return ratio(p.c.energy.total_pj(), p.b.energy.total_pj()); };

  const bool a = speedup(j1) > 1 && speedup(j2) > 1;
  const bool b = speedup(p33) <= speedup(j2);
  const bool c = p7.c.energy.total_pj() < p7.b.energy.total_pj() && j2.c.energy.total_pj() < j2.b.energy.total_pj();
  bool d = true;
  for (const Pair* p : {&j1, &j2, &p7, &p33}) {
    for (const sim::Report* r : {&p->c, &p->b}) {
      const auto& bp = cfg.baseline;
      const bool spu = r->mode == "casper";
      const std::uint64_t e = r->committed_instructions * (spu ? cfg.spu.instruction_energy_pj : bp.instruction_energy_pj) +
                              r->l1_hits * bp.l1.hit_energy_pj + r->l1_misses * bp.l1.miss_energy_pj +
                              r->l2_hits * bp.l2.hit_energy_pj + r->l2_misses * bp.l2.miss_energy_pj +
                              r->llc_hits * cfg.slice.hit_energy_pj + r->llc_misses * cfg.slice.miss_energy_pj +
                              (r->dram_reads + r->dram_writes) * cfg.dram.energy_pj;
      d = d && e == r->energy.total_pj() && r->energy.noc_pj == 0;
    }
  }
  v.check(a, "(a) speedup 1D/2D > 1");
  v.check(b, "(b) pt33 <= jacobi2d");
  v.check(c, "(c) casper energy lower for jacobi2d and pt7_3d");
  v.check(d, "(d) energy recompute");
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "speedup jacobi1d %.2f jacobi2d %.2f pt7_3d %.2f pt33_3d %.2f; energy casper/baseline jacobi1d %.2f "
                "jacobi2d %.2f pt7_3d %.2f pt33_3d %.2f; (a) %s (b) %s (c) %s (d) %s",
                speedup(j1), speedup(j2), speedup(p7), speedup(p33), eratio(j1), eratio(j2), eratio(p7), eratio(p33),
                a ? "ok" : "no", b ? "ok" : "no", c ? "ok" : "no", d ? "ok" : "no");
  v.detail << buf;
}

// 8. identical reports for identical runs; counter conservation
void determinism(Verdict& v) {
  const sim::SimConfig cfg;
  unsigned runs = 0;
  for (auto [k, e] : {std::pair{"jacobi2d", "128x128"}, std::pair{"pt33_3d", "32x16x16"}, std::pair{"pt7_1d", "20000"}}) {
    for (int mode = 0; mode < 2; ++mode) {
      auto go = [&] { return mode == 0 ? sim::run_casper(wl(k, e), cfg) : sim::run_baseline(wl(k, e), cfg); };
      const auto r1 = go(), r2 = go();
      ++runs;
      const std::string tag = std::string(k) + (mode == 0 ? " casper" : " baseline");
      v.check(sim::to_json(r1) == sim::to_json(r2), tag + " json");
      v.check(r1.loads_issued == r1.load_completions, tag + " issued/completed");
      v.check(r1.llc_hits + r1.llc_misses == r1.llc_accesses, tag + " hits+misses");
      v.check(r1.noc_flits == r1.noc_remote_units, tag + " flits");
    }
  }
  v.detail << runs << " configurations run twice: reports byte-identical, loads issued = completed, "
                      "hits + misses = accesses, flits = 64B remote units";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Verdict&)>> criteria[] = {
      {"1 functional-oracle-equivalence", functional}, {"2 isa-exhaustive-roundtrip", isa_roundtrip},
      {"3 unaligned-load-oracle", unaligned},          {"4 slice-mapping-law", slice_law},
      {"5 peak-bandwidth", peak_bandwidth},            {"6 locality-trend", locality},
      {"7 speedup-energy-trends", trends},             {"8 determinism-conservation", determinism}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(v);
    } catch (const std::exception& ex) {
      v.check(false, std::string("exception: ") + ex.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", name, v.detail.str().c_str(), s);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
