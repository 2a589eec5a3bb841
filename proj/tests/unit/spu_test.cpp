#include <gtest/gtest.h>

#include <sstream>

#include "casper/error.hpp"
#include "casper/grid/catalog.hpp"
#include "casper/isa/program.hpp"
#include "casper/sim/api.hpp"

using namespace casper;
using sim::CasperMachine;

namespace {

constexpr std::uint64_t kBlock = 128 * 1024;

double value_at(std::uint64_t i) { return 0.25 * static_cast<double>(i % 1000) + 1.0; }

// Fills the first `words` doubles of the segment with value_at(index).
void fill(CasperMachine& m, std::uint64_t words) {
  auto& pm = m.memory().memory();
  for (std::uint64_t i = 0; i < words; ++i) pm.store(m.segment().base + 8 * i, value_at(i));
}

}  // namespace

TEST(Spu, MaskedShortRun) {
  CasperMachine m(sim::SimConfig{});
  const auto base = m.init_stencil_segment(16 * kBlock);
  fill(m, 4096);
  const auto k = grid::jacobi1d();
  m.init_stencil_code(isa::build_program(k));
  m.init_constant(1.0 / 3.0, 0);

  // 14 outputs starting at element 1 of a line: lead 1, two groups, masks 0xFE and 0x7F
  const std::uint64_t out = base + 16 * kBlock - 4096;
  auto& pm = m.memory().memory();
  for (int i = 0; i < 24; ++i) pm.store(out + 8 * i, -1.0);
  m.init_stream(base + 64 + 8, 0, 0);
  m.init_stream(out + 8, isa::kOutputStream, 0);
  m.set_n_elements(14, 0);
  m.start_accelerator();

  EXPECT_EQ(m.spu(0).groups(), 2u);
  EXPECT_EQ(m.spu(0).stats().committed, 6u);
  EXPECT_EQ(m.spu(0).stats().stores, 2u);
  EXPECT_EQ(pm.load(out), -1.0);
  for (int i = 15; i < 24; ++i) EXPECT_EQ(pm.load(out + 8 * i), -1.0) << i;
  for (int i = 1; i <= 14; ++i) {
    double acc = 0.0;
    for (int d = -1; d <= 1; ++d) acc += (1.0 / 3.0) * value_at(static_cast<std::uint64_t>(8 + i + d));
    EXPECT_EQ(pm.load(out + 8 * i), acc) << i;
  }
}

TEST(Spu, InOrderCommitDespiteOutOfOrderCompletion) {
  CasperMachine m(sim::SimConfig{});
  const auto base = m.init_stencil_segment(16 * kBlock);
  fill(m, 16 * kBlock / 8);
  // acc = 1*far + 2*near; `far` sits in slice 15, six hops from SPU 0
  isa::StencilProgram prog;
  prog.instructions = {isa::Instruction{0, 0, isa::ShiftDir::Forward, 0, true, false, true},
                       isa::Instruction{1, 1, isa::ShiftDir::Forward, 0, false, true, true}};
  prog.constants = {1.0, 2.0};
  prog.n_input_streams = 2;
  ASSERT_TRUE(isa::validate_program(prog).empty());
  m.init_stencil_code(prog);
  m.init_constant(1.0, 0);
  m.init_constant(2.0, 1);

  const std::uint64_t far = base + 15 * kBlock, near = base + 4096, out = base + 8192;
  auto configure = [&] {
    m.init_stream(far, 0, 0);
    m.init_stream(near, 1, 0);
    m.init_stream(out, isa::kOutputStream, 0);
    m.set_n_elements(64, 0);
  };
  configure();
  m.start_accelerator();  // warms the lines
  m.reset_stats();

  std::ostringstream trace;
  m.set_pipeline_trace(&trace);
  configure();
  const auto t0 = m.cycle();
  m.start_accelerator();
  m.set_pipeline_trace(nullptr);

  EXPECT_EQ(m.spu(0).stats().order_violations, 0u);
  EXPECT_EQ(m.spu(0).stats().committed, 16u);
  std::istringstream in(trace.str());
  std::string line;
  std::vector<unsigned> pcs;
  std::uint64_t first_commit = 0;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::uint64_t cycle;
    unsigned id, pc;
    std::string ev;
    f >> cycle >> id >> ev >> pc;
    if (ev != "commit") continue;
    if (pcs.empty()) first_commit = cycle;
    pcs.push_back(pc);
  }
  ASSERT_EQ(pcs.size(), 16u);
  for (std::size_t i = 0; i < pcs.size(); ++i) EXPECT_EQ(pcs[i], i % 2);
  // the remote head (6 hops out and back, 2 cycles each, plus the slice) gates the first commit
  EXPECT_GE(first_commit, t0 + 12 + 8 + 12);

  auto& pm = m.memory().memory();
  for (std::uint64_t i = 0; i < 64; ++i) {
    double acc = 0.0;
    acc += 1.0 * value_at((far - base) / 8 + i);
    acc += 2.0 * value_at((near - base) / 8 + i);
    ASSERT_EQ(pm.load(out + 8 * i), acc) << i;
  }
}

TEST(Spu, LoadQueueBound) {
  sim::SimConfig cfg;
  cfg.spu.load_queue_entries = 3;
  CasperMachine m(cfg);
  const auto base = m.init_stencil_segment(16 * kBlock);
  m.init_stencil_code(isa::build_program(grid::pt7_1d()));
  m.init_constant(1.0 / 7.0, 0);
  m.init_stream(base + 64, 0, 0);
  m.init_stream(base + 8 * kBlock, isa::kOutputStream, 0);
  m.set_n_elements(256, 0);
  m.start_accelerator();
  EXPECT_LE(m.spu(0).stats().max_occupancy, 3u);
  EXPECT_EQ(m.spu(0).stats().committed, 7u * 32);
}

TEST(Spu, IdleWithoutElements) {
  CasperMachine m(sim::SimConfig{});
  m.init_stencil_segment(16 * kBlock);
  m.init_stencil_code(isa::build_program(grid::jacobi1d()));
  EXPECT_NO_THROW(m.start_accelerator());
  for (unsigned k = 0; k < m.n_spus(); ++k) EXPECT_EQ(m.spu(k).stats().committed, 0u);
}

TEST(Api, Misuse) {
  CasperMachine m(sim::SimConfig{});
  EXPECT_THROW(m.init_stencil_code(isa::build_program(grid::jacobi1d())), ConfigError);
  EXPECT_THROW(m.set_n_elements(8, 0), ConfigError);
  const auto base = m.init_stencil_segment(1);
  EXPECT_EQ(m.segment().size, kBlock);
  EXPECT_THROW(m.init_stencil_segment(kBlock), ConfigError);
  EXPECT_THROW(m.start_accelerator(), ConfigError);  // no code yet
  EXPECT_THROW(m.init_stream(base - 64, 0, 0), AddressFault);
  EXPECT_THROW(m.init_stream(base + kBlock, 0, 0), AddressFault);
  EXPECT_THROW(m.set_n_elements(8, 16), ConfigError);

  auto bad = isa::build_program(grid::jacobi1d());
  bad.instructions[1].clear_acc = true;
  EXPECT_THROW(m.init_stencil_code(bad), ConfigError);

  m.init_stencil_code(isa::build_program(grid::jacobi1d()));
  m.set_n_elements(8, 3);  // streams missing
  EXPECT_THROW(m.start_accelerator(), ConfigError);
}
