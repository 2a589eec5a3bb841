#include "casper/sim/api.hpp"

#include <sstream>

#include "casper/error.hpp"

namespace casper::sim {

CasperMachine::CasperMachine(SimConfig config, bool segment_hash)
    : config_(std::move(config)), segment_hash_(segment_hash) {
  config_.validate();
}

CasperMachine::~CasperMachine() = default;

void CasperMachine::require_segment(const char* call) const {
  if (!mem_) throw ConfigError(std::string(call) + " before init_stencil_segment");
}

const memory::StencilSegment& CasperMachine::segment() const {
  require_segment("segment()");
  return segment_;
}

memory::MemorySystem& CasperMachine::memory() {
  require_segment("memory()");
  return *mem_;
}

spu::Spu& CasperMachine::spu(unsigned k) {
  require_segment("spu()");
  if (k >= spus_.size()) throw ConfigError("SPU id " + std::to_string(k) + " out of range");
  return *spus_[k];
}

std::uint64_t CasperMachine::init_stencil_segment(std::uint64_t size) {
  if (mem_) throw ConfigError("stencil segment already allocated");
  if (size == 0) throw ConfigError("stencil segment size must be positive");
  segment_ = memory::StencilSegment{kSegmentBase, memory::round_up(size, config_.block_bytes)};
  std::optional<memory::StencilSegment> hashed;
  if (segment_hash_) hashed = segment_;
  memory::AddressMap map(config_.n_spus, config_.block_bytes, hashed);
  mem_ = std::make_unique<memory::MemorySystem>(map, memory::PhysicalMemory(segment_.base, segment_.size),
                                                config_.slice, config_.noc, config_.dram);
  spus_.clear();
  for (unsigned k = 0; k < config_.n_spus; ++k) {
    spus_.push_back(std::make_unique<spu::Spu>(k, *mem_, config_.spu));
    spus_.back()->set_trace(pipeline_trace_);
  }
  configured_.assign(config_.n_spus, false);
  return segment_.base;
}

void CasperMachine::init_stencil_code(const isa::StencilProgram& program) {
  require_segment("init_stencil_code");
  const auto violations = isa::validate_program(program);
  if (!violations.empty()) throw ConfigError("invalid stencil code: " + violations.front().message);
  for (auto& s : spus_) s->load_program(program);
  program_ = program;
}

void CasperMachine::init_constant(double value, unsigned idx) {
  require_segment("init_constant");
  for (auto& s : spus_) s->set_constant(idx, value);
}

void CasperMachine::init_stream(std::uint64_t addr, unsigned stream_id, unsigned spu_id) {
  require_segment("init_stream");
  if (!segment_.contains(addr)) throw AddressFault("stream start outside the stencil segment", addr);
  spu(spu_id).set_stream(stream_id, addr);
}

void CasperMachine::set_n_elements(std::uint64_t n, unsigned spu_id) {
  require_segment("set_n_elements");
  spu(spu_id).set_n_elements(n);
  configured_[spu_id] = true;
}

std::uint64_t CasperMachine::start_accelerator() {
  require_segment("start_accelerator");
  if (!program_) throw ConfigError("start_accelerator before init_stencil_code");
  for (unsigned k = 0; k < spus_.size(); ++k) {
    if (configured_[k]) {
      spus_[k]->start(cycle_);
    } else {
      spus_[k]->clear_run();
    }
  }

  std::uint64_t c = cycle_;
  std::uint64_t last_progress = c;
  for (;;) {
    bool progress = false;
    for (auto& s : spus_) progress |= s->commit(c);
    for (auto& s : spus_) progress |= s->issue(c);
    progress |= mem_->tick(c) > 0;
    bool done = mem_->idle();
    for (const auto& s : spus_) done = done && s->done();
    if (done) break;
    if (progress) last_progress = c;
    if (c - last_progress > config_.deadlock_cycles) {
      std::ostringstream msg;
      msg << "no progress for " << config_.deadlock_cycles << " cycles at cycle " << c << "; queued requests "
          << mem_->queued();
      for (const auto& s : spus_) {
        if (!s->done()) msg << "; spu " << s->id() << " occupancy " << s->occupancy();
      }
      throw DeadlockError(msg.str());
    }
    ++c;
  }
  cycle_ = c + 1;
  for (auto& s : spus_) s->clear_run();
  configured_.assign(spus_.size(), false);
  return c;
}

void CasperMachine::reset_stats() {
  require_segment("reset_stats");
  mem_->reset_stats();
  for (auto& s : spus_) s->reset_stats();
}

void CasperMachine::set_access_trace(std::ostream* out) {
  require_segment("set_access_trace");
  mem_->set_trace(out);
}

void CasperMachine::set_pipeline_trace(std::ostream* out) {
  pipeline_trace_ = out;
  for (auto& s : spus_) s->set_trace(out);
}

}  // namespace casper::sim
