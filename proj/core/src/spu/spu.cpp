#include "casper/spu/spu.hpp"

#include <algorithm>

#include "casper/error.hpp"

namespace casper::spu {

namespace {

constexpr std::uint64_t kStoreTag = 1ULL << 63;

}  // namespace

Spu::Spu(unsigned id, memory::MemorySystem& mem, SpuParams params) : id_(id), mem_(&mem), params_(params) {
  if (params_.load_queue_entries == 0) throw ConfigError("load queue needs at least one entry");
}

void Spu::load_program(const isa::StencilProgram& program) {
  if (active_ && !finished_) throw ConfigError("cannot reprogram a running SPU");
  if (program.instructions.empty() || program.instructions.size() > isa::kInstructionBufferSize) {
    throw ConfigError("program does not fit the instruction buffer");
  }
  program_ = program;
  has_program_ = true;
}

void Spu::set_constant(unsigned idx, double value) {
  if (idx >= isa::kConstantSlots) throw ConfigError("constant index " + std::to_string(idx) + " out of range");
  constants_[idx] = value;
}

void Spu::set_stream(unsigned idx, std::uint64_t start_addr) {
  if (idx >= isa::kStreamSlots) throw ConfigError("stream index " + std::to_string(idx) + " out of range");
  if (start_addr % memory::kElementBytes != 0) throw ConfigError("stream start must be 8-byte aligned");
  streams_[idx] = StreamDescriptor{start_addr, 8, n_elements_, 0, true};
}

void Spu::set_n_elements(std::uint64_t n) {
  n_elements_ = n;
  n_set_ = true;
  for (auto& s : streams_) s.n_elements = n;
}

void Spu::clear_run() {
  if (active_ && !finished_) throw ConfigError("cannot reconfigure a running SPU");
  streams_ = {};
  n_elements_ = 0;
  n_set_ = false;
  active_ = false;
  finished_ = false;
}

std::uint8_t Spu::group_mask(std::uint64_t group) const noexcept {
  unsigned lo = 0, hi = memory::kLanes;
  if (group == 0) lo = static_cast<unsigned>(lead_);
  if (group + 1 == groups_) hi = static_cast<unsigned>((lead_ + n_elements_ - 1) % memory::kLanes + 1);
  std::uint8_t mask = 0;
  for (unsigned l = lo; l < hi; ++l) mask |= static_cast<std::uint8_t>(1u << l);
  return mask;
}

void Spu::start(std::uint64_t cycle) {
  if (!n_set_ || n_elements_ == 0) {
    active_ = false;
    finished_ = true;
    stats_.finish_cycle = std::max(stats_.finish_cycle, cycle);
    return;
  }
  if (!has_program_) throw ConfigError("SPU " + std::to_string(id_) + " started without stencil code");
  const unsigned out = program_.output_stream_idx;
  if (!streams_[out].configured) throw ConfigError("SPU " + std::to_string(id_) + " has no output stream");
  for (unsigned s = 0; s < program_.n_input_streams; ++s) {
    if (!streams_[s].configured) {
      throw ConfigError("SPU " + std::to_string(id_) + " input stream " + std::to_string(s) + " not configured");
    }
  }
  lead_ = (streams_[out].start_addr % memory::kLineBytes) / memory::kElementBytes;
  groups_ = (lead_ + n_elements_ + memory::kLanes - 1) / memory::kLanes;
  issue_groups_left_ = groups_;
  commit_group_ = 0;
  pc_ = 0;
  for (auto& s : streams_) s.position = 0;
  issue_pos_.fill(0);
  acc_.fill(0.0);
  active_ = true;
  finished_ = false;
  trace(cycle, "start", 0);
}

bool Spu::issue(std::uint64_t cycle) {
  if (!active_ || finished_ || issue_groups_left_ == 0) return false;
  if (occupancy() >= params_.load_queue_entries) return false;

  const auto& instr = program_.instructions[pc_];
  const unsigned s = instr.stream_idx;
  const auto shift = static_cast<std::int64_t>(instr.element_shift()) * static_cast<std::int64_t>(memory::kElementBytes);
  const std::uint64_t addr = aligned_base(s) + issue_pos_[s] + static_cast<std::uint64_t>(shift);

  Entry e;
  e.seq = next_seq_++;
  e.issue_cycle = cycle;
  e.pc = static_cast<std::uint8_t>(pc_);
  lq_.push_back(e);
  try {
    lq_.back().parts_pending = static_cast<std::uint8_t>(mem_->load_window(id_, addr, cycle, this, e.seq));
  } catch (const AddressFault& f) {
    throw AddressFault("SPU " + std::to_string(id_) + " pc " + std::to_string(pc_) + " stream " + std::to_string(s) +
                           ": " + f.what(),
                       f.address());
  }
  ++stats_.loads_issued;
  stats_.load_requests += lq_.back().parts_pending;
  stats_.max_occupancy = std::max<std::uint64_t>(stats_.max_occupancy, occupancy());
  trace(cycle, "issue", pc_);

  if (instr.advance_stream) issue_pos_[s] += memory::kLineBytes;
  if (++pc_ == program_.instructions.size()) {
    pc_ = 0;
    --issue_groups_left_;
  }
  return true;
}

bool Spu::commit(std::uint64_t cycle) {
  if (!active_ || finished_) return false;
  ++stats_.active_cycles;
  if (lq_.empty() || lq_.front().parts_pending != 0 || lq_.front().ready > cycle) {
    ++stats_.stall_cycles;
    return false;
  }
  const Entry head = lq_.front();
  lq_.pop_front();
  if (any_committed_ && head.seq != last_committed_seq_ + 1) ++stats_.order_violations;
  last_committed_seq_ = head.seq;
  any_committed_ = true;

  const auto& instr = program_.instructions[head.pc];
  if (instr.clear_acc) acc_.fill(0.0);
  const double c = constants_[instr.const_idx];
  for (unsigned l = 0; l < memory::kLanes; ++l) acc_[l] += c * head.data[l];
  ++stats_.committed;
  trace(cycle, "commit", head.pc);

  if (instr.enable_output) {
    auto& out = streams_[program_.output_stream_idx];
    const std::uint64_t line = memory::line_of(out.start_addr) + out.position;
    ++pending_stores_;
    ++stats_.stores;
    mem_->store_line(id_, line, acc_, group_mask(commit_group_), cycle, this, kStoreTag | commit_group_);
    out.advance();
    ++commit_group_;
  }
  if (instr.advance_stream) streams_[instr.stream_idx].advance();
  return true;
}

void Spu::on_load(std::uint64_t tag, std::uint64_t ready_cycle, const memory::LineData& data, std::uint8_t lane_mask,
                  bool /*hit*/) {
  if (lq_.empty() || tag < lq_.front().seq) throw Error("SPU received a completion for a retired load");
  Entry& e = lq_[static_cast<std::size_t>(tag - lq_.front().seq)];
  for (unsigned l = 0; l < memory::kLanes; ++l) {
    if (lane_mask & (1u << l)) e.data[l] = data[l];
  }
  e.lanes |= lane_mask;
  ++stats_.load_completions;
  e.ready = std::max(e.ready, ready_cycle);
  --e.parts_pending;
}

void Spu::on_store_accepted(std::uint64_t /*tag*/, std::uint64_t cycle) {
  --pending_stores_;
  if (commit_group_ == groups_ && pending_stores_ == 0 && lq_.empty()) {
    finished_ = true;
    stats_.finish_cycle = std::max(stats_.finish_cycle, cycle);
    trace(cycle, "finish", 0);
  }
}

void Spu::trace(std::uint64_t cycle, const char* event, unsigned pc) {
  if (trace_ == nullptr) return;
  *trace_ << cycle << ' ' << id_ << ' ' << event << ' ' << pc;
  for (unsigned s = 0; s < program_.n_input_streams; ++s) *trace_ << ' ' << streams_[s].position;
  *trace_ << ' ' << streams_[program_.output_stream_idx].position << '\n';
}

}  // namespace casper::spu
