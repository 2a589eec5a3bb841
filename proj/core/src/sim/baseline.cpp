#include "casper/sim/baseline.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "casper/error.hpp"
#include "casper/isa/kernel.hpp"

namespace casper::sim {

using memory::kLineBytes;
using memory::kNever;
using memory::TagArray;
using memory::TagEntry;

namespace {

constexpr std::uint64_t kStall = kNever - 1;

// Outstanding fills of one cache level; kNever marks fills still waiting on the LLC.
class MshrFile {
 public:
  explicit MshrFile(unsigned capacity) : capacity_(capacity) {}

  bool full(std::uint64_t now) {
    std::erase_if(entries_, [now](const auto& e) { return e.second <= now; });
    return entries_.size() >= capacity_;
  }
  void add(std::uint64_t line, std::uint64_t fill) { entries_.emplace_back(line, fill); }
  void resolve(std::uint64_t line, std::uint64_t fill) {
    for (auto& e : entries_) {
      if (e.first == line && e.second == kNever) e.second = fill;
    }
  }
  void clear() { entries_.clear(); }

 private:
  unsigned capacity_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries_;
};

std::size_t sets_of(const CacheLevelParams& p) { return p.capacity_bytes / kLineBytes / p.associativity; }

}  // namespace

CoreStats& CoreStats::operator+=(const CoreStats& o) {
  instructions += o.instructions;
  groups += o.groups;
  load_accesses += o.load_accesses;
  load_completions += o.load_completions;
  stores += o.stores;
  l1_hits += o.l1_hits;
  l1_misses += o.l1_misses;
  l2_hits += o.l2_hits;
  l2_misses += o.l2_misses;
  prefetches += o.prefetches;
  writebacks += o.writebacks;
  coherence_transfers += o.coherence_transfers;
  invalidations += o.invalidations;
  stall_cycles += o.stall_cycles;
  finish_cycle = std::max(finish_cycle, o.finish_cycle);
  return *this;
}

std::vector<std::vector<CoreTask>> partition_rows(const isa::StencilKernel& kernel, const grid::Grid& output,
                                                  unsigned cores) {
  auto rows = interior_rows(kernel, output.extents());
  std::vector<CoreTask> pieces;
  if (rows.size() >= cores) {
    for (const auto& r : rows) pieces.push_back({r.start, r.n});
  } else {
    const std::size_t per_row = (cores + rows.size() - 1) / rows.size();
    for (const auto& r : rows) {
      const std::size_t chunk = memory::round_up((r.n + per_row - 1) / per_row, memory::kLanes);
      std::size_t at = r.start;
      const std::size_t end = r.start + r.n;
      while (at < end) {
        // Cut where the output address is line aligned so no line has two writers.
        std::size_t cut = std::min(end, at + chunk);
        if (cut < end) {
          const std::uint64_t addr = output.address_of(cut);
          cut -= (addr % kLineBytes) / memory::kElementBytes;
          if (cut <= at) cut = std::min(end, at + chunk);
        }
        pieces.push_back({at, cut - at});
        at = cut;
      }
    }
  }
  std::vector<std::vector<CoreTask>> out(cores);
  for (std::size_t i = 0; i < pieces.size(); ++i) out[i * cores / pieces.size()].push_back(pieces[i]);
  return out;
}

class Core final : public memory::MemClient {
 public:
  Core(unsigned id, BaselineSystem& sys)
      : id_(id),
        sys_(&sys),
        p_(sys.config_.baseline),
        l1_(sets_of(p_.l1), p_.l1.associativity),
        l2_(sets_of(p_.l2), p_.l2.associativity),
        l1_mshr_(p_.l1.mshrs),
        l2_mshr_(p_.l2.mshrs) {}

  void begin(std::vector<CoreTask> tasks, const isa::StencilKernel& kernel, const grid::Grid& in,
             const grid::Grid& out) {
    tasks_ = std::move(tasks);
    points_ = isa::canonical_points(kernel);
    in_ = &in;
    out_ = &out;
    disp_.clear();
    const auto& e = out.extents();
    for (const auto& pt : points_) {
      std::int64_t elems = 0;
      for (int d = 0; d < e.dims; ++d) {
        elems += static_cast<std::int64_t>(pt.offset[static_cast<std::size_t>(d)]) *
                 static_cast<std::int64_t>(e.stride(d));
      }
      disp_.push_back(elems * static_cast<std::int64_t>(memory::kElementBytes));
    }
    task_ = 0;
    group_ = 0;
    start_group();
  }

  bool done() const noexcept { return task_ >= tasks_.size() && outbound_.empty(); }

  bool step(std::uint64_t cycle) {
    bool progress = false;
    while (!outbound_.empty() && outbound_.top().depart <= cycle) {
      const auto r = outbound_.top();
      outbound_.pop();
      sys_->mem_->request_line(id_, r.kind, r.line, cycle, r.kind == memory::AccessKind::Store ? nullptr : this,
                               r.line);
      progress = true;
    }
    progress |= issue(cycle);
    if (!progress && !done()) ++stats.stall_cycles;
    if (done()) stats.finish_cycle = std::max(stats.finish_cycle, cycle);
    return progress;
  }

  // Directory callbacks from other cores and the LLC.
  void downgrade(std::uint64_t line, std::uint64_t cycle) {
    bool dirty = false;
    for (auto* e : {find1(line), find2(line)}) {
      if (e == nullptr) continue;
      dirty = dirty || e->dirty;
      e->dirty = false;
      e->exclusive = false;
    }
    if (dirty) writeback(line, cycle);
  }

  /// Drops private copies; returns whether one of them was dirty.
  bool invalidate(std::uint64_t line) {
    bool dirty = false;
    for (auto* e : {find1(line), find2(line)}) {
      if (e == nullptr || e->ready_at == kNever) continue;
      dirty = dirty || e->dirty;
      *e = TagEntry{};
    }
    ++stats.invalidations;
    return dirty;
  }

  void on_load(std::uint64_t tag, std::uint64_t ready_cycle, const memory::LineData&, std::uint8_t, bool) override {
    const std::uint64_t line = tag;
    std::uint64_t extra = 0;
    if (auto it = pending_extra_.find(line); it != pending_extra_.end()) {
      extra = it->second;
      pending_extra_.erase(it);
    }
    const std::uint64_t arrival = ready_cycle + p_.l3_extra_latency + extra;
    for (auto* e : {find1(line), find2(line)}) {
      if (e != nullptr && e->ready_at == kNever) e->ready_at = arrival;
    }
    l1_mshr_.resolve(line, arrival);
    l2_mshr_.resolve(line, arrival);
    auto it = waiters_.find(line);
    if (it == waiters_.end()) return;
    for (const auto point : it->second) {
      ready_[point] = std::max(ready_[point], arrival);
      --parts_pending_[point];
      ++stats.load_completions;
    }
    waiters_.erase(it);
  }

  void on_store_accepted(std::uint64_t, std::uint64_t) override {}

  CoreStats stats;

 private:
  // Code shape per output vector: all loads, the dependent MAC chain, one
  // masked store and two loop instructions.
  enum class Stage { Loads, Macs, Store };

  struct Outbound {
    std::uint64_t depart;
    std::uint64_t seq;
    memory::AccessKind kind;
    std::uint64_t line;
    bool operator>(const Outbound& o) const noexcept { return depart != o.depart ? depart > o.depart : seq > o.seq; }
  };
  struct Fill {
    std::uint64_t ready;
    bool exclusive;
  };

  std::size_t set1(std::uint64_t line) const noexcept { return (line / kLineBytes) % l1_.sets(); }
  std::size_t set2(std::uint64_t line) const noexcept { return (line / kLineBytes) % l2_.sets(); }
  TagEntry* find1(std::uint64_t line) noexcept { return l1_.find(line, set1(line)); }
  TagEntry* find2(std::uint64_t line) noexcept { return l2_.find(line, set2(line)); }

  const CoreTask& task() const noexcept { return tasks_[task_]; }
  std::uint64_t lead() const noexcept {
    return (out_->address_of(task().out_linear) % kLineBytes) / memory::kElementBytes;
  }
  std::uint64_t groups() const noexcept {
    return (lead() + task().n_elements + memory::kLanes - 1) / memory::kLanes;
  }
  std::uint64_t window_addr(std::size_t point) const noexcept {
    const auto base = static_cast<std::int64_t>(in_->address_of(task().out_linear)) + disp_[point];
    return static_cast<std::uint64_t>(base) - lead() * memory::kElementBytes + group_ * kLineBytes;
  }
  std::uint64_t out_line() const noexcept {
    return out_->address_of(task().out_linear) - lead() * memory::kElementBytes + group_ * kLineBytes;
  }
  std::uint8_t mask() const noexcept {
    unsigned lo = 0, hi = memory::kLanes;
    if (group_ == 0) lo = static_cast<unsigned>(lead());
    if (group_ + 1 == groups()) hi = static_cast<unsigned>((lead() + task().n_elements - 1) % memory::kLanes + 1);
    std::uint8_t m = 0;
    for (unsigned l = lo; l < hi; ++l) m |= static_cast<std::uint8_t>(1u << l);
    return m;
  }

  void start_group() {
    stage_ = Stage::Loads;
    point_ = 0;
    part_ = 0;
    acc_ready_ = 0;
    ready_.assign(points_.size(), 0);
    parts_pending_.assign(points_.size(), 0);
  }

  void send(memory::AccessKind kind, std::uint64_t line, std::uint64_t depart) {
    outbound_.push(Outbound{depart, out_seq_++, kind, line});
  }
  void writeback(std::uint64_t line, std::uint64_t cycle) {
    ++stats.writebacks;
    send(memory::AccessKind::Store, line, cycle);
  }

  std::uint64_t forward_latency(unsigned other) const {
    const auto& noc = sys_->mem_->noc();
    return 2 * noc.hops(id_, other) * noc.params().hop_latency + p_.l2.latency;
  }

  bool dir_read(std::uint64_t line, std::uint64_t cycle, std::uint64_t& extra) {
    auto& d = sys_->directory_[line];
    if (d.owner >= 0 && d.owner != static_cast<int>(id_)) {
      sys_->cores_[static_cast<std::size_t>(d.owner)]->downgrade(line, cycle);
      extra = forward_latency(static_cast<unsigned>(d.owner));
      ++stats.coherence_transfers;
      d.owner = -1;
    }
    d.sharers |= 1u << id_;
    const bool sole = d.sharers == (1u << id_);
    if (sole) d.owner = static_cast<int>(id_);
    return sole;
  }

  void dir_write(std::uint64_t line, std::uint64_t& extra) {
    auto& d = sys_->directory_[line];
    for (unsigned s = 0; s < sys_->cores_.size(); ++s) {
      if (s == id_ || (d.sharers & (1u << s)) == 0) continue;
      sys_->cores_[s]->invalidate(line);
      if (d.owner == static_cast<int>(s)) {
        extra = forward_latency(s);
        ++stats.coherence_transfers;
      }
    }
    d.sharers = 1u << id_;
    d.owner = static_cast<int>(id_);
  }

  // Write hit on a shared copy: invalidate the other sharers and tell the LLC.
  void upgrade(std::uint64_t line, std::uint64_t cycle) {
    std::uint64_t extra = 0;
    dir_write(line, extra);
    send(memory::AccessKind::Store, line, cycle);
    for (auto* e : {find1(line), find2(line)}) {
      if (e != nullptr) e->exclusive = true;
    }
  }

  void evict_l1(TagEntry& v) {
    if (v.valid() && v.dirty) {
      if (auto* e2 = find2(v.line)) {
        e2->dirty = true;
        ++stats.l2_hits;
      } else {
        writeback(v.line, sys_->cycle_);
      }
    }
    v = TagEntry{};
  }

  void evict_l2(TagEntry& v, std::uint64_t cycle) {
    if (!v.valid()) return;
    bool dirty = v.dirty;
    if (auto* e1 = find1(v.line); e1 != nullptr && e1->ready_at != kNever) {
      dirty = dirty || e1->dirty;
      *e1 = TagEntry{};
    }
    if (dirty) writeback(v.line, cycle);
    if (auto it = sys_->directory_.find(v.line); it != sys_->directory_.end()) {
      it->second.sharers &= ~(1u << id_);
      if (it->second.owner == static_cast<int>(id_)) it->second.owner = -1;
      if (it->second.sharers == 0) sys_->directory_.erase(it);
    }
    v = TagEntry{};
  }

  Fill fill_l2(std::uint64_t line, std::uint64_t cycle, bool write) {
    if (auto* e2 = find2(line)) {
      ++stats.l2_hits;
      l2_.touch(*e2);
      if (write && !e2->exclusive) upgrade(line, cycle);
      const std::uint64_t ready = e2->ready_at == kNever ? kNever : std::max(e2->ready_at, cycle + p_.l2.latency);
      return {ready, e2->exclusive};
    }
    ++stats.l2_misses;
    TagEntry* v2 = l2_.victim(set2(line), cycle);
    evict_l2(*v2, cycle);
    std::uint64_t extra = 0;
    bool exclusive = true;
    if (write) {
      dir_write(line, extra);
    } else {
      exclusive = dir_read(line, cycle, extra);
    }
    *v2 = TagEntry{};
    v2->line = line;
    v2->ready_at = kNever;
    v2->exclusive = exclusive;
    l2_.touch(*v2);
    l2_mshr_.add(line, kNever);
    pending_extra_[line] = extra;
    send(memory::AccessKind::AlignedLoad, line, cycle + p_.l2.latency);
    return {kNever, exclusive};
  }

  bool can_fill(std::uint64_t line, std::uint64_t cycle) {
    if (l1_mshr_.full(cycle) || l1_.victim(set1(line), cycle) == nullptr) return false;
    if (find2(line) == nullptr && (l2_mshr_.full(cycle) || l2_.victim(set2(line), cycle) == nullptr)) return false;
    return true;
  }

  void install_l1(std::uint64_t line, std::uint64_t cycle, bool write, bool prefetched) {
    TagEntry* v1 = l1_.victim(set1(line), cycle);
    evict_l1(*v1);
    const Fill f = fill_l2(line, cycle, write);
    *v1 = TagEntry{};
    v1->line = line;
    v1->ready_at = f.ready;
    v1->dirty = write;
    v1->exclusive = f.exclusive || write;
    v1->prefetched = prefetched;
    l1_.touch(*v1);
    l1_mshr_.add(line, f.ready);
  }

  void prefetch(std::uint64_t line, std::uint64_t cycle) {
    if (!p_.prefetch) return;
    const auto& mem = sys_->mem_->memory();
    for (unsigned k = 1; k <= p_.prefetch_degree; ++k) {
      const std::uint64_t pl = line + k * kLineBytes;
      if (!mem.contains(pl, kLineBytes)) break;
      if (find1(pl) != nullptr) continue;
      if (!can_fill(pl, cycle)) break;
      install_l1(pl, cycle, false, true);
      ++stats.prefetches;
    }
  }

  // Returns the cycle the line is usable, kNever while it waits on the LLC,
  // or kStall when no miss resources are free.
  std::uint64_t access(std::uint64_t line, std::uint64_t cycle, bool write) {
    if (auto* e = find1(line)) {
      ++stats.l1_hits;
      l1_.touch(*e);
      if (write && !e->exclusive) upgrade(line, cycle);
      if (write) e->dirty = true;
      const std::uint64_t ready = e->ready_at == kNever ? kNever : std::max(e->ready_at, cycle + p_.l1.latency);
      if (e->prefetched) {
        e->prefetched = false;
        prefetch(line, cycle);
      }
      return ready;
    }
    if (!can_fill(line, cycle)) return kStall;
    ++stats.l1_misses;
    install_l1(line, cycle, write, false);
    const std::uint64_t ready = find1(line)->ready_at;
    prefetch(line, cycle);
    return ready;
  }

  bool issue(std::uint64_t cycle) {
    bool progress = false;
    unsigned slots = p_.issue_width;
    unsigned load_ports = p_.l1.load_ports;
    unsigned store_ports = p_.l1.store_ports;
    while (slots > 0 && task_ < tasks_.size()) {
      if (stage_ == Stage::Loads) {
        if (load_ports == 0) break;
        const std::uint64_t addr = window_addr(point_);
        const bool split = addr % kLineBytes != 0;
        const std::uint64_t line = memory::line_of(addr) + (part_ == 1 ? kLineBytes : 0);
        const std::uint64_t r = access(line, cycle, false);
        if (r == kStall) break;
        ++stats.load_accesses;
        --load_ports;
        progress = true;
        if (r == kNever) {
          waiters_[line].push_back(point_);
          ++parts_pending_[point_];
        } else {
          ready_[point_] = std::max(ready_[point_], r);
          ++stats.load_completions;
        }
        if (split && part_ == 0) {
          part_ = 1;
          continue;
        }
        part_ = 0;
        --slots;
        if (++point_ == points_.size()) {
          stage_ = Stage::Macs;
          point_ = 0;
        }
      } else if (stage_ == Stage::Macs) {
        // In-order issue: the MAC waits for its operand and for the previous MAC.
        if (parts_pending_[point_] > 0 || ready_[point_] > cycle || acc_ready_ > cycle) break;
        acc_ready_ = cycle + p_.fma_latency;
        --slots;
        progress = true;
        if (++point_ == points_.size()) stage_ = Stage::Store;
      } else {
        if (acc_ready_ > cycle || store_ports == 0) break;
        const std::uint64_t line = out_line();
        if (access(line, cycle, true) == kStall) break;

        // The architectural result, accumulated in canonical order.
        auto& mem = sys_->mem_->memory();
        memory::LineData acc{};
        for (std::size_t p = 0; p < points_.size(); ++p) {
          const auto w = mem.read_window(window_addr(p));
          for (unsigned l = 0; l < memory::kLanes; ++l) acc[l] += points_[p].coefficient * w[l];
        }
        mem.write_line(line, acc, mask());

        --store_ports;
        slots = slots > 3 ? slots - 3 : 0;
        progress = true;
        ++stats.stores;
        ++stats.groups;
        stats.instructions += 2 * points_.size() + 3;
        if (++group_ == groups()) {
          group_ = 0;
          ++task_;
        }
        start_group();
      }
    }
    return progress;
  }

  unsigned id_;
  BaselineSystem* sys_;
  const BaselineParams& p_;
  TagArray l1_;
  TagArray l2_;
  MshrFile l1_mshr_;
  MshrFile l2_mshr_;

  std::vector<CoreTask> tasks_;
  std::vector<isa::StencilPoint> points_;
  std::vector<std::int64_t> disp_;
  const grid::Grid* in_ = nullptr;
  const grid::Grid* out_ = nullptr;
  std::size_t task_ = 0;
  std::uint64_t group_ = 0;
  Stage stage_ = Stage::Loads;
  std::size_t point_ = 0;
  unsigned part_ = 0;
  std::uint64_t acc_ready_ = 0;
  std::vector<std::uint64_t> ready_;
  std::vector<unsigned> parts_pending_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> waiters_;
  std::unordered_map<std::uint64_t, std::uint64_t> pending_extra_;
  std::priority_queue<Outbound, std::vector<Outbound>, std::greater<>> outbound_;
  std::uint64_t out_seq_ = 0;
};

BaselineSystem::BaselineSystem(const SimConfig& config, memory::MemorySystem& mem) : config_(config), mem_(&mem) {
  config_.validate();
  if (config_.baseline.cores > 32) throw ConfigError("the directory tracks at most 32 cores");
  for (unsigned c = 0; c < config_.baseline.cores; ++c) cores_.push_back(std::make_unique<Core>(c, *this));
  for (unsigned s = 0; s < mem.n_slices(); ++s) {
    mem.slice(s).set_evict_hook([this](std::uint64_t line, bool) { on_llc_evict(line); });
  }
}

BaselineSystem::~BaselineSystem() {
  for (unsigned s = 0; s < mem_->n_slices(); ++s) mem_->slice(s).set_evict_hook(nullptr);
}

void BaselineSystem::on_llc_evict(std::uint64_t line) {
  auto it = directory_.find(line);
  if (it == directory_.end()) return;
  // Inclusive LLC: private copies go too, and dirty data goes straight to DRAM.
  for (unsigned c = 0; c < cores_.size(); ++c) {
    if ((it->second.sharers & (1u << c)) != 0 && cores_[c]->invalidate(line)) mem_->dram().write(line, cycle_);
  }
  directory_.erase(it);
}

std::uint64_t BaselineSystem::run_step(const isa::StencilKernel& kernel, const grid::Grid& input,
                                       const grid::Grid& output) {
  auto tasks = partition_rows(kernel, output, static_cast<unsigned>(cores_.size()));
  for (std::size_t c = 0; c < cores_.size(); ++c) cores_[c]->begin(std::move(tasks[c]), kernel, input, output);

  std::uint64_t c = cycle_;
  std::uint64_t last_progress = c;
  for (;;) {
    cycle_ = c;
    bool progress = false;
    for (auto& core : cores_) progress |= core->step(c);
    progress |= mem_->tick(c) > 0;
    bool done = mem_->idle();
    for (const auto& core : cores_) done = done && core->done();
    if (done) break;
    if (progress) last_progress = c;
    if (c - last_progress > config_.deadlock_cycles) {
      std::ostringstream msg;
      msg << "baseline made no progress for " << config_.deadlock_cycles << " cycles at cycle " << c;
      throw DeadlockError(msg.str());
    }
    ++c;
  }
  cycle_ = c + 1;
  return c;
}

CoreStats BaselineSystem::stats() const {
  CoreStats total;
  for (const auto& c : cores_) total += c->stats;
  return total;
}

void BaselineSystem::reset_stats() {
  for (auto& c : cores_) c->stats = CoreStats{};
  mem_->reset_stats();
}

}  // namespace casper::sim
