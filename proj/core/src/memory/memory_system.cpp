#include "casper/memory/memory_system.hpp"

#include <cmath>

#include "casper/error.hpp"

namespace casper::memory {

NocParams mesh_for(unsigned n_slices, NocParams base) {
  unsigned w = static_cast<unsigned>(std::sqrt(static_cast<double>(n_slices)));
  while (w > 1 && n_slices % w != 0) --w;
  if (w == 0) w = 1;
  base.height = w;
  base.width = n_slices / w;
  return base;
}

MemorySystem::MemorySystem(AddressMap map, PhysicalMemory memory, SliceParams slice, NocParams noc,
                           DramParams dram)
    : map_(std::move(map)), memory_(std::move(memory)), dram_(dram), noc_(noc) {
  if (noc_.nodes() != map_.n_slices()) throw ConfigError("mesh node count must equal the slice count");
  for (unsigned i = 0; i < map_.n_slices(); ++i) slices_.push_back(std::make_unique<LlcSlice>(i, slice, map_, dram_));
  queues_.resize(map_.n_slices());
}

unsigned MemorySystem::load_window(unsigned src, std::uint64_t addr, std::uint64_t cycle, MemClient* client,
                                   std::uint64_t tag) {
  if (!memory_.contains(addr, kLineBytes)) throw AddressFault("load window outside simulated space", addr);
  Request req;
  req.src = src;
  req.client = client;
  req.tag = tag;
  req.window = addr;
  const std::uint64_t first = line_of(addr);
  const std::uint64_t offset = addr - first;
  if (offset == 0) {
    req.kind = AccessKind::AlignedLoad;
    req.line_addr = first;
    req.slice = map_.map_slice(first);
    route(req, cycle, kElementBytes);
    return 1;
  }
  ++stats_.loads_unaligned;
  const std::uint64_t second = first + kLineBytes;
  if (map_.map_slice(first) == map_.map_slice(second)) {
    // Expressed as a backward shift from the following line.
    req.kind = AccessKind::UnalignedLoad;
    req.line_addr = second;
    req.dir = isa::ShiftDir::Backward;
    req.amt = static_cast<std::uint8_t>((kLineBytes - offset) / kElementBytes);
    req.slice = map_.map_slice(first);
    route(req, cycle, kElementBytes);
    return 1;
  }
  // The pair straddles a slice boundary: each slice returns its own line.
  ++stats_.split_loads;
  for (std::uint64_t line : {first, second}) {
    Request part = req;
    part.kind = AccessKind::AlignedLoad;
    part.line_addr = line;
    part.slice = map_.map_slice(line);
    route(part, cycle, kElementBytes);
  }
  return 2;
}

void MemorySystem::store_line(unsigned src, std::uint64_t line_addr, const LineData& data, std::uint8_t lane_mask,
                              std::uint64_t cycle, MemClient* client, std::uint64_t tag) {
  if (line_addr % kLineBytes != 0) throw AddressFault("store not line aligned", line_addr);
  if (!memory_.contains(line_addr, kLineBytes)) throw AddressFault("store outside simulated space", line_addr);
  Request req;
  req.kind = AccessKind::Store;
  req.line_addr = line_addr;
  req.src = src;
  req.slice = map_.map_slice(line_addr);
  req.client = client;
  req.tag = tag;
  req.store_data = data;
  req.store_mask = lane_mask;
  route(req, cycle, kLineBytes);
}

void MemorySystem::request_line(unsigned src, AccessKind kind, std::uint64_t line_addr, std::uint64_t cycle,
                                MemClient* client, std::uint64_t tag) {
  if (kind == AccessKind::UnalignedLoad) throw Error("tag-only requests are line aligned");
  Request req;
  req.kind = kind;
  req.line_addr = line_addr;
  req.window = line_addr;
  req.functional = false;
  req.src = src;
  req.slice = map_.map_slice(line_addr);
  req.client = client;
  req.tag = tag;
  route(req, cycle, kind == AccessKind::Store ? kLineBytes : kElementBytes);
}

void MemorySystem::route(Request req, std::uint64_t cycle, std::uint64_t payload_bytes) {
  const bool local = req.src == req.slice;
  if (req.kind == AccessKind::Store) {
    ++(local ? stats_.stores_local : stats_.stores_remote);
  } else {
    ++(local ? stats_.loads_local : stats_.loads_remote);
  }
  if (local) {
    queues_[req.slice].push_back(std::move(req));
    return;
  }
  const auto hop = noc_.transfer(req.src, req.slice, payload_bytes, cycle);
  in_flight_.push(Arrival{hop.arrival, seq_++, std::move(req)});
}

unsigned MemorySystem::tick(std::uint64_t cycle) {
  while (!in_flight_.empty() && in_flight_.top().cycle <= cycle) {
    const auto& top = in_flight_.top();
    queues_[top.req.slice].push_back(top.req);
    in_flight_.pop();
  }
  unsigned accepted = 0;
  for (unsigned s = 0; s < slices_.size(); ++s) {
    auto& q = queues_[s];
    if (q.empty()) continue;
    const Request& req = q.front();
    SliceRequest sreq{req.kind, req.line_addr, req.dir, req.amt};
    const auto resp = slices_[s]->access(sreq, cycle);
    if (!resp.accepted) continue;
    complete(req, resp, cycle);
    q.pop_front();
    ++accepted;
  }
  return accepted;
}

void MemorySystem::complete(const Request& req, const SliceResponse& resp, std::uint64_t cycle) {
  if (trace_ != nullptr) {
    *trace_ << cycle << ' ' << req.src << ' ' << req.slice << " 0x" << std::hex << req.line_addr << std::dec
            << ' ' << to_string(req.kind) << ' ' << (resp.hit ? "hit" : "miss") << '\n';
  }
  if (req.kind == AccessKind::Store) {
    if (req.functional) memory_.write_line(req.line_addr, req.store_data, req.store_mask);
    if (req.client != nullptr) req.client->on_store_accepted(req.tag, cycle);
    return;
  }
  ++stats_.load_completions;
  std::uint64_t ready = resp.ready_cycle;
  if (req.src != req.slice) ready = noc_.transfer(req.slice, req.src, kLineBytes, ready).arrival;

  LineData data{};
  std::uint8_t mask = 0xFF;
  if (req.functional) {
    if (req.kind == AccessKind::UnalignedLoad || req.window == req.line_addr) {
      data = memory_.read_window(req.window);
    } else {
      // One half of a split window: the lanes of the window inside this line.
      const LineData line = memory_.read_window(req.line_addr);
      mask = 0;
      for (unsigned lane = 0; lane < kLanes; ++lane) {
        const std::uint64_t a = req.window + lane * kElementBytes;
        if (a >= req.line_addr && a < req.line_addr + kLineBytes) {
          data[lane] = line[(a - req.line_addr) / kElementBytes];
          mask |= static_cast<std::uint8_t>(1u << lane);
        }
      }
    }
  }
  if (req.client != nullptr) req.client->on_load(req.tag, ready, data, mask, resp.hit);
}

bool MemorySystem::idle() const noexcept { return in_flight_.empty() && queued() == 0; }

std::size_t MemorySystem::queued() const noexcept {
  std::size_t n = 0;
  for (const auto& q : queues_) n += q.size();
  return n;
}

std::uint64_t MemorySystem::llc_hits() const {
  std::uint64_t n = 0;
  for (const auto& s : slices_) n += s->stats().hits;
  return n;
}

std::uint64_t MemorySystem::llc_misses() const {
  std::uint64_t n = 0;
  for (const auto& s : slices_) n += s->stats().misses;
  return n;
}

void MemorySystem::reset_stats() {
  stats_ = {};
  for (auto& s : slices_) s->reset_stats();
  noc_.reset_stats();
  dram_.reset_stats();
}

}  // namespace casper::memory
