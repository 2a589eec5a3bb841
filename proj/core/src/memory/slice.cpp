#include "casper/memory/slice.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "casper/error.hpp"
#include "casper/memory/physical_memory.hpp"

namespace casper::memory {

const char* to_string(AccessKind kind) noexcept {
  switch (kind) {
    case AccessKind::AlignedLoad: return "load";
    case AccessKind::UnalignedLoad: return "uload";
    case AccessKind::Store: return "store";
  }
  return "?";
}

LlcSlice::LlcSlice(unsigned id, SliceParams params, const AddressMap& map, Dram& dram)
    : id_(id), params_(params), map_(&map), dram_(&dram), tags_(params.sets(), params.associativity) {
  if (params_.sets() == 0) throw ConfigError("slice capacity too small for its associativity");
}

void LlcSlice::purge_mshrs(std::uint64_t cycle) {
  std::erase_if(mshr_fill_, [cycle](std::uint64_t fill) { return fill <= cycle; });
}

unsigned LlcSlice::mshrs_in_use(std::uint64_t cycle) {
  purge_mshrs(cycle);
  return static_cast<unsigned>(mshr_fill_.size());
}

bool LlcSlice::resident(std::uint64_t line_addr, std::uint64_t cycle) {
  const TagEntry* e = tags_.find(line_addr, set_of(line_addr));
  return e != nullptr && !e->pending(cycle);
}

SliceResponse LlcSlice::access(const SliceRequest& req, std::uint64_t cycle) {
  SliceResponse resp;
  if (last_accept_ == cycle) {
    ++stats_.rejections;
    resp.retry_cycle = cycle + 1;
    return resp;
  }

  std::array<std::uint64_t, 2> lines{};
  std::size_t n_lines = 1;
  if (req.line_addr % kLineBytes != 0) throw AddressFault("slice request not line aligned", req.line_addr);
  if (req.kind == AccessKind::UnalignedLoad) {
    const std::uint64_t start = shifted_address(req.line_addr, req.dir, req.amt);
    lines[0] = line_of(start);
    if (start % kLineBytes != 0) {
      lines[1] = lines[0] + kLineBytes;
      n_lines = 2;
    }
  } else {
    lines[0] = req.line_addr;
  }
  for (std::size_t i = 0; i < n_lines; ++i) {
    if (map_->map_slice(lines[i]) != id_) {
      throw Error("slice " + std::to_string(id_) + " received a line owned by slice " +
                  std::to_string(map_->map_slice(lines[i])));
    }
  }

  purge_mshrs(cycle);
  std::array<TagEntry*, 2> entries{};
  std::array<TagEntry*, 2> victims{};
  unsigned need_mshrs = 0;
  bool hit = true;
  for (std::size_t i = 0; i < n_lines; ++i) {
    const auto set = set_of(lines[i]);
    entries[i] = tags_.find(lines[i], set);
    if (entries[i] == nullptr) {
      hit = false;
      ++need_mshrs;
      victims[i] = tags_.victim(set, cycle);
      // Two absent lines of one request never share a set, so victims are distinct.
      if (victims[i] == nullptr) {
        ++stats_.rejections;
        resp.retry_cycle = cycle + 1;
        return resp;
      }
    } else if (entries[i]->pending(cycle)) {
      hit = false;
    }
  }
  if (mshr_fill_.size() + need_mshrs > params_.mshrs) {
    ++stats_.rejections;
    resp.retry_cycle = *std::min_element(mshr_fill_.begin(), mshr_fill_.end());
    return resp;
  }

  last_accept_ = cycle;
  resp.accepted = true;
  resp.hit = hit;
  std::uint64_t data_at = cycle;
  for (std::size_t i = 0; i < n_lines; ++i) {
    TagEntry* e = entries[i];
    if (e == nullptr) {
      e = victims[i];
      if (e->valid()) {
        if (e->dirty) {
          dram_->write(e->line, cycle);
          ++resp.dram_writes;
        }
        if (evict_hook_) evict_hook_(e->line, e->dirty);
      }
      *e = TagEntry{};
      e->line = lines[i];
      e->ready_at = dram_->read(lines[i], cycle);
      ++resp.dram_reads;
      mshr_fill_.push_back(e->ready_at);
    }
    data_at = std::max(data_at, e->ready_at);
    tags_.touch(*e);
    if (req.kind == AccessKind::Store) e->dirty = true;
  }

  if (hit) ++stats_.hits;
  else ++stats_.misses;
  switch (req.kind) {
    case AccessKind::Store:
      ++stats_.stores;
      resp.ready_cycle = cycle;
      break;
    case AccessKind::UnalignedLoad:
      ++stats_.unaligned_loads;
      [[fallthrough]];
    case AccessKind::AlignedLoad:
      ++stats_.loads;
      resp.ready_cycle = data_at + params_.hit_latency;
      break;
  }
  return resp;
}

}  // namespace casper::memory
