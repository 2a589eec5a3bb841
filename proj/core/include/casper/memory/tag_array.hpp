#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace casper::memory {

inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

struct TagEntry {
  static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

  std::uint64_t line = kEmpty;  // full line address; kEmpty when invalid
  std::uint64_t lru = 0;
  std::uint64_t ready_at = 0;   // cycle at which the fill lands; kNever while unknown
  bool dirty = false;
  bool prefetched = false;      // filled by a prefetch and not yet demanded
  bool exclusive = false;       // writable without an upgrade (private caches only)

  bool valid() const noexcept { return line != kEmpty; }
  bool pending(std::uint64_t now) const noexcept { return ready_at > now; }
};

/// Set-associative tag store with true LRU. Holds no data.
class TagArray {
 public:
  TagArray(std::size_t sets, std::size_t ways) : sets_(sets), ways_(ways), entries_(sets * ways) {}

  std::size_t sets() const noexcept { return sets_; }
  std::size_t ways() const noexcept { return ways_; }

  TagEntry* find(std::uint64_t line, std::size_t set) noexcept {
    TagEntry* row = &entries_[set * ways_];
    for (std::size_t w = 0; w < ways_; ++w) {
      if (row[w].line == line) return &row[w];
    }
    return nullptr;
  }

  /// LRU entry of `set` that is not waiting on a fill, or nullptr.
  TagEntry* victim(std::size_t set, std::uint64_t now) noexcept {
    TagEntry* row = &entries_[set * ways_];
    TagEntry* best = nullptr;
    for (std::size_t w = 0; w < ways_; ++w) {
      if (!row[w].valid()) return &row[w];
      if (row[w].pending(now)) continue;
      if (best == nullptr || row[w].lru < best->lru) best = &row[w];
    }
    return best;
  }

  void touch(TagEntry& e) noexcept { e.lru = ++clock_; }

  template <typename F>
  void for_each(F&& f) {
    for (auto& e : entries_) f(e);
  }

 private:
  std::size_t sets_;
  std::size_t ways_;
  std::uint64_t clock_ = 0;
  std::vector<TagEntry> entries_;
};

}  // namespace casper::memory
