#pragma once

#include <cstdint>
#include <optional>

namespace casper::memory {

inline constexpr std::uint64_t kLineBytes = 64;
inline constexpr std::uint64_t kElementBytes = 8;
inline constexpr unsigned kLanes = 8;
inline constexpr std::uint64_t kDefaultBlockBytes = 128 * 1024;
inline constexpr unsigned kDefaultSlices = 16;

constexpr std::uint64_t line_of(std::uint64_t addr) noexcept { return addr & ~(kLineBytes - 1); }
constexpr std::uint64_t round_up(std::uint64_t v, std::uint64_t m) noexcept { return (v + m - 1) / m * m; }

/// Physically contiguous region that uses the block round-robin slice hash.
struct StencilSegment {
  std::uint64_t base = 0;
  std::uint64_t size = 0;

  bool contains(std::uint64_t addr) const noexcept { return addr >= base && addr - base < size; }
  std::uint64_t end() const noexcept { return base + size; }
};

/// Address-to-slice mapping. Addresses inside the segment map whole blocks
/// to slices round-robin; every other address is line-interleaved.
class AddressMap {
 public:
  AddressMap() = default;
  AddressMap(unsigned n_slices, std::uint64_t block_size, std::optional<StencilSegment> segment = std::nullopt);

  unsigned n_slices() const noexcept { return n_slices_; }
  std::uint64_t block_size() const noexcept { return block_size_; }
  const std::optional<StencilSegment>& segment() const noexcept { return segment_; }
  /// Distance after which the segment hash returns to the same slice.
  std::uint64_t period() const noexcept { return block_size_ * n_slices_; }

  unsigned map_slice(std::uint64_t addr) const noexcept {
    if (segment_ && segment_->contains(addr)) {
      return static_cast<unsigned>(((addr - segment_->base) / block_size_) % n_slices_);
    }
    return static_cast<unsigned>((addr / kLineBytes) % n_slices_);
  }

  /// Dense index of the line among all lines that map to the same slice;
  /// slices derive their set index from it.
  std::uint64_t slice_local_line(std::uint64_t addr) const noexcept {
    if (segment_ && segment_->contains(addr)) {
      const std::uint64_t rel = addr - segment_->base;
      const std::uint64_t lines_per_block = block_size_ / kLineBytes;
      return (rel / block_size_ / n_slices_) * lines_per_block + (rel % block_size_) / kLineBytes;
    }
    return addr / kLineBytes / n_slices_;
  }

  /// Same mapping with the segment hash removed (line interleave everywhere).
  AddressMap without_segment() const { return AddressMap(n_slices_, block_size_); }

 private:
  unsigned n_slices_ = kDefaultSlices;
  std::uint64_t block_size_ = kDefaultBlockBytes;
  std::optional<StencilSegment> segment_;
};

}  // namespace casper::memory
