#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace casper::grid {

/// Per-dimension element counts, outermost first. Unused trailing entries are 1.
struct Extents {
  int dims = 1;
  std::array<std::size_t, 3> n{1, 1, 1};

  std::size_t size() const noexcept { return n[0] * n[1] * n[2]; }
  std::size_t inner() const noexcept { return n[static_cast<std::size_t>(dims - 1)]; }
  /// Row-major stride of dimension `d` in elements.
  std::size_t stride(int d) const noexcept;
  bool operator==(const Extents&) const = default;
};

/// Builds extents from outermost-first counts.
Extents make_extents(std::initializer_list<std::size_t> outermost_first);

/// Parses "X", "XxY" or "XxYxZ" with the contiguous dimension first, the
/// notation used for domain sizes ("512x256" is 256 rows of 512 elements).
Extents parse_extents(const std::string& text);
std::string format_extents(const Extents& e);

/// Dense row-major grid of doubles placed at a byte address of the simulated space.
class Grid {
 public:
  Grid() = default;
  explicit Grid(Extents extents, std::uint64_t base_addr = 0);

  const Extents& extents() const noexcept { return extents_; }
  int dims() const noexcept { return extents_.dims; }
  std::size_t size() const noexcept { return data_.size(); }
  std::uint64_t base_addr() const noexcept { return base_addr_; }
  void set_base_addr(std::uint64_t addr);
  std::uint64_t address_of(std::size_t linear) const noexcept { return base_addr_ + 8 * linear; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::size_t linear(std::size_t i0, std::size_t i1 = 0, std::size_t i2 = 0) const noexcept;

  bool operator==(const Grid& o) const noexcept;

 private:
  Extents extents_;
  std::uint64_t base_addr_ = 0;
  std::vector<double> data_;
};

/// Fills with doubles in [0, 1) from a seeded 64-bit Mersenne Twister; the
/// bit pattern is identical on every platform.
void fill_random(Grid& g, std::uint64_t seed);

/// FNV-1a over the little-endian byte image of the data.
std::uint64_t checksum(const Grid& g);
std::uint64_t checksum(std::span<const double> data);

inline constexpr std::uint64_t kFnvOffsetBasis = 0xCBF29CE484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

/// Index of the first element whose bit pattern differs, or size() when equal.
std::size_t first_difference(const Grid& a, const Grid& b);

/// Binary dump: "CGRD", u16 version, u16 dims, 3 x u64 extents (outermost
/// first), then the data as little-endian doubles.
void write_grid(std::ostream& out, const Grid& g);
Grid read_grid(std::istream& in);

}  // namespace casper::grid
