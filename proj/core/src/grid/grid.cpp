#include "casper/grid/grid.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "casper/error.hpp"

namespace casper::grid {

std::size_t Extents::stride(int d) const noexcept {
  std::size_t s = 1;
  for (int k = dims - 1; k > d; --k) s *= n[static_cast<std::size_t>(k)];
  return s;
}

Extents make_extents(std::initializer_list<std::size_t> outermost_first) {
  if (outermost_first.size() < 1 || outermost_first.size() > 3) throw DimensionError("grids have 1 to 3 dimensions");
  Extents e;
  e.dims = static_cast<int>(outermost_first.size());
  std::size_t i = 0;
  for (auto v : outermost_first) {
    if (v == 0) throw DimensionError("extents must be positive");
    e.n[i++] = v;
  }
  return e;
}

Extents parse_extents(const std::string& text) {
  std::vector<std::size_t> xyz;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, 'x')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(token, &pos);
    } catch (const std::exception&) {
      throw DimensionError("bad extents '" + text + "'");
    }
    if (pos != token.size() || v == 0) throw DimensionError("bad extents '" + text + "'");
    xyz.push_back(static_cast<std::size_t>(v));
  }
  if (xyz.empty() || xyz.size() > 3) throw DimensionError("bad extents '" + text + "'");
  Extents e;
  e.dims = static_cast<int>(xyz.size());
  for (std::size_t i = 0; i < xyz.size(); ++i) e.n[xyz.size() - 1 - i] = xyz[i];
  return e;
}

std::string format_extents(const Extents& e) {
  std::string s;
  for (int d = e.dims - 1; d >= 0; --d) {
    s += std::to_string(e.n[static_cast<std::size_t>(d)]);
    if (d > 0) s += 'x';
  }
  return s;
}

Grid::Grid(Extents extents, std::uint64_t base_addr) : extents_(extents), data_(extents.size(), 0.0) {
  set_base_addr(base_addr);
}

void Grid::set_base_addr(std::uint64_t addr) {
  if (addr % 8 != 0) throw DimensionError("grid base address must be 8-byte aligned");
  base_addr_ = addr;
}

std::size_t Grid::linear(std::size_t i0, std::size_t i1, std::size_t i2) const noexcept {
  switch (extents_.dims) {
    case 1: return i0;
    case 2: return i0 * extents_.n[1] + i1;
    default: return (i0 * extents_.n[1] + i1) * extents_.n[2] + i2;
  }
}

bool Grid::operator==(const Grid& o) const noexcept {
  return extents_ == o.extents_ && first_difference(*this, o) == size();
}

void fill_random(Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& v : g.data()) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t checksum(std::span<const double> data) {
  std::uint64_t h = kFnvOffsetBasis;
  for (double v : data) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= kFnvPrime;
    }
  }
  return h;
}

std::uint64_t checksum(const Grid& g) { return checksum(g.data()); }

std::size_t first_difference(const Grid& a, const Grid& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return i;
  }
  return a.size() == b.size() ? a.size() : n;
}

namespace {

constexpr char kGridMagic[4] = {'C', 'G', 'R', 'D'};
constexpr std::uint16_t kGridVersion = 1;

template <typename T>
void put_le(std::ostream& out, T v) {
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) bits = std::bit_cast<std::uint64_t>(v);
  else bits = static_cast<std::uint64_t>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& in, std::size_t bytes) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw Error("truncated grid file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_grid(std::ostream& out, const Grid& g) {
  out.write(kGridMagic, 4);
  put_le<std::uint16_t>(out, kGridVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(g.dims()));
  for (auto n : g.extents().n) put_le<std::uint64_t>(out, n);
  for (double v : g.data()) put_le<double>(out, v);
}

Grid read_grid(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kGridMagic, 4) != 0) throw Error("not a grid file");
  if (get_le(in, 2) != kGridVersion) throw Error("unsupported grid file version");
  Extents e;
  e.dims = static_cast<int>(get_le(in, 2));
  if (e.dims < 1 || e.dims > 3) throw Error("grid file has invalid dimension count");
  for (auto& n : e.n) n = static_cast<std::size_t>(get_le(in, 8));
  Grid g(e);
  for (auto& v : g.data()) v = std::bit_cast<double>(get_le(in, 8));
  return g;
}

}  // namespace casper::grid
