#include "casper/grid/catalog.hpp"

#include <cstdlib>

#include "casper/error.hpp"

namespace casper::grid {

using isa::StencilKernel;
using isa::StencilPoint;

std::string to_string(SizeClass c) {
  switch (c) {
    case SizeClass::L2: return "l2";
    case SizeClass::L3: return "l3";
    case SizeClass::DRAM: return "dram";
  }
  return "?";
}

std::optional<SizeClass> parse_size_class(std::string_view text) {
  if (text == "l2" || text == "L2") return SizeClass::L2;
  if (text == "l3" || text == "L3") return SizeClass::L3;
  if (text == "dram" || text == "DRAM") return SizeClass::DRAM;
  return std::nullopt;
}

StencilKernel jacobi1d() {
  StencilKernel k{"jacobi1d", 1, {}};
  for (int dx = -1; dx <= 1; ++dx) k.points.push_back({{dx, 0, 0}, 1.0 / 3.0});
  return k;
}

StencilKernel pt7_1d() {
  StencilKernel k{"pt7_1d", 1, {}};
  for (int dx = -3; dx <= 3; ++dx) k.points.push_back({{dx, 0, 0}, 1.0 / 7.0});
  return k;
}

StencilKernel jacobi2d() {
  StencilKernel k{"jacobi2d", 2, {}};
  for (auto [dy, dx] : {std::pair{-1, 0}, {0, -1}, {0, 0}, {0, 1}, {1, 0}}) k.points.push_back({{dy, dx, 0}, 0.2});
  return k;
}

StencilKernel blur2d() {
  constexpr int w[5] = {1, 4, 6, 4, 1};
  StencilKernel k{"blur2d", 2, {}};
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      k.points.push_back({{dy, dx, 0}, w[dy + 2] * w[dx + 2] / 256.0});
    }
  }
  return k;
}

StencilKernel pt7_3d() {
  StencilKernel k{"pt7_3d", 3, {}};
  const isa::Offset offs[] = {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}, {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  for (const auto& o : offs) k.points.push_back({o, 1.0 / 7.0});
  return k;
}

StencilKernel pt33_3d() {
  StencilKernel k{"pt33_3d", 3, {}};
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) k.points.push_back({{dz, dy, dx}, 1.0 / 33.0});
  for (int s : {-2, 2}) {
    k.points.push_back({{s, 0, 0}, 1.0 / 33.0});
    k.points.push_back({{0, s, 0}, 1.0 / 33.0});
    k.points.push_back({{0, 0, s}, 1.0 / 33.0});
  }
  return k;
}

const std::vector<std::string>& kernel_names() {
  static const std::vector<std::string> names{"jacobi1d", "pt7_1d", "jacobi2d", "blur2d", "pt7_3d", "pt33_3d"};
  return names;
}

std::optional<StencilKernel> find_kernel(std::string_view name) {
  if (name == "jacobi1d") return jacobi1d();
  if (name == "pt7_1d") return pt7_1d();
  if (name == "jacobi2d") return jacobi2d();
  if (name == "blur2d") return blur2d();
  if (name == "pt7_3d") return pt7_3d();
  if (name == "pt33_3d") return pt33_3d();
  return std::nullopt;
}

Extents domain_extents(int dims, SizeClass c) {
  const int row = static_cast<int>(c);
  switch (dims) {
    case 1: {
      constexpr std::size_t n[] = {131072, 1048576, 4194304};
      return make_extents({n[row]});
    }
    case 2: {
      // rows x columns, outermost first
      constexpr std::size_t r[] = {256, 1024, 2048}, cols[] = {512, 1024, 2048};
      return make_extents({r[row], cols[row]});
    }
    case 3: {
      constexpr std::size_t z[] = {32, 64, 64}, y[] = {64, 128, 256}, x[] = {64, 128, 256};
      return make_extents({z[row], y[row], x[row]});
    }
    default: throw DimensionError("no domain for " + std::to_string(dims) + " dimensions");
  }
}

}  // namespace casper::grid
