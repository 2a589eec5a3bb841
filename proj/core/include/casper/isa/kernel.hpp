#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

namespace casper::isa {

inline constexpr int kMaxDims = 3;

/// Neighbor offset, outermost dimension first. Only the first `dims` entries are used.
using Offset = std::array<int, kMaxDims>;

struct StencilPoint {
  Offset offset{};
  double coefficient = 0.0;
};

/// Declarative stencil: one output point is the weighted sum of its neighbors.
struct StencilKernel {
  std::string name;
  int dims = 1;
  std::vector<StencilPoint> points;

  /// Largest |offset| along dimension `dim` (0 = outermost).
  int radius(int dim) const;
  /// Largest radius over all dimensions.
  int max_radius() const;
  /// Radius along the contiguous dimension.
  int inner_radius() const { return radius(dims - 1); }
};

/// Points sorted into canonical accumulation order: lexicographic over
/// (outer offsets ascending, innermost offset ascending).
std::vector<StencilPoint> canonical_points(const StencilKernel& kernel);

/// Throws casper::Error when offsets repeat, exceed the dimension count,
/// or the innermost radius exceeds the shift field.
void check_kernel(const StencilKernel& kernel);

}  // namespace casper::isa
