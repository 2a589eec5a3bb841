#include "casper/isa/kernel.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "casper/error.hpp"
#include "casper/isa/instruction.hpp"

namespace casper::isa {

int StencilKernel::radius(int dim) const {
  int r = 0;
  for (const auto& p : points) r = std::max(r, std::abs(p.offset[static_cast<std::size_t>(dim)]));
  return r;
}

int StencilKernel::max_radius() const {
  int r = 0;
  for (int d = 0; d < dims; ++d) r = std::max(r, radius(d));
  return r;
}

std::vector<StencilPoint> canonical_points(const StencilKernel& kernel) {
  std::vector<StencilPoint> pts = kernel.points;
  std::stable_sort(pts.begin(), pts.end(),
                   [](const StencilPoint& a, const StencilPoint& b) { return a.offset < b.offset; });
  return pts;
}

void check_kernel(const StencilKernel& kernel) {
  if (kernel.dims < 1 || kernel.dims > kMaxDims) {
    throw Error("kernel '" + kernel.name + "': dims must be 1..3");
  }
  if (kernel.points.empty()) throw Error("kernel '" + kernel.name + "' has no points");
  std::set<Offset> seen;
  for (const auto& p : kernel.points) {
    for (int d = kernel.dims; d < kMaxDims; ++d) {
      if (p.offset[static_cast<std::size_t>(d)] != 0) {
        throw Error("kernel '" + kernel.name + "': offset uses more than " + std::to_string(kernel.dims) +
                    " dimensions");
      }
    }
    if (!seen.insert(p.offset).second) throw Error("kernel '" + kernel.name + "': duplicate offset");
  }
  if (kernel.inner_radius() > static_cast<int>(kMaxShift)) {
    throw Error("kernel '" + kernel.name + "': innermost radius exceeds the 3-bit shift field");
  }
}

}  // namespace casper::isa
