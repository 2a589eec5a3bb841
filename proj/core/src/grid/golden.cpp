#include "casper/grid/golden.hpp"

#include <vector>

#include "casper/error.hpp"

namespace casper::grid {

void check_extents(const isa::StencilKernel& kernel, const Extents& extents) {
  if (kernel.dims != extents.dims) {
    throw DimensionError("kernel '" + kernel.name + "' is " + std::to_string(kernel.dims) + "D but the grid is " +
                         std::to_string(extents.dims) + "D");
  }
  for (int d = 0; d < kernel.dims; ++d) {
    const auto need = static_cast<std::size_t>(2 * kernel.radius(d) + 1);
    if (extents.n[static_cast<std::size_t>(d)] < need) {
      throw DimensionError("kernel '" + kernel.name + "' needs extent >= " + std::to_string(need) + " in dimension " +
                           std::to_string(d) + ", got " + std::to_string(extents.n[static_cast<std::size_t>(d)]));
    }
  }
}

Grid golden_step(const isa::StencilKernel& kernel, const Grid& input) {
  check_extents(kernel, input.extents());
  const auto& e = input.extents();
  const auto points = isa::canonical_points(kernel);

  std::vector<std::ptrdiff_t> delta;
  std::vector<double> coeff;
  for (const auto& p : points) {
    std::ptrdiff_t d = 0;
    for (int k = 0; k < e.dims; ++k) d += p.offset[static_cast<std::size_t>(k)] * static_cast<std::ptrdiff_t>(e.stride(k));
    delta.push_back(d);
    coeff.push_back(p.coefficient);
  }

  Grid out = input;
  std::array<std::size_t, 3> lo{0, 0, 0}, hi{1, 1, 1};
  for (int k = 0; k < e.dims; ++k) {
    const auto r = static_cast<std::size_t>(kernel.radius(k));
    lo[static_cast<std::size_t>(k)] = r;
    hi[static_cast<std::size_t>(k)] = e.n[static_cast<std::size_t>(k)] - r;
  }
  const auto in = input.data();
  auto dst = out.data();
  const int inner = e.dims - 1;
  const std::size_t ilo = lo[static_cast<std::size_t>(inner)], ihi = hi[static_cast<std::size_t>(inner)];
  // Iterate all outer index tuples of the interior; inner loop over the contiguous dimension.
  for (std::size_t a = (inner > 0 ? lo[0] : 0); a < (inner > 0 ? hi[0] : 1); ++a) {
    for (std::size_t b = (inner > 1 ? lo[1] : 0); b < (inner > 1 ? hi[1] : 1); ++b) {
      std::size_t row = 0;
      if (inner == 1) row = a * e.n[1];
      if (inner == 2) row = (a * e.n[1] + b) * e.n[2];
      for (std::size_t i = ilo; i < ihi; ++i) {
        const std::size_t c = row + i;
        double sum = 0.0;
        for (std::size_t p = 0; p < delta.size(); ++p) {
          sum += coeff[p] * in[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + delta[p])];
        }
        dst[c] = sum;
      }
    }
  }
  return out;
}

Grid golden_run(const isa::StencilKernel& kernel, Grid input, int timesteps) {
  for (int t = 0; t < timesteps; ++t) input = golden_step(kernel, input);
  return input;
}

}  // namespace casper::grid
