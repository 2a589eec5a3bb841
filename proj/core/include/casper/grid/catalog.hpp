#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casper/grid/grid.hpp"
#include "casper/isa/kernel.hpp"

namespace casper::grid {

enum class SizeClass { L2, L3, DRAM };

std::string to_string(SizeClass c);
std::optional<SizeClass> parse_size_class(std::string_view text);

/// The six benchmark kernels.
isa::StencilKernel jacobi1d();
isa::StencilKernel pt7_1d();
isa::StencilKernel jacobi2d();
isa::StencilKernel blur2d();
isa::StencilKernel pt7_3d();
isa::StencilKernel pt33_3d();

const std::vector<std::string>& kernel_names();
/// Catalog lookup by name; nullopt for unknown names.
std::optional<isa::StencilKernel> find_kernel(std::string_view name);

/// Evaluation domain for a kernel's dimensionality and size class.
Extents domain_extents(int dims, SizeClass c);

}  // namespace casper::grid
