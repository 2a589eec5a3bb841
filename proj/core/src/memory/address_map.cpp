#include "casper/memory/address_map.hpp"

#include <string>

#include "casper/error.hpp"

namespace casper::memory {

AddressMap::AddressMap(unsigned n_slices, std::uint64_t block_size, std::optional<StencilSegment> segment)
    : n_slices_(n_slices), block_size_(block_size), segment_(segment) {
  if (n_slices_ == 0) throw ConfigError("address map needs at least one slice");
  if (block_size_ == 0 || block_size_ % kLineBytes != 0) {
    throw ConfigError("block size must be a positive multiple of the line size");
  }
  if (segment_) {
    if (segment_->base % block_size_ != 0) {
      throw ConfigError("stencil segment base " + std::to_string(segment_->base) + " is not block aligned");
    }
    if (segment_->size % block_size_ != 0) {
      throw ConfigError("stencil segment size is not a multiple of the block size");
    }
  }
}

}  // namespace casper::memory
