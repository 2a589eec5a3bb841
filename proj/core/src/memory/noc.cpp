#include "casper/memory/noc.hpp"

#include <algorithm>
#include <cstdlib>

#include "casper/error.hpp"

namespace casper::memory {

MeshNoc::MeshNoc(NocParams params) : params_(params) {
  if (params_.width == 0 || params_.height == 0) throw ConfigError("mesh must have at least one node");
  if (params_.link_bytes == 0) throw ConfigError("link bandwidth must be positive");
  link_free_.assign(static_cast<std::size_t>(nodes()) * 4, 0);
}

unsigned MeshNoc::hops(unsigned src, unsigned dst) const noexcept {
  const int sx = static_cast<int>(src % params_.width), sy = static_cast<int>(src / params_.width);
  const int dx = static_cast<int>(dst % params_.width), dy = static_cast<int>(dst / params_.width);
  return static_cast<unsigned>(std::abs(sx - dx) + std::abs(sy - dy));
}

std::vector<unsigned> MeshNoc::route(unsigned src, unsigned dst) const {
  std::vector<unsigned> path{src};
  unsigned x = src % params_.width, y = src / params_.width;
  const unsigned tx = dst % params_.width, ty = dst / params_.width;
  while (x != tx) {
    x = x < tx ? x + 1 : x - 1;
    path.push_back(y * params_.width + x);
  }
  while (y != ty) {
    y = y < ty ? y + 1 : y - 1;
    path.push_back(y * params_.width + x);
  }
  return path;
}

NocTransfer MeshNoc::transfer(unsigned src, unsigned dst, std::uint64_t payload_bytes, std::uint64_t cycle) {
  if (src >= nodes() || dst >= nodes()) throw ConfigError("mesh node out of range");
  NocTransfer out;
  out.arrival = cycle;
  if (src == dst) return out;

  const std::uint64_t flits = std::max<std::uint64_t>(1, (payload_bytes + params_.link_bytes - 1) / params_.link_bytes);
  const auto path = route(src, dst);
  std::uint64_t t = cycle;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const unsigned a = path[i], b = path[i + 1];
    Dir d;
    if (b == a + 1) d = East;
    else if (b + 1 == a) d = West;
    else if (b > a) d = South;
    else d = North;
    auto& free = link_free_[link_index(a, d)];
    const std::uint64_t depart = std::max(t, free);
    free = depart + flits;
    t = depart + params_.hop_latency;
  }
  out.hops = static_cast<unsigned>(path.size() - 1);
  out.flits = flits;
  out.arrival = t + flits - 1;
  flits_ += flits;
  flit_hops_ += flits * out.hops;
  return out;
}

}  // namespace casper::memory
