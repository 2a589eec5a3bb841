#pragma once

#include <cstdint>
#include <vector>

namespace casper::memory {

struct NocParams {
  unsigned width = 4;
  unsigned height = 4;
  std::uint64_t hop_latency = 2;      // router + link, cycles
  std::uint64_t link_bytes = 64;      // per cycle per direction
  std::uint64_t flit_hop_energy_pj = 0;
};

struct NocTransfer {
  std::uint64_t arrival = 0;
  unsigned hops = 0;
  std::uint64_t flits = 0;
};

/// 2D mesh with dimension-ordered (X then Y) routing. Each directed link
/// carries one flit per cycle; contending flits are serialized in call order.
class MeshNoc {
 public:
  explicit MeshNoc(NocParams params = {});

  const NocParams& params() const noexcept { return params_; }
  unsigned nodes() const noexcept { return params_.width * params_.height; }
  unsigned hops(unsigned src, unsigned dst) const noexcept;
  /// Node sequence visited from src to dst (inclusive) under XY routing.
  std::vector<unsigned> route(unsigned src, unsigned dst) const;

  NocTransfer transfer(unsigned src, unsigned dst, std::uint64_t payload_bytes, std::uint64_t cycle);

  std::uint64_t flits() const noexcept { return flits_; }
  std::uint64_t flit_hops() const noexcept { return flit_hops_; }
  void reset_stats() noexcept { flits_ = flit_hops_ = 0; }

 private:
  enum Dir : unsigned { East = 0, West = 1, North = 2, South = 3 };
  std::size_t link_index(unsigned node, Dir d) const noexcept { return node * 4u + d; }

  NocParams params_;
  std::vector<std::uint64_t> link_free_;
  std::uint64_t flits_ = 0;
  std::uint64_t flit_hops_ = 0;
};

}  // namespace casper::memory
