#include <gtest/gtest.h>

#include <sstream>

#include "casper/error.hpp"
#include "casper/grid/catalog.hpp"
#include "casper/grid/golden.hpp"
#include "casper/grid/grid.hpp"
#include "casper/grid/placement.hpp"

using namespace casper;
using namespace casper::grid;

TEST(Checksum, KnownValues) {
  // computed with a separate FNV-1a implementation over the packed doubles
  const double v[] = {1.0, 2.0, 3.0};
  EXPECT_EQ(checksum(std::span<const double>(v)), 0xe2d5ae79fc4e9a70ULL);
  EXPECT_EQ(checksum(std::span<const double>()), kFnvOffsetBasis);
}

TEST(Checksum, DistinguishesSignedZero) {
  const double a[] = {0.0}, b[] = {-0.0};
  EXPECT_NE(checksum(std::span<const double>(a)), checksum(std::span<const double>(b)));
}

TEST(Extents, InnermostFirstNotation) {
  const auto e = parse_extents("512x256");
  EXPECT_EQ(e.dims, 2);
  EXPECT_EQ(e.n[0], 256u);
  EXPECT_EQ(e.n[1], 512u);
  EXPECT_EQ(e.inner(), 512u);
  EXPECT_EQ(format_extents(e), "512x256");
  const auto e3 = parse_extents("64x64x32");
  EXPECT_EQ(e3, make_extents({32, 64, 64}));
  EXPECT_EQ(e3.stride(0), 4096u);
  EXPECT_EQ(e3.stride(1), 64u);
  EXPECT_EQ(e3.stride(2), 1u);
  EXPECT_THROW(parse_extents("0x4"), DimensionError);
  EXPECT_THROW(parse_extents("4x4x4x4"), DimensionError);
  EXPECT_THROW(parse_extents("abc"), DimensionError);
  EXPECT_THROW(parse_extents(""), DimensionError);
}

TEST(Random, Deterministic) {
  Grid a(make_extents({64, 64})), b(make_extents({64, 64})), c(make_extents({64, 64}));
  fill_random(a, 42);
  fill_random(b, 42);
  fill_random(c, 43);
  EXPECT_EQ(checksum(a), checksum(b));
  EXPECT_NE(checksum(a), checksum(c));
  for (double x : a.data()) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Golden, Jacobi1dByHand) {
  Grid in(make_extents({6}));
  const double v[] = {1, 2, 4, 8, 16, 32};
  for (int i = 0; i < 6; ++i) in[i] = v[i];
  const auto out = golden_step(jacobi1d(), in);
  const double t = 1.0 / 3.0;
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[5], 32.0);
  for (int i = 1; i < 5; ++i) {
    double acc = 0.0;
    acc += t * v[i - 1];
    acc += t * v[i];
    acc += t * v[i + 1];
    EXPECT_EQ(out[i], acc);
  }
}

TEST(Golden, BoundaryCopied) {
  Grid in(make_extents({16, 16}));
  fill_random(in, 3);
  const auto out = golden_step(blur2d(), in);
  for (std::size_t y = 0; y < 16; ++y) {
    for (std::size_t x = 0; x < 16; ++x) {
      if (y < 2 || y >= 14 || x < 2 || x >= 14) EXPECT_EQ(out[in.linear(y, x)], in[in.linear(y, x)]);
    }
  }
}

TEST(Golden, ConstantFieldIsFixedPointOfAverages) {
  // coefficients of jacobi2d sum to one: interior of a constant field stays (nearly) constant
  Grid in(make_extents({8, 8}));
  for (auto& x : in.data()) x = 0.5;
  const auto out = golden_run(jacobi2d(), in, 3);
  for (double x : out.data()) EXPECT_NEAR(x, 0.5, 1e-15);
}

TEST(Golden, RejectsSmallExtents) {
  Grid in(make_extents({6}));
  EXPECT_THROW(golden_step(pt7_1d(), in), DimensionError);
  Grid in2(make_extents({7}));
  EXPECT_NO_THROW(golden_step(pt7_1d(), in2));
  Grid in3(make_extents({4, 4}));
  EXPECT_THROW(golden_step(pt7_3d(), in3), DimensionError);
}

TEST(GridFile, RoundTrip) {
  Grid g(make_extents({5, 7, 3}));
  fill_random(g, 9);
  std::stringstream ss;
  write_grid(ss, g);
  const auto back = read_grid(ss);
  EXPECT_EQ(back, g);
  EXPECT_EQ(first_difference(back, g), g.size());
  std::stringstream bad("nope");
  EXPECT_THROW(read_grid(bad), Error);
}

TEST(Catalog, Kernels) {
  const std::pair<const char*, std::size_t> want[] = {{"jacobi1d", 3}, {"pt7_1d", 7}, {"jacobi2d", 5},
                                                      {"blur2d", 25}, {"pt7_3d", 7},  {"pt33_3d", 33}};
  ASSERT_EQ(kernel_names().size(), 6u);
  for (auto [name, n] : want) {
    const auto k = find_kernel(name);
    ASSERT_TRUE(k) << name;
    EXPECT_EQ(k->points.size(), n) << name;
  }
  EXPECT_FALSE(find_kernel("nope"));
  EXPECT_EQ(domain_extents(1, SizeClass::L3), make_extents({1048576}));
  EXPECT_EQ(parse_size_class("dram"), SizeClass::DRAM);
  EXPECT_FALSE(parse_size_class("l4"));
}

TEST(Placement, CoPlacedGridsShareSlices) {
  const memory::StencilSegment seg{0x1'0000'0000ULL, 0};
  for (const char* ext : {"4096", "512x512", "64x64x32", "100x37"}) {
    const auto e = parse_extents(ext);
    memory::AddressMap probe(16, 128 * 1024);
    const memory::StencilSegment s{seg.base, required_segment_bytes(e, probe)};
    const memory::AddressMap map(16, 128 * 1024, s);
    const auto k = e.dims == 1 ? jacobi1d() : e.dims == 2 ? jacobi2d() : pt7_3d();
    const auto gp = place_grids(k, e, s, map);
    EXPECT_EQ((gp.output.base_addr() - gp.input.base_addr()) % map.period(), 0u) << ext;
    for (std::size_t i = 0; i < gp.input.size(); i += 97) {
      EXPECT_EQ(map.map_slice(gp.input.address_of(i)), map.map_slice(gp.output.address_of(i)));
    }
    EXPECT_THROW(place_grids(k, e, memory::StencilSegment{s.base, s.size / 2}, map), SegmentOverflow);
  }
}
