#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "preacq/geometry/image_io.hpp"
#include "preacq/geometry/primitives.hpp"
#include "preacq/geometry/recon.hpp"
#include "preacq/materials/material.hpp"

using namespace preacq;
using namespace preacq::geometry;
namespace fs = std::filesystem;

namespace {

RasterGrid grid(int n, double pitch) {
  RasterGrid r;
  r.width = r.height = n;
  r.pitch = pitch;
  return r;
}

DepthMap filled(int n, double pitch, double h) {
  auto d = DepthMap::zeros(n, n, pitch);
  std::fill(d.values.begin(), d.values.end(), h);
  return d;
}

ClosedMesh close_flat(const DepthMap& depth, const RasterGrid& r) {
  return close_and_volume(deform_template(TemplateQuadMesh::flat(r), depth), depth);
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("preacq_test_" + name);
}

}  // namespace

TEST(MaskDepth, KeepsOnlyTheItemsPixels) {
  const auto depth = filled(4, 0.01, 0.02);
  auto mask = SegMask::background(4, 4);
  for (int v = 0; v < 4; ++v) mask.at(0, v) = mask.at(1, v) = 1;
  const auto out = mask_depth(depth, mask, 1);
  for (int v = 0; v < 4; ++v) {
    EXPECT_EQ(out.at(0, v), 0.02);
    EXPECT_EQ(out.at(1, v), 0.02);
    EXPECT_EQ(out.at(2, v), 0.0);
    EXPECT_EQ(out.at(3, v), 0.0);
  }
}

TEST(MaskDepth, FullMaskIsIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> h(0.0, 0.05);
  auto depth = DepthMap::zeros(8, 8, 0.01);
  for (auto& d : depth.values) d = h(rng);
  auto mask = SegMask::background(8, 8);
  std::fill(mask.labels.begin(), mask.labels.end(), 3);
  EXPECT_EQ(mask_depth(depth, mask, 3), depth);
}

TEST(MaskDepth, EmptyItemThrows) {
  EXPECT_THROW(mask_depth(filled(4, 0.01, 0.02), SegMask::background(4, 4), 1), InvalidArgument);
  EXPECT_THROW(mask_depth(filled(4, 0.01, 0.02), SegMask::background(5, 4), 1), InvalidArgument);
}

TEST(DeformTemplate, ZeroDepthLeavesVerticesInPlace) {
  const auto r = grid(6, 0.01);
  const auto tmpl = TemplateQuadMesh::flat(r);
  const auto mesh = deform_template(tmpl, DepthMap::zeros(6, 6, 0.01));
  EXPECT_EQ(mesh.vertices, tmpl.vertices);
}

TEST(DeformTemplate, ConstantDepthRaisesFlatTemplate) {
  const auto r = grid(6, 0.01);
  const auto tmpl = TemplateQuadMesh::flat(r);
  const auto mesh = deform_template(tmpl, filled(6, 0.01, 0.03));
  for (std::size_t i = 0; i < tmpl.vertices.size(); ++i) {
    EXPECT_EQ(mesh.vertices[i].y() - tmpl.vertices[i].y(), 0.03);
    EXPECT_EQ(mesh.vertices[i].x(), tmpl.vertices[i].x());
    EXPECT_EQ(mesh.vertices[i].z(), tmpl.vertices[i].z());
  }
}

TEST(DeformTemplate, HemisphereDisplacementMatchesAnalyticHeight) {
  const double R = 0.03;
  const auto r = RasterGrid::centered(0.0, 0.0, 0.08, 64);
  HeightPrimitive hemi;
  hemi.kind = HeightPrimitive::Kind::Hemisphere;
  hemi.radius = R;
  const auto mesh = deform_template(TemplateQuadMesh::flat(r), rasterize(hemi, r));
  double worst = 0.0;
  for (int v = 0; v < r.height; ++v) {
    for (int u = 0; u < r.width; ++u) {
      const double x = r.center_x(u), z = r.center_z(v);
      const double rho2 = x * x + z * z;
      const double expected = rho2 < R * R ? std::sqrt(R * R - rho2) : 0.0;
      worst = std::max(worst, std::abs(mesh.vertices[v * r.width + u].y() - expected));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(DeformTemplate, ExactForArbitraryNormals) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto r = grid(16, 0.005);
  auto tmpl = TemplateQuadMesh::flat(r);
  for (auto& nrm : tmpl.normals) nrm = Vec3(n(rng), n(rng), n(rng)).normalized();
  auto depth = DepthMap::zeros(16, 16, 0.005);
  for (auto& d : depth.values) d = std::abs(n(rng)) * 0.01;
  const auto mesh = deform_template(tmpl, depth);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    EXPECT_LT((mesh.vertices[i] - (tmpl.vertices[i] + depth.values[i] * tmpl.normals[i])).norm(), 1e-12);
  }
}

TEST(CloseAndVolume, PrismSumExamples) {
  EXPECT_NEAR(close_flat(filled(10, 0.005, 0.02), grid(10, 0.005)).volume, 5.0e-5, 1e-18);
  auto single = DepthMap::zeros(10, 10, 0.004);
  single.at(4, 7) = 0.01;
  EXPECT_NEAR(close_flat(single, grid(10, 0.004)).volume, 1.6e-7, 1e-20);
}

TEST(CloseAndVolume, EmptyFootprintThrows) {
  EXPECT_THROW(close_flat(DepthMap::zeros(4, 4, 0.01), grid(4, 0.01)), InvalidArgument);
}

TEST(CloseAndVolume, MonotoneInDepth) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> h(0.0, 0.02), bump(0.0, 0.005);
  const auto r = grid(12, 0.004);
  auto depth = DepthMap::zeros(12, 12, 0.004);
  for (auto& d : depth.values) d = h(rng);
  double last = close_flat(depth, r).volume;
  for (int k = 0; k < 20; ++k) {
    for (auto& d : depth.values) d += bump(rng) * (bump(rng) > 0.0025);
    const double now = close_flat(depth, r).volume;
    EXPECT_GE(now, last);
    last = now;
  }
}

TEST(CloseAndVolume, HemisphereVolumeWithinOnePercent) {
  const double R = 0.03;
  const auto r = RasterGrid::centered(0.0, 0.0, 0.24, 128);
  HeightPrimitive hemi;
  hemi.kind = HeightPrimitive::Kind::Hemisphere;
  hemi.radius = R;
  const double v = close_flat(rasterize(hemi, r), r).volume;
  EXPECT_NEAR(v / (2.0 / 3.0 * std::numbers::pi * R * R * R), 1.0, 0.01);
}

TEST(Sampling, CubeCountContainmentAndMass) {
  // A 3 cm cube resolved by 30 pixels of 1 mm.
  const auto r = grid(30, 0.001);
  auto closed = close_flat(filled(30, 0.001, 0.03), r);
  closed.mesh.item_id = 1;
  ASSERT_NEAR(closed.volume, 2.7e-5, 1e-15);
  auto params = materials::MaterialRegistry::defaults().at("jello");
  params.sampling_density = 1.7e7;
  const auto set = sample_particles(closed.mesh, params, 123);
  EXPECT_NEAR(static_cast<double>(set.positions.size()), 459.0, 0.02 * 459.0);
  for (const auto& p : set.positions) EXPECT_TRUE(closed.mesh.contains(p));
  const double expected_mass = closed.volume * params.mass_density;
  EXPECT_LT(std::abs(set.total_mass() - expected_mass) / expected_mass, 0.01);
  EXPECT_NEAR(set.particle_volume * set.positions.size(), closed.volume, 1e-15);
}

TEST(Sampling, DeterministicForFixedSeed) {
  const auto r = grid(20, 0.002);
  HeightPrimitive pile;
  pile.kind = HeightPrimitive::Kind::ConePile;
  pile.center_x = pile.center_z = 0.02;
  pile.radius = 0.018;
  pile.height = 0.015;
  auto closed = close_flat(rasterize(pile, r), r);
  closed.mesh.item_id = 2;
  const auto params = materials::MaterialRegistry::defaults().at("rice");
  const auto a = sample_particles(closed.mesh, params, 99);
  const auto b = sample_particles(closed.mesh, params, 99);
  EXPECT_EQ(a.positions, b.positions);
  const auto c = sample_particles(closed.mesh, params, 100);
  EXPECT_NE(a.positions, c.positions);
  for (const auto& p : a.positions) EXPECT_TRUE(closed.mesh.contains(p));
}

TEST(Sampling, ErrorCases) {
  const auto r = grid(4, 0.001);
  auto closed = close_flat(filled(4, 0.001, 0.001), r);
  auto params = materials::MaterialRegistry::defaults().at("tofu");
  params.sampling_density = 1.0;  // 1.6e-8 m^3 * 1 /m^3 rounds to zero particles
  EXPECT_THROW(sample_particles(closed.mesh, params, 1), InvalidArgument);
  auto open = deform_template(TemplateQuadMesh::flat(r), filled(4, 0.001, 0.001));
  EXPECT_THROW(sample_particles(open, materials::MaterialRegistry::defaults().at("tofu"), 1),
               InvalidArgument);
}

TEST(Primitives, StampRejectsOverlap) {
  const auto r = RasterGrid::centered(0.0, 0.0, 0.1, 50);
  auto depth = DepthMap::zeros(50, 50, r.pitch);
  auto mask = SegMask::background(50, 50);
  HeightPrimitive a;
  a.kind = HeightPrimitive::Kind::Disc;
  a.radius = 0.02;
  a.height = 0.01;
  stamp(a, 1, r, depth, mask);
  EXPECT_THROW(stamp(a, 2, r, depth, mask), InvalidArgument);
  a.center_x = 0.03;
  a.radius = 0.005;
  EXPECT_NO_THROW(stamp(a, 2, r, depth, mask));
  EXPECT_EQ(mask.item_ids(), (std::vector<ItemId>{1, 2}));
}

TEST(Primitives, UnknownKindThrows) {
  EXPECT_THROW(HeightPrimitive::kind_from_string("torus"), InvalidArgument);
  EXPECT_EQ(HeightPrimitive::kind_from_string("cone_pile"), HeightPrimitive::Kind::ConePile);
}

TEST(ImageIo, PfmAndPgmRoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> h(0.0, 0.05);
  auto depth = DepthMap::zeros(7, 5, 0.002);
  for (auto& d : depth.values) d = static_cast<float>(h(rng));
  auto mask = SegMask::background(7, 5);
  for (std::size_t i = 0; i < mask.labels.size(); ++i) mask.labels[i] = static_cast<std::uint8_t>(i % 4);
  const auto pfm = temp_file("rt.pfm"), pgm = temp_file("rt.pgm");
  write_pfm(pfm, depth);
  write_pgm(pgm, mask);
  EXPECT_EQ(read_pfm(pfm, 0.002), depth);
  EXPECT_EQ(read_pgm(pgm), mask);
  fs::remove(pfm);
  fs::remove(pgm);
}

TEST(ImageIo, MalformedFilesThrow) {
  const auto bad = temp_file("bad.pfm");
  {
    std::ofstream out(bad);
    out << "PF\n2 2\n-1.0\n";
  }
  EXPECT_THROW(read_pfm(bad, 0.001), IoError);
  {
    std::ofstream out(bad);
    out << "Pf\n4 4\n-1.0\nxx";
  }
  EXPECT_THROW(read_pfm(bad, 0.001), IoError);
  fs::remove(bad);
  EXPECT_THROW(read_pgm(temp_file("missing.pgm")), IoError);
}

TEST(DepthMapValidate, RejectsNegativeAndNonFinite) {
  auto d = DepthMap::zeros(3, 3, 0.001);
  EXPECT_NO_THROW(d.validate());
  d.at(1, 1) = -1e-6;
  EXPECT_THROW(d.validate(), InvalidArgument);
  d.at(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(d.validate(), InvalidArgument);
}
