#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "preacq/common.hpp"
#include "preacq/geometry/raster.hpp"
#include "preacq/materials/material.hpp"

namespace preacq::geometry {

/// Rectangular lattice of vertices with per-vertex unit normals. Vertex
/// (row v, col u) lives at index v * cols + u.
struct TemplateQuadMesh {
  int rows = 0;
  int cols = 0;
  RasterGrid raster;
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;

  /// Flat lattice in the plate plane y = 0, one vertex per pixel centre,
  /// normals +y.
  static TemplateQuadMesh flat(const RasterGrid& raster);

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * cols + static_cast<std::size_t>(u);
  }
};

/// A template lattice after displacement. Once closed against the plate plane
/// the solid it bounds is the union of one prism per footprint pixel, from
/// y = 0 up to that pixel's displaced height.
struct FoodMesh {
  int rows = 0;
  int cols = 0;
  std::vector<Vec3> vertices;
  RasterGrid raster;
  ItemId item_id = kBackground;
  std::string category;

  bool closed = false;
  std::vector<std::uint8_t> footprint;  // per pixel, set once closed
  double volume = 0.0;                  // m^3, set once closed

  /// Height of the closed solid over pixel (u, v), 0 outside the footprint.
  double column_height(int u, int v) const;
  /// Inside test for the closed solid. Throws if the mesh is open.
  bool contains(const Vec3& p) const;
  std::size_t footprint_pixels() const;
  /// Axis-aligned bounds of the closed solid.
  void bounds(Vec3& lo, Vec3& hi) const;
};

/// Particles sampled inside one closed item mesh, in the mesh frame (plate
/// plane at y = 0).
struct ParticleSet {
  std::vector<Vec3> positions;
  double particle_mass = 0.0;    // kg
  double particle_volume = 0.0;  // m^3
  std::uint32_t material_id = 0;
  ItemId item_id = kBackground;
  std::uint64_t sampling_seed = 0;

  double total_mass() const { return particle_mass * static_cast<double>(positions.size()); }
};

/// Depth where the mask equals `item_id`, zero elsewhere.
DepthMap mask_depth(const DepthMap& depth, const SegMask& mask, ItemId item_id);

/// p'_i = p_i + D(u_i, v_i) n_i for every vertex.
FoodMesh deform_template(const TemplateQuadMesh& tmpl, const DepthMap& depth);

struct ClosedMesh {
  FoodMesh mesh;
  double volume = 0.0;
};

/// Closes the displaced surface against the plate plane. The footprint is the
/// set of pixels with positive depth; volume = sum D * pitch^2.
ClosedMesh close_and_volume(const FoodMesh& mesh, const DepthMap& depth);

/// Stratified jittered sampling inside a closed mesh: one jittered candidate
/// per cubic cell of edge (1/density)^(1/3), kept when inside, then trimmed or
/// topped up with uniform samples to round(volume * density) particles.
/// Deterministic for a fixed seed.
ParticleSet sample_particles(const FoodMesh& mesh, const materials::MaterialParams& params,
                             std::uint64_t seed, std::uint32_t material_id = 0);

/// Closed prism-union surface as Wavefront OBJ (debug output only).
void write_obj(const std::filesystem::path& path, const FoodMesh& mesh);

}  // namespace preacq::geometry
