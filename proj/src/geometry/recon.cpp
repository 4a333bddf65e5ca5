#include "preacq/geometry/recon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace preacq::geometry {
namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require_same_dims(int w0, int h0, int w1, int h1, const char* what) {
  if (w0 != w1 || h0 != h1) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(w0) + "x" +
                          std::to_string(h0) + " vs " + std::to_string(w1) + "x" +
                          std::to_string(h1) + ")");
  }
}

}  // namespace

TemplateQuadMesh TemplateQuadMesh::flat(const RasterGrid& raster) {
  TemplateQuadMesh m;
  m.rows = raster.height;
  m.cols = raster.width;
  m.raster = raster;
  m.vertices.reserve(raster.size());
  m.normals.assign(raster.size(), Vec3::UnitY());
  for (int v = 0; v < raster.height; ++v) {
    for (int u = 0; u < raster.width; ++u) {
      m.vertices.emplace_back(raster.center_x(u), 0.0, raster.center_z(v));
    }
  }
  return m;
}

double FoodMesh::column_height(int u, int v) const {
  if (!raster.contains(u, v)) return 0.0;
  const std::size_t i = static_cast<std::size_t>(v) * cols + u;
  if (!footprint[i]) return 0.0;
  return vertices[i].y();
}

bool FoodMesh::contains(const Vec3& p) const {
  if (!closed) throw InvalidArgument("inside test on an open mesh");
  const int u = raster.column_of(p.x());
  const int v = raster.row_of(p.z());
  if (!raster.contains(u, v)) return false;
  return p.y() > 0.0 && p.y() < column_height(u, v);
}

std::size_t FoodMesh::footprint_pixels() const {
  return static_cast<std::size_t>(std::count(footprint.begin(), footprint.end(), 1));
}

void FoodMesh::bounds(Vec3& lo, Vec3& hi) const {
  int umin = cols, umax = -1, vmin = rows, vmax = -1;
  double top = 0.0;
  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * cols + u;
      if (!footprint[i]) continue;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
      top = std::max(top, vertices[i].y());
    }
  }
  lo = Vec3(raster.origin_x + umin * raster.pitch, 0.0, raster.origin_z + vmin * raster.pitch);
  hi = Vec3(raster.origin_x + (umax + 1) * raster.pitch, top,
            raster.origin_z + (vmax + 1) * raster.pitch);
}

DepthMap mask_depth(const DepthMap& depth, const SegMask& mask, ItemId item_id) {
  require_same_dims(depth.width, depth.height, mask.width, mask.height, "mask_depth");
  if (!mask.contains_label(item_id)) {
    throw InvalidArgument("mask_depth: item " + std::to_string(item_id) + " is empty in the mask");
  }
  DepthMap out = DepthMap::zeros(depth.width, depth.height, depth.pixel_pitch);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (mask.labels[i] == item_id) out.values[i] = depth.values[i];
  }
  return out;
}

FoodMesh deform_template(const TemplateQuadMesh& tmpl, const DepthMap& depth) {
  require_same_dims(tmpl.cols, tmpl.rows, depth.width, depth.height, "deform_template");
  FoodMesh mesh;
  mesh.rows = tmpl.rows;
  mesh.cols = tmpl.cols;
  mesh.raster = tmpl.raster;
  mesh.vertices.resize(tmpl.vertices.size());
  for (std::size_t i = 0; i < tmpl.vertices.size(); ++i) {
    const double d = depth.values[i];
    if (!std::isfinite(d)) throw InvalidArgument("deform_template: non-finite depth value");
    mesh.vertices[i] = tmpl.vertices[i] + d * tmpl.normals[i];
  }
  return mesh;
}

ClosedMesh close_and_volume(const FoodMesh& mesh, const DepthMap& depth) {
  require_same_dims(mesh.cols, mesh.rows, depth.width, depth.height, "close_and_volume");
  ClosedMesh out{mesh, 0.0};
  FoodMesh& m = out.mesh;
  m.footprint.assign(depth.values.size(), 0);
  double height_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    if (depth.values[i] > 0.0) {
      m.footprint[i] = 1;
      height_sum += depth.values[i];
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("close_and_volume: empty footprint");
  out.volume = height_sum * depth.pixel_pitch * depth.pixel_pitch;
  m.volume = out.volume;
  m.closed = true;
  return out;
}

ParticleSet sample_particles(const FoodMesh& mesh, const materials::MaterialParams& params,
                             std::uint64_t seed, std::uint32_t material_id) {
  if (!mesh.closed) throw InvalidArgument("sample_particles: mesh is not closed");
  if (!(params.sampling_density > 0.0)) {
    throw InvalidArgument("sample_particles: sampling density must be positive");
  }
  const double target_real = mesh.volume * params.sampling_density;
  const auto target = static_cast<std::size_t>(std::llround(target_real));
  if (target == 0) {
    throw InvalidArgument("sample_particles: sampling density yields zero particles");
  }

  Vec3 lo, hi;
  mesh.bounds(lo, hi);
  const double cell = std::cbrt(1.0 / params.sampling_density);
  const Eigen::Vector3i cells = ((hi - lo) / cell).array().ceil().cast<int>().max(1);

  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (mesh.item_id + 1)));
  std::vector<Vec3> accepted;
  accepted.reserve(target + target / 8 + 16);
  for (int k = 0; k < cells.z(); ++k) {
    for (int j = 0; j < cells.y(); ++j) {
      for (int i = 0; i < cells.x(); ++i) {
        const Vec3 jitter(unit_uniform(rng), unit_uniform(rng), unit_uniform(rng));
        const Vec3 p = lo + cell * (Vec3(i, j, k) + jitter);
        if (mesh.contains(p)) accepted.push_back(p);
      }
    }
  }

  if (accepted.size() > target) {
    // Drop a seeded random subset, keeping the survivors in lattice order.
    std::vector<std::size_t> order(accepted.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t drop = accepted.size() - target;
    for (std::size_t d = 0; d < drop; ++d) {
      const std::size_t span = order.size() - d;
      const std::size_t pick = d + static_cast<std::size_t>(unit_uniform(rng) * span) % span;
      std::swap(order[d], order[pick]);
    }
    std::vector<std::uint8_t> removed(accepted.size(), 0);
    for (std::size_t d = 0; d < drop; ++d) removed[order[d]] = 1;
    std::vector<Vec3> kept;
    kept.reserve(target);
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      if (!removed[i]) kept.push_back(accepted[i]);
    }
    accepted = std::move(kept);
  } else if (accepted.size() < target) {
    const Vec3 extent = hi - lo;
    std::size_t attempts = 0;
    const std::size_t max_attempts = 10000 * (target + 1);
    while (accepted.size() < target) {
      if (++attempts > max_attempts) {
        throw InvalidArgument("sample_particles: could not place particles inside the mesh");
      }
      const Vec3 p = lo + Vec3(unit_uniform(rng), unit_uniform(rng), unit_uniform(rng))
                              .cwiseProduct(extent);
      if (mesh.contains(p)) accepted.push_back(p);
    }
  }

  ParticleSet set;
  set.positions = std::move(accepted);
  set.particle_volume = mesh.volume / static_cast<double>(set.positions.size());
  set.particle_mass = set.particle_volume * params.mass_density;
  set.material_id = material_id;
  set.item_id = mesh.item_id;
  set.sampling_seed = seed;
  return set;
}

void write_obj(const std::filesystem::path& path, const FoodMesh& mesh) {
  if (!mesh.closed) throw InvalidArgument("write_obj: mesh is not closed");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# item " << mesh.item_id << " (" << mesh.category << ")\n";
  out.precision(9);
  std::size_t next = 1;
  auto quad = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    for (const Vec3* p : {&a, &b, &c, &d}) {
      out << "v " << p->x() << ' ' << p->y() << ' ' << p->z() << '\n';
    }
    out << "f " << next << ' ' << next + 1 << ' ' << next + 2 << ' ' << next + 3 << '\n';
    next += 4;
  };
  const RasterGrid& r = mesh.raster;
  for (int v = 0; v < mesh.rows; ++v) {
    for (int u = 0; u < mesh.cols; ++u) {
      const double h = mesh.column_height(u, v);
      if (h <= 0.0) continue;
      const double x0 = r.origin_x + u * r.pitch, x1 = x0 + r.pitch;
      const double z0 = r.origin_z + v * r.pitch, z1 = z0 + r.pitch;
      quad({x0, h, z0}, {x0, h, z1}, {x1, h, z1}, {x1, h, z0});
      quad({x0, 0, z0}, {x1, 0, z0}, {x1, 0, z1}, {x0, 0, z1});
      const double west = mesh.column_height(u - 1, v), east = mesh.column_height(u + 1, v);
      const double north = mesh.column_height(u, v - 1), south = mesh.column_height(u, v + 1);
      if (west < h) quad({x0, west, z0}, {x0, west, z1}, {x0, h, z1}, {x0, h, z0});
      if (east < h) quad({x1, east, z1}, {x1, east, z0}, {x1, h, z0}, {x1, h, z1});
      if (north < h) quad({x1, north, z0}, {x0, north, z0}, {x0, h, z0}, {x1, h, z0});
      if (south < h) quad({x0, south, z1}, {x1, south, z1}, {x1, h, z1}, {x0, h, z1});
    }
  }
}

}  // namespace preacq::geometry
