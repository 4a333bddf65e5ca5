#include "preacq/geometry/primitives.hpp"

#include <cmath>

namespace preacq::geometry {

double HeightPrimitive::height_at(double x, double z) const {
  const double dx = x - center_x;
  const double dz = z - center_z;
  // Coordinates along / across the long axis.
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double along = c * dx + s * dz;
  const double across = -s * dx + c * dz;
  const double rho = std::hypot(dx, dz);
  switch (kind) {
    case Kind::Box:
      if (std::abs(along) <= 0.5 * length && std::abs(across) <= 0.5 * width) return height;
      return 0.0;
    case Kind::Cylinder:
      if (std::abs(along) > 0.5 * length || std::abs(across) >= radius) return 0.0;
      return radius + std::sqrt(radius * radius - across * across);
    case Kind::Disc:
      return rho <= radius ? height : 0.0;
    case Kind::ConePile:
      return rho < radius ? height * (1.0 - rho / radius) : 0.0;
    case Kind::Hemisphere:
      return rho < radius ? std::sqrt(radius * radius - rho * rho) : 0.0;
  }
  return 0.0;
}

HeightPrimitive::Kind HeightPrimitive::kind_from_string(const std::string& name) {
  if (name == "box") return Kind::Box;
  if (name == "cylinder") return Kind::Cylinder;
  if (name == "disc") return Kind::Disc;
  if (name == "cone_pile") return Kind::ConePile;
  if (name == "hemisphere") return Kind::Hemisphere;
  throw InvalidArgument("unknown primitive '" + name + "'");
}

std::string HeightPrimitive::to_string(Kind kind) {
  switch (kind) {
    case Kind::Box:
      return "box";
    case Kind::Cylinder:
      return "cylinder";
    case Kind::Disc:
      return "disc";
    case Kind::ConePile:
      return "cone_pile";
    case Kind::Hemisphere:
      return "hemisphere";
  }
  return "unknown";
}

DepthMap rasterize(const HeightPrimitive& prim, const RasterGrid& raster) {
  DepthMap d = DepthMap::zeros(raster.width, raster.height, raster.pitch);
  for (int v = 0; v < raster.height; ++v) {
    for (int u = 0; u < raster.width; ++u) {
      d.at(u, v) = prim.height_at(raster.center_x(u), raster.center_z(v));
    }
  }
  return d;
}

void stamp(const HeightPrimitive& prim, ItemId item_id, const RasterGrid& raster,
           DepthMap& depth, SegMask& mask) {
  if (item_id == kBackground || item_id > kMaxItemId) {
    throw InvalidArgument("item id must be in 1..255");
  }
  const DepthMap d = rasterize(prim, raster);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (d.values[i] <= 0.0) continue;
    if (mask.labels[i] != 0 && mask.labels[i] != item_id) {
      throw InvalidArgument("item " + std::to_string(item_id) + " overlaps item " +
                            std::to_string(mask.labels[i]));
    }
    depth.values[i] = d.values[i];
    mask.labels[i] = static_cast<std::uint8_t>(item_id);
    ++covered;
  }
  if (covered == 0) {
    throw InvalidArgument("item " + std::to_string(item_id) + " covers no pixels");
  }
}

}  // namespace preacq::geometry
