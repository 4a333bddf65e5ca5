#include "preacq/geometry/raster.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace preacq::geometry {

int RasterGrid::column_of(double x) const {
  return static_cast<int>(std::floor((x - origin_x) / pitch));
}

int RasterGrid::row_of(double z) const {
  return static_cast<int>(std::floor((z - origin_z) / pitch));
}

RasterGrid RasterGrid::centered(double cx, double cz, double extent, int pixels) {
  RasterGrid g;
  g.width = pixels;
  g.height = pixels;
  g.pitch = extent / pixels;
  g.origin_x = cx - 0.5 * extent;
  g.origin_z = cz - 0.5 * extent;
  return g;
}

DepthMap DepthMap::zeros(int width, int height, double pixel_pitch) {
  DepthMap d;
  d.width = width;
  d.height = height;
  d.pixel_pitch = pixel_pitch;
  d.values.assign(static_cast<std::size_t>(width) * height, 0.0);
  return d;
}

void DepthMap::validate() const {
  if (width < 2 || height < 2) throw InvalidArgument("depth map must be at least 2x2");
  if (!(pixel_pitch > 0.0)) throw InvalidArgument("depth map pixel pitch must be positive");
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("depth map value count does not match its dimensions");
  }
  for (double h : values) {
    if (!std::isfinite(h)) throw InvalidArgument("depth map contains a non-finite value");
    if (h < 0.0) throw InvalidArgument("depth map contains a negative height");
  }
}

SegMask SegMask::background(int width, int height) {
  SegMask m;
  m.width = width;
  m.height = height;
  m.labels.assign(static_cast<std::size_t>(width) * height, 0);
  return m;
}

bool SegMask::contains_label(ItemId id) const {
  if (id == kBackground || id > kMaxItemId) return false;
  return std::find(labels.begin(), labels.end(), static_cast<std::uint8_t>(id)) != labels.end();
}

std::vector<ItemId> SegMask::item_ids() const {
  std::set<ItemId> ids;
  for (auto l : labels) {
    if (l != 0) ids.insert(l);
  }
  return {ids.begin(), ids.end()};
}

}  // namespace preacq::geometry
