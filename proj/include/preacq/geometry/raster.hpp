#pragma once

#include <cstdint>
#include <vector>

#include "preacq/common.hpp"

namespace preacq::geometry {

/// Placement of a top-down raster in the world xz plane. Pixel (u, v) covers
/// x in [origin_x + u*pitch, origin_x + (u+1)*pitch) and likewise z for v.
struct RasterGrid {
  int width = 128;
  int height = 128;
  double pitch = 0.24 / 128.0;  // m per pixel
  double origin_x = 0.0;
  double origin_z = 0.0;

  double center_x(int u) const { return origin_x + (u + 0.5) * pitch; }
  double center_z(int v) const { return origin_z + (v + 0.5) * pitch; }
  /// Pixel containing world (x, z); may be out of range.
  int column_of(double x) const;
  int row_of(double z) const;
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
  std::size_t size() const { return static_cast<std::size_t>(width) * height; }

  /// Square raster of `pixels` per side centred on (cx, cz) spanning `extent` metres.
  static RasterGrid centered(double cx, double cz, double extent, int pixels);
};

/// Heights above the plate plane, row-major (row v, column u).
struct DepthMap {
  int width = 0;
  int height = 0;
  double pixel_pitch = 0.0;
  std::vector<double> values;

  static DepthMap zeros(int width, int height, double pixel_pitch);

  double at(int u, int v) const { return values[index(u, v)]; }
  double& at(int u, int v) { return values[index(u, v)]; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width + static_cast<std::size_t>(u);
  }

  /// Throws InvalidArgument unless dims >= 2, pitch > 0 and every value is
  /// finite and non-negative.
  void validate() const;

  bool operator==(const DepthMap&) const = default;
};

/// 8-bit instance labels; 0 is background.
struct SegMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  static SegMask background(int width, int height);

  std::uint8_t at(int u, int v) const { return labels[index(u, v)]; }
  std::uint8_t& at(int u, int v) { return labels[index(u, v)]; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width + static_cast<std::size_t>(u);
  }
  bool contains_label(ItemId id) const;
  /// Sorted distinct non-zero labels.
  std::vector<ItemId> item_ids() const;

  bool operator==(const SegMask&) const = default;
};

}  // namespace preacq::geometry
