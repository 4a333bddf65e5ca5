#pragma once

#include <string>

#include "preacq/common.hpp"
#include "preacq/geometry/raster.hpp"

namespace preacq::geometry {

/// Analytic food shapes expressed as heightfields over the plate.
///
///   box        length x width x height, long side along `yaw`
///   cylinder   lying cylinder (axis horizontal along `yaw`): radius, length.
///              A short one is a slice standing on its edge. The region
///              under the lower half is filled, since heightfields cannot
///              represent overhangs.
///   disc       upright flat disc: radius, height
///   cone_pile  conical heap: radius, height
///   hemisphere dome: radius
struct HeightPrimitive {
  enum class Kind { Box, Cylinder, Disc, ConePile, Hemisphere };

  Kind kind = Kind::Box;
  double center_x = 0.0;
  double center_z = 0.0;
  double yaw = 0.0;  // rad, long axis turned from +x toward +z
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double radius = 0.0;

  /// Height above the plate at world (x, z); 0 outside the footprint.
  double height_at(double x, double z) const;

  static Kind kind_from_string(const std::string& name);
  static std::string to_string(Kind kind);
};

/// Height of `prim` sampled at every pixel centre.
DepthMap rasterize(const HeightPrimitive& prim, const RasterGrid& raster);

/// Writes `prim` into a shared plate depth/mask pair under `item_id`.
/// Throws InvalidArgument when its footprint overlaps another item or is
/// empty at this resolution.
void stamp(const HeightPrimitive& prim, ItemId item_id, const RasterGrid& raster,
           DepthMap& depth, SegMask& mask);

}  // namespace preacq::geometry
