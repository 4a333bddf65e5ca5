#pragma once

#include "preacq/tools/sdf.hpp"

namespace preacq::tools {

/// Feeding fork. Local frame: tine tips at y = 0 with tines running up +y,
/// tines side by side along x (the tine plane is local xy), centred on x = 0
/// and z = 0. Neck and handle continue along +y.
struct ForkDims {
  int tine_count = 4;
  double tine_length = 0.035;
  double tine_radius = 0.001;
  double tine_spacing = 0.005;
  double neck_length = 0.015;
  double neck_thickness = 0.002;
  double handle_length = 0.10;
  double handle_width = 0.012;
  double handle_thickness = 0.004;
  // Closes the gaps between tines with a slab as thick as a tine. The gaps are
  // narrower than a rice grain and below one grid cell at the usual
  // resolutions, so without it continuum food leaks through the fork.
  bool tine_web = true;

  /// Distance between outer tine surfaces across the tine plane.
  double tine_span() const { return (tine_count - 1) * tine_spacing + 2.0 * tine_radius; }
  void validate() const;
};

ToolShape make_fork(const ForkDims& dims);

/// Plate: flat disc whose top face sits at local y = 0, with a torus rim
/// around its edge. Local origin is the centre of the top face.
struct PlateDims {
  double radius = 0.12;
  double rim_height = 0.015;  // torus minor radius; rim top = rim_height above the face
  double base_thickness = 0.01;
  double blend = 0.0;

  /// Radius where the rim's inner wall meets the plate face.
  double wall_radius() const { return radius - rim_height; }
  void validate() const;
};

ToolShape make_plate(const PlateDims& dims);
/// Just the rim torus, used to measure distance to the plate wall.
ToolShape make_plate_rim(const PlateDims& dims);

/// Large slab whose top face is local y = 0.
ToolShape make_ground(double half_extent, double thickness);

}  // namespace preacq::tools
