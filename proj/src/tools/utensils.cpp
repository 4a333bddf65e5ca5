#include "preacq/tools/utensils.hpp"

namespace preacq::tools {

void ForkDims::validate() const {
  if (tine_count < 1) throw InvalidArgument("fork needs at least one tine");
  if (!(tine_length > 0.0 && tine_radius > 0.0 && tine_spacing >= 0.0)) {
    throw InvalidArgument("fork tine dimensions must be positive");
  }
  if (!(neck_length >= 0.0 && handle_length >= 0.0)) {
    throw InvalidArgument("fork neck/handle lengths must be non-negative");
  }
}

ToolShape make_fork(const ForkDims& d) {
  d.validate();
  std::vector<Primitive> parts;
  const double x0 = -0.5 * (d.tine_count - 1) * d.tine_spacing;
  for (int k = 0; k < d.tine_count; ++k) {
    const double x = x0 + k * d.tine_spacing;
    parts.emplace_back(Capsule{Vec3(x, d.tine_radius, 0.0), Vec3(x, d.tine_length, 0.0),
                               d.tine_radius});
  }
  if (d.tine_web && d.tine_count > 1) {
    parts.emplace_back(Box{Vec3(0.0, 0.5 * (d.tine_radius + d.tine_length), 0.0),
                           Vec3(-x0, 0.5 * (d.tine_length - d.tine_radius), d.tine_radius)});
  }
  if (d.neck_length > 0.0) {
    parts.emplace_back(Box{Vec3(0.0, d.tine_length + 0.5 * d.neck_length, 0.0),
                           Vec3(0.5 * d.tine_span(), 0.5 * d.neck_length,
                                0.5 * d.neck_thickness)});
  }
  if (d.handle_length > 0.0) {
    parts.emplace_back(Box{Vec3(0.0, d.tine_length + d.neck_length + 0.5 * d.handle_length, 0.0),
                           Vec3(0.5 * d.handle_width, 0.5 * d.handle_length,
                                0.5 * d.handle_thickness)});
  }
  return ToolShape(std::move(parts));
}

void PlateDims::validate() const {
  if (!(radius > 0.0 && rim_height > 0.0 && base_thickness > 0.0)) {
    throw InvalidArgument("plate dimensions must be positive");
  }
  if (!(rim_height < radius)) throw InvalidArgument("plate rim taller than the plate radius");
}

ToolShape make_plate(const PlateDims& d) {
  d.validate();
  std::vector<Primitive> parts;
  parts.emplace_back(Cylinder{Vec3(0.0, -0.5 * d.base_thickness, 0.0), d.radius,
                              0.5 * d.base_thickness});
  parts.emplace_back(Torus{Vec3::Zero(), d.radius, d.rim_height});
  return ToolShape(std::move(parts), d.blend);
}

ToolShape make_plate_rim(const PlateDims& d) {
  d.validate();
  return ToolShape({Torus{Vec3::Zero(), d.radius, d.rim_height}});
}

ToolShape make_ground(double half_extent, double thickness) {
  return ToolShape({Box{Vec3(0.0, -0.5 * thickness, 0.0),
                        Vec3(half_extent, 0.5 * thickness, half_extent)}});
}

}  // namespace preacq::tools
