#pragma once

#include <variant>
#include <vector>

#include "preacq/common.hpp"

namespace preacq::tools {

/// Rigid transform local -> world: x_world = rotation * x_local + translation.
struct Pose {
  Vec3 translation = Vec3::Zero();
  Quat rotation = Quat::Identity();

  Vec3 apply(const Vec3& local) const { return rotation * local + translation; }
  Vec3 to_local(const Vec3& world) const { return rotation.conjugate() * (world - translation); }
  void validate() const;
};

// Exact signed distances, negative inside, all in the tool's local frame.
struct Sphere {
  Vec3 center;
  double radius;
};
struct Box {
  Vec3 center;
  Vec3 half_extents;
};
struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius;
};
/// Capped cylinder with its axis along local y.
struct Cylinder {
  Vec3 center;
  double radius;
  double half_height;
};
/// Torus in the local xz plane (axis y).
struct Torus {
  Vec3 center;
  double major_radius;
  double minor_radius;
};

using Primitive = std::variant<Sphere, Box, Capsule, Cylinder, Torus>;

double primitive_distance(const Primitive& prim, const Vec3& p);

/// Polynomial smooth minimum; k <= 0 degenerates to min(a, b).
double smooth_union(double a, double b, double k);

/// Union of analytic primitives in a local frame.
class ToolShape {
 public:
  ToolShape() = default;
  explicit ToolShape(std::vector<Primitive> parts, double blend = 0.0)
      : parts_(std::move(parts)), blend_(blend) {}

  double distance_local(const Vec3& p) const;
  const std::vector<Primitive>& parts() const { return parts_; }
  double blend() const { return blend_; }

 private:
  std::vector<Primitive> parts_;
  double blend_ = 0.0;
};

/// Signed distance of world point x to `shape` placed at `pose`.
double sdf_eval(const ToolShape& shape, const Pose& pose, const Vec3& x);

/// grad(phi) / |grad(phi)| by central differences with step h. Falls back to
/// +y when the gradient vanishes.
Vec3 sdf_normal(const ToolShape& shape, const Pose& pose, const Vec3& x, double h);

/// Central-difference gradient, not normalised.
Vec3 sdf_gradient(const ToolShape& shape, const Pose& pose, const Vec3& x, double h);

}  // namespace preacq::tools
