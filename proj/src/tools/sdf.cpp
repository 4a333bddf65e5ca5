#include "preacq/tools/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace preacq::tools {
namespace {

double distance(const Sphere& s, const Vec3& p) { return (p - s.center).norm() - s.radius; }

double distance(const Box& b, const Vec3& p) {
  const Vec3 q = (p - b.center).cwiseAbs() - b.half_extents;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

double distance(const Capsule& c, const Vec3& p) {
  const Vec3 pa = p - c.a;
  const Vec3 ba = c.b - c.a;
  const double t = std::clamp(pa.dot(ba) / ba.squaredNorm(), 0.0, 1.0);
  return (pa - t * ba).norm() - c.radius;
}

double distance(const Cylinder& c, const Vec3& p) {
  const Vec3 d3 = p - c.center;
  const double dr = std::hypot(d3.x(), d3.z()) - c.radius;
  const double dy = std::abs(d3.y()) - c.half_height;
  return std::min(std::max(dr, dy), 0.0) + std::hypot(std::max(dr, 0.0), std::max(dy, 0.0));
}

double distance(const Torus& t, const Vec3& p) {
  const Vec3 d3 = p - t.center;
  const double qx = std::hypot(d3.x(), d3.z()) - t.major_radius;
  return std::hypot(qx, d3.y()) - t.minor_radius;
}

}  // namespace

void Pose::validate() const {
  if (std::abs(rotation.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("pose rotation is not a unit quaternion");
  }
}

double primitive_distance(const Primitive& prim, const Vec3& p) {
  return std::visit([&](const auto& shape) { return distance(shape, p); }, prim);
}

double smooth_union(double a, double b, double k) {
  if (k <= 0.0) return std::min(a, b);
  const double h = std::max(k - std::abs(a - b), 0.0) / k;
  return std::min(a, b) - 0.25 * h * h * k;
}

double ToolShape::distance_local(const Vec3& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& part : parts_) d = smooth_union(d, primitive_distance(part, p), blend_);
  return d;
}

double sdf_eval(const ToolShape& shape, const Pose& pose, const Vec3& x) {
  return shape.distance_local(pose.to_local(x));
}

Vec3 sdf_gradient(const ToolShape& shape, const Pose& pose, const Vec3& x, double h) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = h;
    g[a] = (sdf_eval(shape, pose, x + e) - sdf_eval(shape, pose, x - e)) / (2.0 * h);
  }
  return g;
}

Vec3 sdf_normal(const ToolShape& shape, const Pose& pose, const Vec3& x, double h) {
  const Vec3 g = sdf_gradient(shape, pose, x, h);
  const double n = g.norm();
  if (!(n > 0.0)) return Vec3::UnitY();
  return g / n;
}

}  // namespace preacq::tools
