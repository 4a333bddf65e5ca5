#include "preacq/tools/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace preacq::tools {

ToolTrajectory::ToolTrajectory(std::vector<Keyframe> keyframes) : keys_(std::move(keyframes)) {
  if (keys_.empty()) return;
  if (keys_.front().time != 0.0) throw InvalidArgument("trajectory must start at t = 0");
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    keys_[i].pose.validate();
    if (i > 0 && !(keys_[i].time > keys_[i - 1].time)) {
      throw InvalidArgument("trajectory keyframe times must strictly increase");
    }
  }
}

ToolTrajectory ToolTrajectory::stationary(const Pose& pose) {
  return ToolTrajectory({Keyframe{0.0, pose}});
}

double ToolTrajectory::end_time() const {
  if (keys_.empty()) throw InvalidArgument("empty trajectory");
  return keys_.back().time;
}

void ToolTrajectory::append(double dt, const Pose& pose) {
  if (keys_.empty()) {
    keys_.push_back({0.0, pose});
    return;
  }
  if (!(dt > 0.0)) throw InvalidArgument("keyframe spacing must be positive");
  pose.validate();
  keys_.push_back({keys_.back().time + dt, pose});
}

std::size_t ToolTrajectory::segment(double t) const {
  // Index i with keys_[i].time <= t < keys_[i+1].time.
  auto it = std::upper_bound(keys_.begin(), keys_.end(), t,
                             [](double value, const Keyframe& k) { return value < k.time; });
  if (it == keys_.begin()) return 0;
  return static_cast<std::size_t>(it - keys_.begin()) - 1;
}

Pose ToolTrajectory::pose_at(double t) const {
  if (keys_.empty()) throw InvalidArgument("pose_at on an empty trajectory");
  if (t <= 0.0) return keys_.front().pose;
  if (t >= keys_.back().time) return keys_.back().pose;
  const std::size_t i = segment(t);
  const Keyframe& a = keys_[i];
  const Keyframe& b = keys_[i + 1];
  const double s = (t - a.time) / (b.time - a.time);
  Pose p;
  p.translation = (1.0 - s) * a.pose.translation + s * b.pose.translation;
  p.rotation = a.pose.rotation.slerp(s, b.pose.rotation).normalized();
  return p;
}

void ToolTrajectory::twist_at(double t, Vec3& linear, Vec3& angular) const {
  if (keys_.empty()) throw InvalidArgument("velocity_at on an empty trajectory");
  linear.setZero();
  angular.setZero();
  if (t < 0.0 || t >= keys_.back().time) return;
  const std::size_t i = segment(t);
  const Keyframe& a = keys_[i];
  const Keyframe& b = keys_[i + 1];
  const double dt = b.time - a.time;
  linear = (b.pose.translation - a.pose.translation) / dt;
  Quat delta = b.pose.rotation * a.pose.rotation.conjugate();
  // Shortest arc, matching Eigen's slerp.
  if (a.pose.rotation.dot(b.pose.rotation) < 0.0) delta.coeffs() *= -1.0;
  const Eigen::AngleAxisd aa(delta.normalized());
  angular = aa.axis() * (aa.angle() / dt);
}

Vec3 ToolTrajectory::velocity_at(double t, const Vec3& x) const {
  Vec3 linear, angular;
  twist_at(t, linear, angular);
  if (angular.isZero(0.0)) return linear;
  const Vec3 c = pose_at(t).translation;
  return linear + angular.cross(x - c);
}

}  // namespace preacq::tools
