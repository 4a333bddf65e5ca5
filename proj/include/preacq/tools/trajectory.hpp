#pragma once

#include <vector>

#include "preacq/tools/sdf.hpp"

namespace preacq::tools {

struct Keyframe {
  double time = 0.0;
  Pose pose;
};

/// Keyframed rigid motion: linear in translation, slerp in rotation, holding
/// the last pose after the final keyframe.
class ToolTrajectory {
 public:
  ToolTrajectory() = default;
  /// Throws InvalidArgument unless times start at 0 and strictly increase.
  explicit ToolTrajectory(std::vector<Keyframe> keyframes);

  static ToolTrajectory stationary(const Pose& pose);

  Pose pose_at(double t) const;
  /// Rigid velocity of the material point currently at world x:
  /// v_lin + omega x (x - c), c the pose origin. Zero past the last keyframe.
  Vec3 velocity_at(double t, const Vec3& x) const;
  /// Per-segment linear and angular velocity at time t.
  void twist_at(double t, Vec3& linear, Vec3& angular) const;

  bool empty() const { return keys_.empty(); }
  double end_time() const;
  const std::vector<Keyframe>& keyframes() const { return keys_; }

  /// Appends a keyframe `dt` after the current end.
  void append(double dt, const Pose& pose);

 private:
  std::size_t segment(double t) const;

  std::vector<Keyframe> keys_;
};

}  // namespace preacq::tools
