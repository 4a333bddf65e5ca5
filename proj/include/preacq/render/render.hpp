#pragma once

#include <cstdint>
#include <functional>

#include "preacq/geometry/raster.hpp"
#include "preacq/sim/world.hpp"

namespace preacq::render {

/// How splats claim pixels.
enum class Coverage {
  /// A pixel is covered when its centre lies under a splat disc; the height is
  /// the highest sphere top at the centre.
  PixelCenter,
  /// A pixel is covered when a splat disc overlaps the pixel square; the
  /// height is the sphere top at the point of the square nearest the splat.
  PixelArea,
  /// Footprint as PixelCenter, height and label as PixelArea. Footprints stay
  /// unbiased while pixels that fall between top-layer splats still see the
  /// top layer.
  CenterPooled,
};

/// Orthographic top-down camera. Heights are measured from the world plane
/// y = plane_height and clipped to [0, max_height].
struct CameraSpec {
  geometry::RasterGrid raster;
  double plane_height = 0.0;
  double max_height = 0.3;
  Coverage coverage = Coverage::CenterPooled;

  void validate() const;
  /// Square camera over a plate of `radius` centred at (cx, plane_y, cz).
  static CameraSpec over_plate(const Vec3& plate_center, double radius, int pixels = 128);
};

struct Frame {
  geometry::DepthMap depth;
  geometry::SegMask mask;
};

/// Splat radius for a particle of rest volume V: 0.5 V^(1/3).
double splat_radius(double volume);

/// Depth and labels in one pass. Ties in height go to the lower particle index.
Frame render_frame(const sim::SimWorld& world, const CameraSpec& camera);
geometry::DepthMap render_depth(const sim::SimWorld& world, const CameraSpec& camera);
geometry::SegMask render_masks(const sim::SimWorld& world, const CameraSpec& camera);

enum class RenderMode { OnDemand, EveryStep };

RenderMode render_mode_from_string(const std::string& name);
std::string to_string(RenderMode mode);

/// Counts every raster invocation made through it.
class RenderPolicy {
 public:
  explicit RenderPolicy(RenderMode mode = RenderMode::OnDemand) : mode_(mode) {}

  RenderMode mode() const { return mode_; }
  std::int64_t render_count() const { return count_; }
  Frame render(const sim::SimWorld& world, const CameraSpec& camera) {
    ++count_;
    return render_frame(world, camera);
  }

 private:
  RenderMode mode_;
  std::int64_t count_ = 0;
};

/// Called after every step; returning true ends the rollout early.
using StepHook = std::function<bool(const sim::SimWorld&)>;

struct RolloutResult {
  sim::SimWorld world;
  Frame frame;
  std::int64_t steps = 0;
  bool stopped_early = false;
};

/// Binds `trajectory` to tool `tool_index` on a clock starting now, steps
/// `max_steps` times (or until the hook stops it) and renders the final state.
/// EveryStep additionally renders after each step; those frames are discarded.
RolloutResult rollout_with_policy(sim::SimWorld world, std::size_t tool_index,
                                  const tools::ToolTrajectory& trajectory, std::int64_t max_steps,
                                  const CameraSpec& camera, RenderPolicy& policy,
                                  const StepHook& hook = {});

}  // namespace preacq::render
