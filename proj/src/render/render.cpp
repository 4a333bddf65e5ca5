#include "preacq/render/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace preacq::render {

void CameraSpec::validate() const {
  if (raster.width < 2 || raster.height < 2) throw InvalidArgument("camera needs at least 2x2 pixels");
  if (!(raster.pitch > 0.0)) throw InvalidArgument("camera pixel pitch must be positive");
  if (!(max_height > 0.0)) throw InvalidArgument("camera height range must be positive");
}

CameraSpec CameraSpec::over_plate(const Vec3& plate_center, double radius, int pixels) {
  CameraSpec cam;
  cam.raster = geometry::RasterGrid::centered(plate_center.x(), plate_center.z(), 2.0 * radius,
                                              pixels);
  cam.plane_height = plate_center.y();
  return cam;
}

double splat_radius(double volume) { return 0.5 * std::cbrt(volume); }

Frame render_frame(const sim::SimWorld& world, const CameraSpec& camera) {
  camera.validate();
  const auto& r = camera.raster;
  Frame f;
  f.depth = geometry::DepthMap::zeros(r.width, r.height, r.pitch);
  f.mask = geometry::SegMask::background(r.width, r.height);
  // Best splat top per pixel; -inf means uncovered.
  std::vector<double> top(r.size(), -std::numeric_limits<double>::infinity());
  // CenterPooled: whether any splat covers the pixel centre.
  std::vector<std::uint8_t> centre;
  const double half = 0.5 * r.pitch;
  const bool pooled = camera.coverage == Coverage::CenterPooled;
  const bool area = camera.coverage == Coverage::PixelArea || pooled;
  const double reach = area ? half : 0.0;
  if (pooled) centre.assign(r.size(), 0);

  for (const sim::Particle& p : world.particles) {
    const double rad = splat_radius(p.volume);
    const double rad2 = rad * rad;
    const int u0 = std::max(0, r.column_of(p.x.x() - rad - reach));
    const int u1 = std::min(r.width - 1, r.column_of(p.x.x() + rad + reach));
    const int v0 = std::max(0, r.row_of(p.x.z() - rad - reach));
    const int v1 = std::min(r.height - 1, r.row_of(p.x.z() + rad + reach));
    const double base = p.x.y() - camera.plane_height;
    for (int v = v0; v <= v1; ++v) {
      const double ez = p.x.z() - r.center_z(v);
      const double dz = area ? std::max(0.0, std::abs(ez) - half) : ez;
      for (int u = u0; u <= u1; ++u) {
        const double ex = p.x.x() - r.center_x(u);
        const double dx = area ? std::max(0.0, std::abs(ex) - half) : ex;
        const double d2 = dx * dx + dz * dz;
        if (d2 > rad2) continue;
        const std::size_t idx = f.depth.index(u, v);
        if (pooled && ex * ex + ez * ez <= rad2) centre[idx] = 1;
        const double h = base + std::sqrt(rad2 - d2);
        if (h > top[idx]) {
          top[idx] = h;
          f.mask.labels[idx] = static_cast<std::uint8_t>(std::min<ItemId>(p.item, kMaxItemId));
        }
      }
    }
  }
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (top[i] == -std::numeric_limits<double>::infinity()) continue;
    if (pooled && !centre[i]) {
      f.mask.labels[i] = 0;
      continue;
    }
    f.depth.values[i] = std::clamp(top[i], 0.0, camera.max_height);
  }
  return f;
}

geometry::DepthMap render_depth(const sim::SimWorld& world, const CameraSpec& camera) {
  return render_frame(world, camera).depth;
}

geometry::SegMask render_masks(const sim::SimWorld& world, const CameraSpec& camera) {
  return render_frame(world, camera).mask;
}

RenderMode render_mode_from_string(const std::string& name) {
  if (name == "on-demand") return RenderMode::OnDemand;
  if (name == "every-step") return RenderMode::EveryStep;
  throw InvalidArgument("unknown render mode '" + name + "'");
}

std::string to_string(RenderMode mode) {
  return mode == RenderMode::OnDemand ? "on-demand" : "every-step";
}

RolloutResult rollout_with_policy(sim::SimWorld world, std::size_t tool_index,
                                  const tools::ToolTrajectory& trajectory, std::int64_t max_steps,
                                  const CameraSpec& camera, RenderPolicy& policy,
                                  const StepHook& hook) {
  if (tool_index >= world.tools.size()) throw InvalidArgument("rollout tool index out of range");
  if (max_steps < 0) throw InvalidArgument("negative rollout step count");
  auto& tool = world.tools[tool_index];
  if (!trajectory.empty()) {
    tool.trajectory = trajectory;
    tool.clock_start = world.time;
  }
  RolloutResult out;
  for (std::int64_t i = 0; i < max_steps; ++i) {
    world.step();
    ++out.steps;
    if (policy.mode() == RenderMode::EveryStep) (void)policy.render(world, camera);
    if (hook && hook(world)) {
      out.stopped_early = true;
      break;
    }
  }
  out.frame = policy.render(world, camera);
  out.world = std::move(world);
  return out;
}

}  // namespace preacq::render
