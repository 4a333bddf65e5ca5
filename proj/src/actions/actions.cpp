#include "preacq/actions/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace preacq::actions {

namespace {

std::vector<sim::Particle> particles_of(const sim::SimWorld& world, ItemId item) {
  std::vector<sim::Particle> out;
  for (const auto& p : world.particles) {
    if (p.item == item) out.push_back(p);
  }
  if (out.empty()) throw InvalidArgument("item " + std::to_string(item) + " has no particles");
  return out;
}

Quat rotation_from_columns(const Vec3& x, const Vec3& y, const Vec3& z) {
  Mat3 r;
  r.col(0) = x.normalized();
  r.col(1) = y.normalized();
  r.col(2) = z.normalized();
  return Quat(r).normalized();
}

Vec3 horizontal(const Vec3& v) { return Vec3(v.x(), 0.0, v.z()); }

// Lowest local-x coordinate reached by the tines (tine row runs along local x).
double tine_row_half_span(const tools::ForkDims& f) {
  return 0.5 * (f.tine_count - 1) * f.tine_spacing + f.tine_radius;
}

double min_projection(const std::vector<sim::Particle>& ps, const Vec3& origin, const Vec3& dir) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : ps) m = std::min(m, (p.x - origin).dot(dir));
  return m;
}

std::int64_t hash_cell(const Vec3& x, double cell) {
  constexpr std::int64_t off = 1 << 20;
  const auto i = static_cast<std::int64_t>(std::floor(x.x() / cell)) + off;
  const auto j = static_cast<std::int64_t>(std::floor(x.y() / cell)) + off;
  const auto k = static_cast<std::int64_t>(std::floor(x.z() / cell)) + off;
  return (i << 42) | (j << 21) | k;
}

tools::Pose plate_pose(const scene::Scene& s) {
  tools::Pose p;
  p.translation = s.plate_center;
  return p;
}

// Vertical descent from above the item to `low`, as the first keyframes.
std::vector<tools::Keyframe> descent(const scene::Scene& s, const ItemGeometry& g,
                                     const tools::Pose& low, double lowest_local_y_offset,
                                     const ActionParams& prm) {
  tools::Pose high = low;
  const double top = s.plate_center.y() + g.max_height + prm.approach_clearance;
  // Raise until the fork's lowest point clears the item top.
  const double lowest = low.translation.y() + lowest_local_y_offset;
  const double lift = std::max(0.0, top - lowest);
  high.translation.y() += lift;
  std::vector<tools::Keyframe> keys{{0.0, high}};
  if (lift > 0.0) keys.push_back({lift / prm.descent_speed, low});
  return keys;
}

}  // namespace

Vec3 direction_vector(PushDirection d) {
  switch (d) {
    case PushDirection::PlusX: return Vec3::UnitX();
    case PushDirection::MinusX: return -Vec3::UnitX();
    case PushDirection::PlusZ: return Vec3::UnitZ();
    case PushDirection::MinusZ: return -Vec3::UnitZ();
  }
  return Vec3::UnitX();
}

std::string to_string(PushDirection d) {
  switch (d) {
    case PushDirection::PlusX: return "+x";
    case PushDirection::MinusX: return "-x";
    case PushDirection::PlusZ: return "+z";
    case PushDirection::MinusZ: return "-z";
  }
  return "?";
}

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Push: return "push";
    case ActionKind::Cut: return "cut";
    case ActionKind::Flip: return "flip";
  }
  return "?";
}

std::string ActionSpec::label() const {
  if (kind == ActionKind::Push) return "push" + to_string(direction);
  return to_string(kind);
}

ActionSpec ActionSpec::from_label(const std::string& label, ItemId target) {
  for (const auto& s : candidate_actions(target)) {
    if (s.label() == label) return s;
  }
  throw InvalidArgument("unknown action '" + label + "'");
}

std::vector<ActionSpec> candidate_actions(ItemId target) {
  return {{ActionKind::Push, PushDirection::PlusX, target},
          {ActionKind::Push, PushDirection::MinusX, target},
          {ActionKind::Push, PushDirection::PlusZ, target},
          {ActionKind::Push, PushDirection::MinusZ, target},
          {ActionKind::Cut, PushDirection::PlusX, target},
          {ActionKind::Flip, PushDirection::PlusX, target}};
}

void ActionParams::validate() const {
  for (double v : {descent_speed, push_speed, cut_speed, flick_speed, flip_speed}) {
    if (!(v > 0.0)) throw InvalidArgument("action speeds must be positive");
  }
  if (!(approach_gap >= 0.0 && approach_clearance >= 0.0)) {
    throw InvalidArgument("approach offsets must be non-negative");
  }
  if (!(monitor_distance > 0.0 && fragment_radius > 0.0)) {
    throw InvalidArgument("monitor and fragment radii must be positive");
  }
  if (!(flip_height_fraction > 0.0 && flip_height_fraction < 1.0)) {
    throw InvalidArgument("flip height fraction must be in (0, 1)");
  }
  if (!(post_action_settle >= 0.0 && max_duration > 0.0)) {
    throw InvalidArgument("rollout durations must be positive");
  }
}

// ---------------------------------------------------------------------------

TerminationMonitor TerminationMonitor::completion(double end_time) {
  TerminationMonitor m;
  m.kind_ = Kind::Completion;
  m.end_time_ = end_time;
  return m;
}

TerminationMonitor TerminationMonitor::contact(ItemId target, double distance, double travel_cap,
                                               double phase_start, const Vec3& direction,
                                               std::shared_ptr<const tools::ToolShape> rim,
                                               const tools::Pose& plate_pose, double end_time) {
  TerminationMonitor m;
  m.kind_ = Kind::Contact;
  m.target_ = target;
  m.distance_ = distance;
  m.travel_cap_ = travel_cap;
  m.phase_start_ = phase_start;
  m.direction_ = direction.normalized();
  m.rim_ = std::move(rim);
  m.plate_pose_ = plate_pose;
  m.end_time_ = end_time;
  return m;
}

double TerminationMonitor::travel(const tools::ToolTrajectory& traj, double local_time) const {
  if (local_time <= phase_start_) return 0.0;
  const Vec3 d = traj.pose_at(local_time).translation - traj.pose_at(phase_start_).translation;
  return d.dot(direction_);
}

double TerminationMonitor::rim_distance(const sim::SimWorld& world) const {
  double m = std::numeric_limits<double>::infinity();
  if (!rim_) return m;
  for (const auto& p : world.particles) {
    if (p.item != target_) continue;
    m = std::min(m, tools::sdf_eval(*rim_, plate_pose_, p.x));
  }
  return m;
}

double TerminationMonitor::item_distance(const sim::SimWorld& world) const {
  // Exact below distance_, +inf beyond it.
  const double cell = std::max(distance_, 1e-9);
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> others;
  for (std::size_t i = 0; i < world.particles.size(); ++i) {
    const auto& p = world.particles[i];
    if (p.item == target_) continue;
    others[hash_cell(p.x, cell)].push_back(static_cast<std::uint32_t>(i));
  }
  if (others.empty()) return std::numeric_limits<double>::infinity();
  double best2 = distance_ * distance_;
  bool found = false;
  for (const auto& p : world.particles) {
    if (p.item != target_) continue;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          const Vec3 q = p.x + cell * Vec3(a, b, c);
          auto it = others.find(hash_cell(q, cell));
          if (it == others.end()) continue;
          for (std::uint32_t j : it->second) {
            const double d2 = (world.particles[j].x - p.x).squaredNorm();
            if (d2 <= best2) {
              best2 = d2;
              found = true;
            }
          }
        }
  }
  return found ? std::sqrt(best2) : std::numeric_limits<double>::infinity();
}

bool TerminationMonitor::fired(const sim::SimWorld& world, const tools::ToolTrajectory& traj,
                               double local_time, std::string& reason) const {
  if (kind_ == Kind::Completion) {
    if (local_time >= end_time_ - 1e-12) {
      reason = "complete";
      return true;
    }
    return false;
  }
  if (rim_distance(world) <= distance_) {
    reason = "rim";
    return true;
  }
  if (item_distance(world) <= distance_) {
    reason = "item";
    return true;
  }
  if (travel(traj, local_time) >= travel_cap_ - 1e-12) {
    reason = "travel";
    return true;
  }
  if (local_time >= end_time_ - 1e-12) {
    reason = "complete";
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

bool approach_is_clear(const scene::Scene& scene, const tools::ToolTrajectory& traj,
                       double until_time) {
  const auto& fork = *scene.world.tools.at(scene.fork_tool).shape;
  const auto& plate = *scene.world.tools.at(scene.plate_tool).shape;
  const tools::Pose ppose = plate_pose(scene);
  const double step = 0.25 * scene.world.dx();
  double length = 0.0;
  const auto& keys = traj.keyframes();
  for (std::size_t i = 1; i < keys.size() && keys[i - 1].time < until_time; ++i) {
    length += (keys[i].pose.translation - keys[i - 1].pose.translation).norm();
  }
  const int samples = std::max(1, static_cast<int>(std::ceil(length / step)));
  const auto& fd = scene.fork;
  const double x0 = -0.5 * (fd.tine_count - 1) * fd.tine_spacing;
  for (int s = 0; s <= samples; ++s) {
    const double t = until_time * s / samples;
    const tools::Pose pose = traj.pose_at(t);
    for (const auto& p : scene.world.particles) {
      if (!(tools::sdf_eval(fork, pose, p.x) > 0.0)) return false;
    }
    for (int k = 0; k < fd.tine_count; ++k) {
      for (double y = fd.tine_radius; y <= fd.tine_length; y += 0.001) {
        const Vec3 w = pose.apply(Vec3(x0 + k * fd.tine_spacing, y, 0.0));
        if (!(tools::sdf_eval(plate, ppose, w) > fd.tine_radius)) return false;
      }
    }
  }
  return true;
}

PlannedAction plan_push(const scene::Scene& scene, ItemId item, PushDirection direction,
                        const ActionParams& prm) {
  prm.validate();
  const auto ps = particles_of(scene.world, item);
  const ItemGeometry g = item_geometry(ps, scene.plate_center.y());
  const Vec3 d = direction_vector(direction);
  const Vec3 c = horizontal(g.centroid);
  const double back = min_projection(ps, c, d);
  const double gap = prm.approach_gap * scene.world.dx();

  tools::Pose low;
  // Tine row perpendicular to the push: pushes along x turn the fork about y.
  if (direction == PushDirection::PlusX || direction == PushDirection::MinusX) {
    low.rotation = Quat(Eigen::AngleAxisd(0.5 * std::numbers::pi, Vec3::UnitY()));
  }
  low.translation = c + (back - gap - scene.fork.tine_radius) * d;
  low.translation.y() = scene.plate_center.y() + prm.push_tip_height;

  auto keys = descent(scene, g, low, 0.0, prm);
  const double t_push = keys.back().time;
  const double cap = scene.plate.radius;
  tools::Pose end = low;
  end.translation += cap * d;
  keys.push_back({t_push + cap / prm.push_speed, end});

  PlannedAction a;
  a.spec = {ActionKind::Push, direction, item};
  a.trajectory = tools::ToolTrajectory(std::move(keys));
  a.approach_pose = low;
  a.motion_direction = d;
  auto rim = std::make_shared<const tools::ToolShape>(tools::make_plate_rim(scene.plate));
  a.monitor = TerminationMonitor::contact(item, prm.monitor_distance * scene.world.dx(), cap,
                                          t_push, d, std::move(rim), plate_pose(scene),
                                          a.trajectory.end_time());
  if (!approach_is_clear(scene, a.trajectory, t_push)) {
    throw InfeasibleAction(a.spec.label() + ": approach lane behind item " +
                           std::to_string(item) + " is blocked");
  }
  return a;
}

PlannedAction plan_cut(const scene::Scene& scene, ItemId item, const ActionParams& prm) {
  prm.validate();
  const auto ps = particles_of(scene.world, item);
  const ItemGeometry g = item_geometry(ps, scene.plate_center.y());
  const auto& f = scene.fork;
  if (!(g.max_height < f.tine_length)) {
    throw InfeasibleAction("cut: item " + std::to_string(item) + " is taller than the tines");
  }
  // The blade plane holds the vertical and the cut line; its normal is the
  // horizontal major axis. Local x (tine row) -> up, local y (tines) -> cut
  // line, local z -> major axis.
  const Vec3 major = horizontal_major_axis(ps);
  const Vec3 line = major.cross(Vec3::UnitY()).normalized();
  tools::Pose low;
  low.rotation = rotation_from_columns(Vec3::UnitY(), line, major);
  const Vec3 c = horizontal(g.centroid);
  const double half = tine_row_half_span(f);
  low.translation = c - 0.5 * f.tine_length * line;
  low.translation.y() = scene.plate_center.y() + prm.cut_bottom_clearance + half;

  tools::Pose high = low;
  high.translation.y() = scene.plate_center.y() + g.max_height + prm.approach_clearance + half;
  std::vector<tools::Keyframe> keys{{0.0, high}};
  const double t_down = (high.translation.y() - low.translation.y()) / prm.cut_speed;
  keys.push_back({t_down, low});
  tools::Pose flick = low;
  flick.translation += prm.flick_distance * major;
  keys.push_back({t_down + prm.flick_distance / prm.flick_speed, flick});

  PlannedAction a;
  a.spec = {ActionKind::Cut, PushDirection::PlusX, item};
  a.trajectory = tools::ToolTrajectory(std::move(keys));
  a.monitor = TerminationMonitor::completion(a.trajectory.end_time());
  a.approach_pose = low;
  a.motion_direction = -Vec3::UnitY();
  a.cut_normal = major;
  a.cut_offset = g.centroid.dot(major);
  // Only the start pose has to be clear; the blade is meant to pass through.
  if (!approach_is_clear(scene, a.trajectory, 0.0)) {
    throw InfeasibleAction("cut: start pose above item " + std::to_string(item) +
                           " collides");
  }
  return a;
}

PlannedAction plan_flip(const scene::Scene& scene, ItemId item, const ActionParams& prm) {
  prm.validate();
  const auto ps = particles_of(scene.world, item);
  const ItemGeometry g = item_geometry(ps, scene.plate_center.y());
  const auto& f = scene.fork;
  const Vec3 major = horizontal_major_axis(ps);
  const Vec3 c = horizontal(g.centroid);
  Vec3 across = major.cross(Vec3::UnitY()).normalized();
  // Prefer sweeping toward the plate centre.
  const Vec3 to_center = horizontal(scene.plate_center) - c;
  if (across.dot(to_center) < 0.0) across = -across;
  const double gap = prm.approach_gap * scene.world.dx();
  const double elev = prm.flip_elevation_deg * std::numbers::pi / 180.0;
  const double half = tine_row_half_span(f);

  std::string why;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Vec3 p = attempt == 0 ? across : Vec3(-across);
    // Spatula pose: tine row along the sweep, tines along the major axis.
    tools::Pose low;
    low.rotation = rotation_from_columns(p, major, p.cross(major));
    const double back = min_projection(ps, c, p);
    low.translation = c + (back - gap - half) * p - 0.5 * f.tine_length * major;
    low.translation.y() = scene.plate_center.y() + prm.flip_height_fraction * g.max_height;

    auto keys = descent(scene, g, low, -f.tine_radius, prm);
    const double t0 = keys.back().time;
    const Vec3 dir = std::cos(elev) * p + std::sin(elev) * Vec3::UnitY();
    const double travel = gap + prm.flip_travel_factor * g.extents[2];
    tools::Pose end = low;
    end.translation += travel * dir;
    keys.push_back({t0 + travel / prm.flip_speed, end});

    PlannedAction a;
    a.spec = {ActionKind::Flip, PushDirection::PlusX, item};
    a.trajectory = tools::ToolTrajectory(std::move(keys));
    a.monitor = TerminationMonitor::completion(a.trajectory.end_time());
    a.approach_pose = low;
    a.motion_direction = dir;
    if (approach_is_clear(scene, a.trajectory, t0)) return a;
  }
  throw InfeasibleAction("flip: no clear side approach to item " + std::to_string(item));
}

PlannedAction plan_action(const scene::Scene& scene, const ActionSpec& spec,
                          const ActionParams& params) {
  switch (spec.kind) {
    case ActionKind::Push: return plan_push(scene, spec.target, spec.direction, params);
    case ActionKind::Cut: return plan_cut(scene, spec.target, params);
    case ActionKind::Flip: return plan_flip(scene, spec.target, params);
  }
  throw InvalidArgument("unknown action kind");
}

// ---------------------------------------------------------------------------

std::vector<ItemId> split_fragments(scene::Scene& scene, ItemId item, double radius,
                                    double min_fraction) {
  std::vector<std::size_t> idx;
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < scene.world.particles.size(); ++i) {
    if (scene.world.particles[i].item == item) {
      idx.push_back(i);
      pts.push_back(scene.world.particles[i].x);
    }
  }
  if (pts.empty()) return {};
  const auto labels = connected_components(pts, radius);
  const std::size_t k = component_count(labels);
  if (k < 2) return {};
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  const std::size_t keep = static_cast<std::size_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<ItemId> created;
  for (std::size_t comp = 0; comp < k; ++comp) {
    if (comp == keep) continue;
    if (static_cast<double>(sizes[comp]) < min_fraction * static_cast<double>(pts.size())) continue;
    const ItemId id = scene.next_item_id();
    std::vector<std::uint8_t> sel(scene.world.particles.size(), 0);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (labels[j] == comp) sel[idx[j]] = 1;
    }
    scene.relabel(item, id, sel);
    created.push_back(id);
  }
  return created;
}

void settle(scene::Scene& scene, double duration) {
  auto& fork = scene.world.tools.at(scene.fork_tool);
  fork.trajectory = tools::ToolTrajectory::stationary(scene.fork_park);
  fork.clock_start = scene.world.time;
  scene.world.run(duration);
}

ActionOutcome rollout_action(scene::Scene scene, const PlannedAction& action,
                             const ActionParams& prm, render::RenderMode mode) {
  prm.validate();
  render::RenderPolicy policy(mode);
  auto& w = scene.world;
  auto& fork = w.tools.at(scene.fork_tool);
  fork.trajectory = action.trajectory;
  fork.clock_start = w.time;
  const auto& traj = action.trajectory;

  ActionOutcome out;
  const std::int64_t max_steps =
      sim::steps_for(std::min(traj.end_time(), prm.max_duration), w.config.dt);
  std::string reason;
  double local = 0.0;
  bool fired = action.monitor.kind() == TerminationMonitor::Kind::Contact &&
               action.monitor.fired(w, traj, 0.0, reason);
  while (!fired && out.action_steps < max_steps) {
    w.step();
    ++out.action_steps;
    if (mode == render::RenderMode::EveryStep) (void)policy.render(w, scene.camera);
    local = fork.local_time(w.time);
    fired = action.monitor.fired(w, traj, local, reason);
  }
  out.monitor_fired = fired;
  out.stop_reason = fired ? reason : "duration-cap";
  out.stop_time = local;

  fork.trajectory = tools::ToolTrajectory::stationary(traj.pose_at(local));
  fork.clock_start = w.time;
  const std::int64_t settle_steps = sim::steps_for(prm.post_action_settle, w.config.dt);
  for (std::int64_t i = 0; i < settle_steps; ++i) {
    w.step();
    ++out.settle_steps;
    if (mode == render::RenderMode::EveryStep) (void)policy.render(w, scene.camera);
  }
  out.new_items = split_fragments(scene, action.spec.target, prm.fragment_radius * w.dx(),
                                  prm.min_fragment_fraction);
  out.frame = policy.render(w, scene.camera);
  out.render_count = policy.render_count();
  out.scene = std::move(scene);
  return out;
}

}  // namespace preacq::actions
