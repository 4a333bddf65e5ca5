#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "preacq/actions/item_geometry.hpp"
#include "preacq/render/render.hpp"
#include "preacq/scene/scene.hpp"

namespace preacq::actions {

enum class ActionKind { Push, Cut, Flip };
enum class PushDirection { PlusX, MinusX, PlusZ, MinusZ };

Vec3 direction_vector(PushDirection d);
std::string to_string(PushDirection d);
std::string to_string(ActionKind k);

struct ActionSpec {
  ActionKind kind = ActionKind::Push;
  PushDirection direction = PushDirection::PlusX;  // pushes only
  ItemId target = kBackground;

  /// "push+x", "push-x", "push+z", "push-z", "cut" or "flip".
  std::string label() const;
  static ActionSpec from_label(const std::string& label, ItemId target);
};

/// Candidate order used for tie-breaking: four pushes, cut, flip.
std::vector<ActionSpec> candidate_actions(ItemId target);

/// Speeds in m/s, distances in m unless marked as multiples of dx.
struct ActionParams {
  double descent_speed = 0.1;
  double approach_clearance = 0.01;  // above the item top before descending
  double approach_gap = 1.0;         // dx between fork surface and item at approach

  double push_speed = 0.05;
  double push_tip_height = 0.002;

  double cut_speed = 0.1;
  double cut_bottom_clearance = 0.001;
  double flick_distance = 0.01;
  double flick_speed = 0.2;

  double flip_speed = 0.15;
  double flip_elevation_deg = 20.0;
  double flip_height_fraction = 0.4;
  double flip_travel_factor = 1.2;  // times the item's minor extent, after closing the gap

  double monitor_distance = 1.5;    // dx
  double post_action_settle = 0.3;  // s, fork held still
  double max_duration = 4.0;        // s cap on the motion phase
  double fragment_radius = 1.5;     // dx, connectivity for splitting items
  double min_fragment_fraction = 0.05;

  void validate() const;
};

/// Decides when a rollout's action phase ends.
class TerminationMonitor {
 public:
  enum class Kind { Contact, Completion };

  static TerminationMonitor completion(double end_time);
  static TerminationMonitor contact(ItemId target, double distance, double travel_cap,
                                    double phase_start, const Vec3& direction,
                                    std::shared_ptr<const tools::ToolShape> rim,
                                    const tools::Pose& plate_pose, double end_time);

  Kind kind() const { return kind_; }
  double end_time() const { return end_time_; }
  double distance() const { return distance_; }
  double travel_cap() const { return travel_cap_; }

  /// Checks the predicate on the current world; `local_time` is on the
  /// trajectory clock. Sets `reason` to "rim", "item", "travel" or "complete".
  bool fired(const sim::SimWorld& world, const tools::ToolTrajectory& traj, double local_time,
             std::string& reason) const;

  /// Fork travel along the push direction since the push phase began.
  double travel(const tools::ToolTrajectory& traj, double local_time) const;
  /// Smallest distance from the target's particles to the rim surface.
  double rim_distance(const sim::SimWorld& world) const;
  /// Smallest distance from the target's particles to any other item's.
  double item_distance(const sim::SimWorld& world) const;

 private:
  Kind kind_ = Kind::Completion;
  ItemId target_ = kBackground;
  double distance_ = 0.0;
  double travel_cap_ = 0.0;
  double phase_start_ = 0.0;
  double end_time_ = 0.0;
  Vec3 direction_ = Vec3::UnitX();
  std::shared_ptr<const tools::ToolShape> rim_;
  tools::Pose plate_pose_;
};

struct PlannedAction {
  ActionSpec spec;
  tools::ToolTrajectory trajectory;
  TerminationMonitor monitor;
  tools::Pose approach_pose;    // fork pose when it first reaches working height
  Vec3 motion_direction;        // unit direction of the working motion
  std::optional<Vec3> cut_normal;  // cuts only
  double cut_offset = 0.0;         // cut plane position along cut_normal
};

PlannedAction plan_push(const scene::Scene& scene, ItemId item, PushDirection direction,
                        const ActionParams& params = {});
PlannedAction plan_cut(const scene::Scene& scene, ItemId item, const ActionParams& params = {});
PlannedAction plan_flip(const scene::Scene& scene, ItemId item, const ActionParams& params = {});
/// Dispatches on spec.kind. Throws InfeasibleAction.
PlannedAction plan_action(const scene::Scene& scene, const ActionSpec& spec,
                          const ActionParams& params = {});

/// Fork SDF at every particle is positive along the whole approach, and the
/// fork stays clear of the plate. Used by the planners; exposed for tests.
bool approach_is_clear(const scene::Scene& scene, const tools::ToolTrajectory& trajectory,
                       double until_time);

struct ActionOutcome {
  scene::Scene scene;
  render::Frame frame;
  std::int64_t action_steps = 0;
  std::int64_t settle_steps = 0;
  bool monitor_fired = false;
  std::string stop_reason;
  double stop_time = 0.0;  // on the trajectory clock
  std::int64_t render_count = 0;
  std::vector<ItemId> new_items;  // fragments split off the target
};

/// Runs the action on a copy of the scene until the monitor fires, holds the
/// fork still for the settle time, splits the target into connected fragments
/// and renders once (or after every step as well in EveryStep mode).
ActionOutcome rollout_action(scene::Scene scene, const PlannedAction& action,
                             const ActionParams& params,
                             render::RenderMode mode = render::RenderMode::OnDemand);

/// Relabels connected fragments of `item` beyond the largest as new items.
/// Fragments holding less than `min_fraction` of the particles stay with it.
std::vector<ItemId> split_fragments(scene::Scene& scene, ItemId item, double radius,
                                    double min_fraction);

/// Parks the fork and lets the scene come to rest for `duration` seconds.
void settle(scene::Scene& scene, double duration);

}  // namespace preacq::actions
