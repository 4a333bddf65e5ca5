#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "preacq/actions/actions.hpp"
#include "preacq/estimator/estimator.hpp"
#include "preacq/scene/scene.hpp"

namespace preacq::planner {

enum class Rationale { DirectAboveThreshold, PreAcqImproves, FallbackDirect };
std::string to_string(Rationale r);

struct PlannerConfig {
  double threshold = 0.70;
  bool retry_once = true;
  double success_slack = 0.15;
  int workers = 0;  // 0 = hardware concurrency
  render::RenderMode render_mode = render::RenderMode::OnDemand;
  actions::ActionParams actions;  // actions.max_duration caps each rollout
  estimator::EstimatorConfig estimator;

  void validate() const;
};

/// An acquisition choice: which item, which primitive, how likely.
struct Choice {
  ItemId item = kBackground;
  estimator::Acquisition action = estimator::Acquisition::Skewer;
  double value = 0.0;
};

struct ItemEstimate {
  ItemId item = kBackground;
  estimator::SuccessEstimate estimate;
};

/// Best (item, primitive) pair; ties go to the lower item id, then skewer,
/// scoop, twirl.
Choice best_choice(const std::vector<ItemEstimate>& estimates);

struct CandidateOutcome {
  bool feasible = false;
  std::string note;  // infeasibility or failure reason
  Choice post;       // best acquisition after the action
  std::int64_t steps = 0;
  std::int64_t render_count = 0;
  std::string stop_reason;
  double sim_seconds = 0.0;  // wall clock, kept out of reports
  render::Frame frame;       // final render, empty when not rolled out
};

struct CandidateSummary {
  actions::ActionSpec spec;
  CandidateOutcome outcome;
};

struct PlanResult {
  ItemId target = kBackground;
  std::vector<ItemEstimate> direct;
  Choice best_direct;
  Choice acquisition;  // what to do after the optional pre-acquisition action
  std::optional<actions::ActionSpec> pre_action;
  double post_estimate = 0.0;
  std::vector<CandidateSummary> candidates;
  Rationale rationale = Rationale::DirectAboveThreshold;
  bool all_infeasible = false;

  std::size_t rollout_count() const;
};

/// Replaceable pipeline stages. Empty members use the simulation-backed
/// defaults, so tests can stub any subset.
struct PlannerHooks {
  std::function<std::vector<ItemEstimate>(const scene::Scene&)> direct;
  std::function<std::vector<actions::ActionSpec>(const scene::Scene&, ItemId)> candidates;
  std::function<CandidateOutcome(const scene::Scene&, const actions::ActionSpec&)> rollout;
};

/// Renders the scene and estimates every visible item.
std::vector<ItemEstimate> estimate_scene(const scene::Scene& scene, const geometry::DepthMap& depth,
                                         const geometry::SegMask& mask,
                                         const estimator::EstimatorConfig& cfg);
std::vector<ItemEstimate> estimate_scene(const scene::Scene& scene,
                                         const estimator::EstimatorConfig& cfg);

/// Plans and rolls out one candidate on a private copy of the scene.
CandidateOutcome simulate_candidate(const scene::Scene& scene, const actions::ActionSpec& spec,
                                    const PlannerConfig& cfg);

/// Direct estimates, threshold test and, below it, one rollout per feasible
/// candidate on the best item. Rollouts may run on parallel workers; results
/// are reduced in candidate order.
PlanResult plan(const scene::Scene& scene, const PlannerConfig& cfg, const PlannerHooks& hooks = {});

struct Attempt {
  actions::ActionSpec spec;
  double predicted = 0.0;
  double achieved = 0.0;
  bool success = false;
  std::string error;
  std::int64_t steps = 0;
};

struct ExecutionTrace {
  std::vector<Attempt> attempts;
  std::vector<ItemEstimate> final_estimates;
  Choice final_choice;
  std::string error;
};

/// Applies a pre-acquisition action to `scene` for real and reports the best
/// acquisition afterwards. Errors it throws are recorded in the attempt.
using ExecuteHook = std::function<Attempt(scene::Scene&, const actions::ActionSpec&)>;

/// Runs the chosen pre-acquisition action (retrying once on failure when
/// configured) and scores the final state. Errors land in the trace.
ExecutionTrace execute(scene::Scene& scene, const PlanResult& result, const PlannerConfig& cfg,
                       const ExecuteHook& hook = {},
                       const std::function<std::vector<ItemEstimate>(const scene::Scene&)>& score = {});

}  // namespace preacq::planner
