#include "preacq/planner/planner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace preacq::planner {

std::string to_string(Rationale r) {
  switch (r) {
    case Rationale::DirectAboveThreshold: return "DirectAboveThreshold";
    case Rationale::PreAcqImproves: return "PreAcqImproves";
    case Rationale::FallbackDirect: return "FallbackDirect";
  }
  return "?";
}

void PlannerConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("threshold must be in (0, 1)");
  if (!(success_slack >= 0.0)) throw InvalidArgument("success slack must be >= 0");
  if (workers < 0) throw InvalidArgument("worker count must be >= 0");
  actions.validate();
  estimator.validate();
}

std::size_t PlanResult::rollout_count() const {
  return static_cast<std::size_t>(std::count_if(
      candidates.begin(), candidates.end(), [](const auto& c) { return c.outcome.feasible; }));
}

Choice best_choice(const std::vector<ItemEstimate>& estimates) {
  std::vector<ItemEstimate> sorted = estimates;
  std::sort(sorted.begin(), sorted.end(),
            [](const ItemEstimate& a, const ItemEstimate& b) { return a.item < b.item; });
  Choice best;
  bool any = false;
  for (const auto& e : sorted) {
    const auto a = e.estimate.best_action();
    const double v = e.estimate[a];
    if (!any || v > best.value) {
      best = {e.item, a, v};
      any = true;
    }
  }
  return best;
}

std::vector<ItemEstimate> estimate_scene(const scene::Scene& scene, const geometry::DepthMap& depth,
                                         const geometry::SegMask& mask,
                                         const estimator::EstimatorConfig& cfg) {
  auto ctx = estimator::ObservationContext::from_scene(scene);
  // Fully hidden items cannot be observed.
  std::erase_if(ctx.items, [&](const auto& kv) { return !mask.contains_label(kv.first); });
  std::vector<ItemEstimate> out;
  for (const auto& obs : estimator::observe_items(depth, mask, ctx, cfg)) {
    out.push_back({obs.id, estimator::estimate_item(obs, cfg)});
  }
  return out;
}

std::vector<ItemEstimate> estimate_scene(const scene::Scene& scene,
                                         const estimator::EstimatorConfig& cfg) {
  const auto frame = render::render_frame(scene.world, scene.camera);
  return estimate_scene(scene, frame.depth, frame.mask, cfg);
}

CandidateOutcome simulate_candidate(const scene::Scene& scene, const actions::ActionSpec& spec,
                                    const PlannerConfig& cfg) {
  CandidateOutcome out;
  actions::PlannedAction planned;
  try {
    planned = actions::plan_action(scene, spec, cfg.actions);
  } catch (const InfeasibleAction& e) {
    out.note = e.what();
    return out;
  }
  out.feasible = true;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto res = actions::rollout_action(scene, planned, cfg.actions, cfg.render_mode);
    out.steps = res.action_steps + res.settle_steps;
    out.render_count = res.render_count;
    out.stop_reason = res.stop_reason;
    out.post = best_choice(estimate_scene(res.scene, res.frame.depth, res.frame.mask, cfg.estimator));
    out.frame = std::move(res.frame);
  } catch (const Error& e) {
    out.note = std::string("rollout failed: ") + e.what();
    out.post = Choice{};
  }
  out.sim_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

PlanResult plan(const scene::Scene& scene, const PlannerConfig& cfg, const PlannerHooks& hooks) {
  cfg.validate();
  if (scene.items.empty()) throw InvalidArgument("cannot plan on an empty scene");

  PlanResult r;
  r.direct = hooks.direct ? hooks.direct(scene) : estimate_scene(scene, cfg.estimator);
  if (r.direct.empty()) throw InvalidArgument("no observable items to plan on");
  r.best_direct = best_choice(r.direct);
  r.target = r.best_direct.item;
  r.acquisition = r.best_direct;
  if (r.best_direct.value >= cfg.threshold) {
    r.rationale = Rationale::DirectAboveThreshold;
    return r;
  }

  const auto specs =
      hooks.candidates ? hooks.candidates(scene, r.target) : actions::candidate_actions(r.target);
  std::vector<CandidateOutcome> outcomes(specs.size());
  auto run_one = [&](std::size_t i) {
    outcomes[i] = hooks.rollout ? hooks.rollout(scene, specs[i]) : simulate_candidate(scene, specs[i], cfg);
  };

  unsigned workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(specs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    r.candidates.push_back({specs[i], outcomes[i]});
    if (!outcomes[i].feasible) continue;
    if (!best || outcomes[i].post.value > outcomes[*best].post.value) best = i;
  }
  r.all_infeasible = !best.has_value();
  if (best && outcomes[*best].post.value > r.best_direct.value) {
    r.rationale = Rationale::PreAcqImproves;
    r.pre_action = specs[*best];
    r.post_estimate = outcomes[*best].post.value;
    r.acquisition = outcomes[*best].post;
  } else {
    r.rationale = Rationale::FallbackDirect;
  }
  return r;
}

ExecutionTrace execute(scene::Scene& scene, const PlanResult& result, const PlannerConfig& cfg,
                       const ExecuteHook& hook,
                       const std::function<std::vector<ItemEstimate>(const scene::Scene&)>& score) {
  cfg.validate();
  auto scorer = score ? score : [&](const scene::Scene& s) { return estimate_scene(s, cfg.estimator); };
  auto attempt_fn = hook ? hook : ExecuteHook([&](scene::Scene& s, const actions::ActionSpec& spec) {
    Attempt a;
    a.spec = spec;
    const auto planned = actions::plan_action(s, spec, cfg.actions);
    auto res = actions::rollout_action(s, planned, cfg.actions, cfg.render_mode);
    a.steps = res.action_steps + res.settle_steps;
    a.achieved = best_choice(estimate_scene(res.scene, res.frame.depth, res.frame.mask,
                                            cfg.estimator))
                     .value;
    s = std::move(res.scene);
    return a;
  });

  ExecutionTrace trace;
  if (result.pre_action) {
    const int tries = cfg.retry_once ? 2 : 1;
    for (int i = 0; i < tries; ++i) {
      Attempt a;
      try {
        a = attempt_fn(scene, *result.pre_action);
      } catch (const Error& e) {
        a = Attempt{};
        a.error = e.what();
      }
      a.spec = *result.pre_action;
      a.predicted = result.post_estimate;
      a.success = a.error.empty() && a.achieved >= a.predicted - cfg.success_slack;
      trace.attempts.push_back(a);
      if (a.success) break;
    }
  }
  try {
    trace.final_estimates = scorer(scene);
    trace.final_choice = best_choice(trace.final_estimates);
  } catch (const Error& e) {
    trace.error = std::string("final scoring failed: ") + e.what();
  }
  return trace;
}

}  // namespace preacq::planner
