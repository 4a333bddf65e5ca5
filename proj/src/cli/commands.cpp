#include "preacq/cli/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "preacq/geometry/image_io.hpp"
#include "preacq/sim/checkpoint.hpp"

namespace preacq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json choice_json(const planner::Choice& c) {
  return {{"item", c.item}, {"action", estimator::to_string(c.action)}, {"value", c.value}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

ItemId default_target(const scene::Scene& s) {
  const auto ids = s.item_ids();
  if (ids.empty()) throw InvalidArgument("scene has no items");
  return ids.front();
}

void write_metrics(const fs::path& path, const scene::Scene& s, const render::Frame& frame,
                   const estimator::EstimatorConfig& ecfg) {
  auto ctx = estimator::ObservationContext::from_scene(s);
  std::erase_if(ctx.items, [&](const auto& kv) { return !frame.mask.contains_label(kv.first); });
  const auto obs = estimator::observe_items(frame.depth, frame.mask, ctx, ecfg);
  std::string out =
      "item,category,particles,com_x,com_y,com_z,volume_m3,area_m2,mean_height_m,max_height_m,"
      "env,bite_size,skewer,scoop,twirl\n";
  for (const auto& o : obs) {
    std::size_t n = 0;
    for (const auto& p : s.world.particles) n += p.item == o.id;
    const Vec3 com = s.world.center_of_mass(o.id);
    const auto env = estimator::classify_environment(o, ecfg);
    const auto bite = estimator::classify_bite_size(o.volume, ecfg);
    const auto e = estimator::estimate_success(o, env, bite, ecfg);
    out += std::to_string(o.id) + "," + o.category + "," + std::to_string(n) + "," + num(com.x()) +
           "," + num(com.y()) + "," + num(com.z()) + "," + num(o.volume) + "," +
           num(o.footprint_area) + "," + num(o.mean_height) + "," + num(o.max_height) + "," +
           estimator::to_string(env) + "," + estimator::to_string(bite) + "," + num(e.skewer) +
           "," + num(e.scoop) + "," + num(e.twirl) + "\n";
  }
  write_text(path, out);
}

}  // namespace

fs::path default_out_dir() {
  if (const char* env = std::getenv("PREACQ_OUT_DIR"); env && *env) return env;
  return "out";
}

SceneConfig load_with_overrides(const CommonOptions& opts) {
  SceneConfig cfg = load_config(opts.config);
  if (opts.seed) {
    cfg.layout.seed = *opts.seed;
    cfg.raw["seed"] = *opts.seed;
  }
  if (opts.grid) {
    if (*opts.grid < 8) throw ConfigError("--grid", "needs at least 8 nodes per axis");
    cfg.layout.sim.grid_dims = *opts.grid;
    cfg.raw["grid"]["dims"] = *opts.grid;
  }
  if (opts.workers) cfg.planner.workers = *opts.workers;
  if (opts.render_mode) cfg.planner.render_mode = *opts.render_mode;
  return cfg;
}

void cmd_recon(const CommonOptions& opts, const ReconOptions& recon) {
  SceneConfig cfg = load_with_overrides(opts);
  if (recon.depth) cfg.heightmap_depth = *recon.depth;
  if (recon.mask) cfg.heightmap_mask = *recon.mask;
  if (cfg.heightmap_depth.has_value() != cfg.heightmap_mask.has_value()) {
    throw ConfigError("heightmap", "needs both depth and mask files");
  }
  const auto built = build_scene(cfg, false);
  fs::create_directories(opts.out_dir);
  for (const auto& mesh : built.meshes) {
    geometry::write_obj(opts.out_dir / ("item_" + std::to_string(mesh.item_id) + ".obj"), mesh);
  }
  sim::save_checkpoint(built.scene.world, (opts.out_dir / "particles.ckpt").string());
  geometry::write_pfm(opts.out_dir / "input_depth.pfm", built.depth);
  geometry::write_pgm(opts.out_dir / "input_mask.pgm", built.mask);
  std::string csv = "item,category,volume_m3,particles,footprint_pixels\n";
  for (const auto& it : built.items) {
    csv += std::to_string(it.id) + "," + it.category + "," + num(it.volume) + "," +
           std::to_string(it.particles) + "," + std::to_string(it.footprint_pixels) + "\n";
  }
  write_text(opts.out_dir / "volumes.csv", csv);
  write_text(opts.out_dir / "scene.json", cfg.raw.dump(2) + "\n");
  for (const auto& it : built.items) {
    std::cout << "item " << it.id << " (" << it.category << "): volume " << num(it.volume * 1e6)
              << " cm^3, " << it.particles << " particles\n";
  }
}

void cmd_sim(const CommonOptions& opts, const SimOptions& so) {
  const SceneConfig cfg = load_with_overrides(opts);
  auto built = build_scene(cfg, so.bundle.has_value() ? false : true);
  scene::Scene s = std::move(built.scene);
  if (so.bundle) {
    sim::load_checkpoint(s.world, (*so.bundle / "particles.ckpt").string());
    if (cfg.settle_time > 0.0) actions::settle(s, cfg.settle_time);
  }
  fs::create_directories(opts.out_dir);
  render::Frame frame;
  if (so.action == "none") {
    frame = render::render_frame(s.world, s.camera);
    std::cout << "no-op: 0 steps\n";
  } else {
    const ItemId target = so.target ? *so.target : default_target(s);
    const auto spec = actions::ActionSpec::from_label(so.action, target);
    const auto planned = actions::plan_action(s, spec, cfg.planner.actions);
    auto res = actions::rollout_action(std::move(s), planned, cfg.planner.actions,
                                       cfg.planner.render_mode);
    std::cout << spec.label() << " on item " << target << ": " << res.action_steps
              << " action steps, " << res.settle_steps << " settle steps, stop="
              << res.stop_reason << ", renders=" << res.render_count << "\n";
    s = std::move(res.scene);
    frame = std::move(res.frame);
  }
  sim::save_checkpoint(s.world, (opts.out_dir / "final.ckpt").string());
  geometry::write_pfm(opts.out_dir / "depth.pfm", frame.depth);
  geometry::write_pgm(opts.out_dir / "mask.pgm", frame.mask);
  write_metrics(opts.out_dir / "metrics.csv", s, frame, cfg.planner.estimator);
}

json plan_report(const SceneConfig& cfg, const scene::Scene& s, const planner::PlanResult& r,
                 const planner::ExecutionTrace* trace) {
  json cfg_copy = cfg.raw;
  if (cfg_copy.contains("planner")) cfg_copy["planner"].erase("workers");
  json doc;
  doc["schema"] = "preacq.plan/1";
  doc["scene_hash"] = hex64(scene_hash(s));
  doc["seed"] = cfg.layout.seed;
  doc["config"] = cfg_copy;
  doc["threshold"] = cfg.planner.threshold;
  json direct = json::array();
  for (const auto& d : r.direct) {
    direct.push_back({{"item", d.item},
                      {"category", s.has_item(d.item) ? s.item(d.item).category : ""},
                      {"skewer", d.estimate.skewer},
                      {"scoop", d.estimate.scoop},
                      {"twirl", d.estimate.twirl}});
  }
  doc["direct"] = direct;
  doc["target"] = r.target;
  doc["best_direct"] = choice_json(r.best_direct);
  json cands = json::array();
  for (const auto& c : r.candidates) {
    json row = {{"action", c.spec.label()},
                {"feasible", c.outcome.feasible},
                {"note", c.outcome.note}};
    if (c.outcome.feasible) {
      row["post"] = choice_json(c.outcome.post);
      row["steps"] = c.outcome.steps;
      row["render_count"] = c.outcome.render_count;
      row["stop_reason"] = c.outcome.stop_reason;
    }
    cands.push_back(row);
  }
  doc["candidates"] = cands;
  doc["rollouts"] = r.rollout_count();
  json decision;
  decision["rationale"] = planner::to_string(r.rationale);
  decision["pre_action"] = r.pre_action ? json(r.pre_action->label()) : json(nullptr);
  decision["acquisition"] = choice_json(r.acquisition);
  decision["post_estimate"] = r.pre_action ? json(r.post_estimate) : json(nullptr);
  decision["all_infeasible"] = r.all_infeasible;
  doc["decision"] = decision;
  if (trace) {
    json attempts = json::array();
    for (const auto& a : trace->attempts) {
      attempts.push_back({{"action", a.spec.label()},
                          {"predicted", a.predicted},
                          {"achieved", a.achieved},
                          {"success", a.success},
                          {"error", a.error},
                          {"steps", a.steps}});
    }
    doc["execution"] = {{"attempts", attempts},
                        {"final", choice_json(trace->final_choice)},
                        {"error", trace->error}};
  }
  return doc;
}

planner::PlanResult cmd_plan(const CommonOptions& opts, const PlanOptions& po) {
  const SceneConfig cfg = load_with_overrides(opts);
  auto built = build_scene(cfg, true);
  scene::Scene& s = built.scene;
  fs::create_directories(opts.out_dir);
  const auto result = planner::plan(s, cfg.planner);
  std::optional<planner::ExecutionTrace> trace;
  const scene::Scene planned_state = s;
  if (po.execute) trace = planner::execute(s, result, cfg.planner);
  const json doc = plan_report(cfg, planned_state, result, trace ? &*trace : nullptr);
  write_text(opts.out_dir / "plan_report.json", doc.dump(2) + "\n");

  std::string timings = "action,feasible,sim_seconds\n";
  for (const auto& c : result.candidates) {
    timings += c.spec.label() + "," + (c.outcome.feasible ? "1" : "0") + "," +
               num(c.outcome.sim_seconds) + "\n";
  }
  write_text(opts.out_dir / "timings.csv", timings);
  if (po.candidate_artifacts) {
    const fs::path dir = opts.out_dir / "candidates";
    fs::create_directories(dir);
    for (const auto& c : result.candidates) {
      if (!c.outcome.feasible || c.outcome.frame.depth.values.empty()) continue;
      geometry::write_pfm(dir / (c.spec.label() + "_depth.pfm"), c.outcome.frame.depth);
      geometry::write_pgm(dir / (c.spec.label() + "_mask.pgm"), c.outcome.frame.mask);
    }
  }
  std::cout << "target item " << result.target << ", best direct "
            << estimator::to_string(result.best_direct.action) << " " << num(result.best_direct.value)
            << ", rationale " << planner::to_string(result.rationale);
  if (result.pre_action) std::cout << " via " << result.pre_action->label();
  std::cout << " (" << result.rollout_count() << " rollouts)\n";
  return result;
}

int guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kSimulationError;
  } catch (const InfeasibleAction& e) {
    std::cerr << "infeasible action: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace preacq::cli
