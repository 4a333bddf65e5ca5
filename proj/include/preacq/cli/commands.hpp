#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "preacq/cli/config.hpp"
#include "preacq/planner/planner.hpp"

namespace preacq::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kSimulationError = 3,
  kVerificationFailed = 4,
};

struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> workers;
  std::optional<render::RenderMode> render_mode;
  std::filesystem::path out_dir = "out";
};

/// `--out-dir` if given, else $PREACQ_OUT_DIR, else ./out.
std::filesystem::path default_out_dir();

/// Loads the config and applies command-line overrides.
SceneConfig load_with_overrides(const CommonOptions& opts);

struct ReconOptions {
  std::optional<std::filesystem::path> depth;
  std::optional<std::filesystem::path> mask;
};

struct SimOptions {
  std::string action = "none";  // none | push+x | push-x | push+z | push-z | cut | flip
  std::optional<ItemId> target;  // default: the lowest item id
  std::optional<std::filesystem::path> bundle;  // recon output to load particles from
};

struct PlanOptions {
  bool execute = false;
  bool candidate_artifacts = true;
};

/// Writes meshes (OBJ), the sampled particle checkpoint and volumes.csv.
void cmd_recon(const CommonOptions& opts, const ReconOptions& recon);
/// Writes final.ckpt, depth.pfm, mask.pgm and metrics.csv.
void cmd_sim(const CommonOptions& opts, const SimOptions& sim);
/// Writes plan_report.json, timings.csv and per-candidate depth/mask images.
planner::PlanResult cmd_plan(const CommonOptions& opts, const PlanOptions& plan);

/// Plan report document; everything in it is deterministic for a fixed seed.
nlohmann::json plan_report(const SceneConfig& cfg, const scene::Scene& scene,
                           const planner::PlanResult& result,
                           const planner::ExecutionTrace* trace = nullptr);

/// Runs `fn`, printing diagnostics and mapping exceptions to exit codes.
int guarded(const std::function<int()>& fn);

}  // namespace preacq::cli
