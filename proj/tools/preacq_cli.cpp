#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "preacq/cli/commands.hpp"
#include "preacq/verify/acceptance.hpp"

using namespace preacq;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> workers;
  std::string render_mode;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Flags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "scene config (JSON)");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "override the config seed");
  cmd->add_option("--grid", f.grid, "grid nodes per axis");
  cmd->add_option("--workers", f.workers, "parallel rollout workers (0 = all cores)");
  cmd->add_option("--render-mode", f.render_mode, "on-demand | every-step")
      ->check(CLI::IsMember({"on-demand", "every-step"}));
  cmd->add_option("--out-dir", f.out_dir, "output directory (default $PREACQ_OUT_DIR or ./out)");
}

cli::CommonOptions common(const Flags& f) {
  cli::CommonOptions o;
  o.config = f.config;
  o.seed = f.seed;
  o.grid = f.grid;
  o.workers = f.workers;
  if (!f.render_mode.empty()) o.render_mode = render::render_mode_from_string(f.render_mode);
  o.out_dir = f.out_dir.empty() ? cli::default_out_dir() : std::filesystem::path(f.out_dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-acquisition action planner on a simulated plate"};
  app.require_subcommand(1);
  Flags flags;

  auto* recon = app.add_subcommand("recon", "reconstruct items and sample particles");
  add_common(recon, flags, true);
  std::string depth_path, mask_path;
  recon->add_option("--depth", depth_path, "plate depth map (PFM)")->check(CLI::ExistingFile);
  recon->add_option("--mask", mask_path, "segmentation mask (PGM)")->check(CLI::ExistingFile);

  auto* sim = app.add_subcommand("sim", "settle the scene and run one action");
  add_common(sim, flags, true);
  cli::SimOptions sim_opts;
  std::optional<ItemId> target;
  std::string bundle;
  sim->add_option("--action", sim_opts.action, "none, push+x, push-x, push+z, push-z, cut or flip");
  sim->add_option("--target", target, "target item id (default: lowest)");
  sim->add_option("--bundle", bundle, "recon output directory to load particles from")
      ->check(CLI::ExistingDirectory);

  auto* plan = app.add_subcommand("plan", "choose a pre-acquisition action");
  add_common(plan, flags, true);
  cli::PlanOptions plan_opts;
  plan->add_flag("--execute", plan_opts.execute, "apply the chosen action and score the result");

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify, flags, false);
  verify::VerifyOptions verify_opts;
  std::string scenes;
  verify->add_option("--scenes", scenes, "directory with the canonical scene configs")
      ->check(CLI::ExistingDirectory);
  verify->add_option("--only", verify_opts.only, "criterion numbers to run");

  CLI11_PARSE(app, argc, argv);

  return cli::guarded([&]() -> int {
    if (recon->parsed()) {
      cli::ReconOptions r;
      if (!depth_path.empty()) r.depth = depth_path;
      if (!mask_path.empty()) r.mask = mask_path;
      cli::cmd_recon(common(flags), r);
    } else if (sim->parsed()) {
      sim_opts.target = target;
      if (!bundle.empty()) sim_opts.bundle = bundle;
      cli::cmd_sim(common(flags), sim_opts);
    } else if (plan->parsed()) {
      cli::cmd_plan(common(flags), plan_opts);
    } else if (verify->parsed()) {
      if (!scenes.empty()) verify_opts.scenes_dir = scenes;
      if (flags.grid) verify_opts.grid = *flags.grid;
      if (flags.workers) verify_opts.workers = *flags.workers;
      if (flags.seed) verify_opts.seed = *flags.seed;
      const auto rows = verify::run_acceptance(verify_opts, &std::cerr);
      verify::print_table(std::cout, rows);
      return verify::all_passed(rows) ? cli::kOk : cli::kVerificationFailed;
    }
    return cli::kOk;
  });
}
