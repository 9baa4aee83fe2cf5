#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "cyclogait/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Case configuration file (JSON)");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seed", args.seed, "Override the configuration seed")
      ->each([&args](const std::string&) { args.has_seed = true; });
}

std::filesystem::path resolve_out(const CommonArgs& args, const std::string& leaf) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* root = std::getenv("CYCLOGAIT_OUT_ROOT")) return std::filesystem::path(root) / leaf;
  return std::filesystem::path("out") / leaf;
}

cyclogait::CaseConfig resolve_config(const CommonArgs& args) {
  cyclogait::CaseConfig config =
      args.config_path.empty() ? cyclogait::case_preset(1) : cyclogait::load_config(args.config_path);
  if (args.has_seed) config.seed = args.seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stair-climbing gait workbench for a planar 9-link toe-foot biped"};
  app.require_subcommand(1);

  CommonArgs plan_args, ik_args, sim_args, tune_args, case_args, repro_args;

  CLI::App* plan = app.add_subcommand("plan", "Generate the Cartesian gait plan");
  add_common(plan, plan_args);
  CLI::App* ik = app.add_subcommand("ik", "Plan and solve inverse kinematics");
  add_common(ik, ik_args);
  CLI::App* sim = app.add_subcommand("simulate", "Closed-loop rollout with the configured gains");
  add_common(sim, sim_args);
  CLI::App* tune = app.add_subcommand("tune", "Ant-colony tuning of PD gains and torso pitch");
  add_common(tune, tune_args);
  CLI::App* run = app.add_subcommand("run-case", "Full pipeline: plan, IK, tune, rollout, report");
  add_common(run, case_args);
  CLI::App* repro = app.add_subcommand("reproduce-cases", "Run the three shipped staircase cases");
  add_common(repro, repro_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) {
      const auto config = resolve_config(plan_args);
      cyclogait::run_plan(config, resolve_out(plan_args, config.case_id));
      std::cout << "plan written\n";
    } else if (ik->parsed()) {
      const auto config = resolve_config(ik_args);
      cyclogait::run_ik(config, resolve_out(ik_args, config.case_id));
      std::cout << "joint trajectory written\n";
    } else if (sim->parsed()) {
      const auto config = resolve_config(sim_args);
      const auto result = cyclogait::run_simulate(config, resolve_out(sim_args, config.case_id));
      std::cout << "rollout cost " << result.cost << ", peak torque " << result.peak_torque
                << " N m\n";
    } else if (tune->parsed()) {
      const auto config = resolve_config(tune_args);
      cyclogait::CaseArtifacts artifacts;
      const auto report =
          cyclogait::run_case(config, resolve_out(tune_args, config.case_id), &artifacts);
      std::cout << "tuned kp=" << report.gains.kp << " kd=" << report.gains.kd
                << " q5=" << report.gains.q5_torso << " cost=" << report.cost << "\n";
    } else if (run->parsed()) {
      const auto config = resolve_config(case_args);
      const auto report = cyclogait::run_case(config, resolve_out(case_args, config.case_id));
      std::cout << "case " << report.case_id << " done: cost=" << report.cost
                << " energy=" << report.energy << " peak_torque=" << report.peak_torque
                << " max_jerk=" << report.max_joint_jerk << "\n";
    } else if (repro->parsed()) {
      std::filesystem::path root = repro_args.out_dir.empty()
                                       ? resolve_out(repro_args, "cases")
                                       : std::filesystem::path(repro_args.out_dir);
      cyclogait::reproduce_cases(root, repro_args.seed, repro_args.has_seed);
      std::cout << "three cases written under " << root << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
