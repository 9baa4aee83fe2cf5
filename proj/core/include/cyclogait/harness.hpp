#pragma once

#include <filesystem>
#include <string>

#include "cyclogait/control.hpp"

namespace cyclogait {

struct CaseConfig {
  int schema_version = 1;
  std::string case_id = "case";
  std::uint64_t seed = 20240915;
  StairSpec stairs;
  StepKind step_kind = StepKind::kSubsequent;
  RobotModel robot;
  GaitParams gait;
  bool knot_shift_enabled = false;
  KnotShiftBounds knot_bounds;
  IkHyper ik;
  double torso_pitch_nominal = 1.25;
  ContactParams contact;  // contact.ground is filled from `stairs` at run time
  AcoConfig aco;
  DisturbanceSpec disturbance;
  bool zmp_k_term = true;
  ControllerGains fixed_gains{80.0, 40.0, 1.25};  // used by the `simulate` command

  void validate() const;
};

CaseConfig load_config(const std::filesystem::path& path);
void save_config(const CaseConfig& config, const std::filesystem::path& path);

// The three shipped staircase studies (subsequent-step gaits).
CaseConfig case_preset(int index);  // 1, 2 or 3
CaseConfig first_step_preset();     // flat-start demonstration gait

struct ZmpStats {
  double min_margin = 0;
  int supported = 0;
  int ssp_supported = 0;
  int ssp_margin_ok = 0;
  int violations = 0;
  double ssp_margin_ok_fraction() const {
    return ssp_supported > 0 ? static_cast<double>(ssp_margin_ok) / ssp_supported : 1.0;
  }
};

struct CaseReport {
  int schema_version = 1;
  std::string case_id;
  std::uint64_t seed = 0;
  double run = 0, rise = 0;
  StepKind step_kind = StepKind::kSubsequent;
  GaitParams gait_params;  // as executed (after optional knot shifting)
  double max_joint_accel = 0;  // of the desired joint trajectory [rad/s^2]
  double max_joint_jerk = 0;   // [rad/s^3]
  ControllerGains gains;
  double cost = 0, tracking_cost = 0, power_cost = 0, penalty_cost = 0;
  double energy = 0, energy_joules = 0;
  double peak_torque = 0;
  ZmpStats zmp;
  int ik_poses = 0;
  long ik_total_epochs = 0;
  double ik_mean_solve_ms = 0;
  double wall_clock_seconds = 0;
};

std::string report_to_json(const CaseReport& report);
// Serialization with the timing fields zeroed; the determinism contract
// covers everything except wall-clock measurements.
std::string report_comparable_json(const CaseReport& report);

struct CaseArtifacts {
  CartesianGait gait;
  JointTrajectory traj;
  AcoResult tuning;
  RolloutResult final_rollout;
  CaseReport report;
};

// Full pipeline: plan -> (optional knot shift) -> IK -> tune -> final rollout.
// Every stage persists its outputs into out_dir before the next one runs, so
// a failing stage leaves the completed traces behind.
CaseReport run_case(const CaseConfig& config, const std::filesystem::path& out_dir,
                    CaseArtifacts* artifacts = nullptr);

// Stage outputs without the tuning loop (the `plan` / `ik` / `simulate` commands).
CartesianGait run_plan(const CaseConfig& config, const std::filesystem::path& out_dir);
JointTrajectory run_ik(const CaseConfig& config, const std::filesystem::path& out_dir,
                       CartesianGait* gait_out = nullptr);
RolloutResult run_simulate(const CaseConfig& config, const std::filesystem::path& out_dir);

void reproduce_cases(const std::filesystem::path& out_root, std::uint64_t seed_override,
                     bool has_seed_override);

// Names of the plot-data series emitted for a full case.
std::vector<std::string> plot_series_manifest();

// Trace emission shared by the pipeline stages; exposed for tests.
void emit_gait_csv(const CartesianGait& gait, const std::filesystem::path& path);
void emit_joint_trajectory_csv(const JointTrajectory& traj, const std::filesystem::path& path);
void emit_sim_trace_csv(const RolloutResult& rollout, const std::filesystem::path& path);
void emit_zmp_csv(const RolloutResult& rollout, const std::filesystem::path& path);
void emit_tuning_log_csv(const AcoResult& tuning, const std::filesystem::path& path);
void emit_gains_json(const ControllerGains& gains, double cost, const std::filesystem::path& path);
void emit_plot_data(const CaseArtifacts& artifacts, const std::filesystem::path& dir);

}  // namespace cyclogait
