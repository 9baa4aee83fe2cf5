#include "cyclogait/harness.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>

#include "cyclogait/csv.hpp"
#include "cyclogait/rng.hpp"

namespace cyclogait {

using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kIkSeedTag = 101;
constexpr std::uint64_t kKnotSeedTag = 102;
constexpr std::uint64_t kAcoSeedTag = 103;

json gait_params_to_json(const GaitParams& p) {
  return json{{"t1", p.t1},           {"t2", p.t2},
              {"t_bc", p.t_bc},       {"t3", p.t3},
              {"theta_a", p.theta_a}, {"theta_b", p.theta_b},
              {"dtheta_c0", p.dtheta_c0}, {"z_ci", p.z_ci},
              {"dt", p.dt},           {"t1p", p.t1p},
              {"t2p", p.t2p},         {"hip_x0", p.hip_x0},
              {"hip_dx", p.hip_dx}};
}

void gait_params_from_json(const json& j, GaitParams& p) {
  p.t1 = j.value("t1", p.t1);
  p.t2 = j.value("t2", p.t2);
  p.t_bc = j.value("t_bc", p.t_bc);
  p.t3 = j.value("t3", p.t3);
  p.theta_a = j.value("theta_a", p.theta_a);
  p.theta_b = j.value("theta_b", p.theta_b);
  p.dtheta_c0 = j.value("dtheta_c0", p.dtheta_c0);
  p.z_ci = j.value("z_ci", p.z_ci);
  p.dt = j.value("dt", p.dt);
  p.t1p = j.value("t1p", p.t1p);
  p.t2p = j.value("t2p", p.t2p);
  p.hip_x0 = j.value("hip_x0", p.hip_x0);
  p.hip_dx = j.value("hip_dx", p.hip_dx);
}

std::string step_kind_name(StepKind k) {
  return k == StepKind::kFirst ? "FIRST" : "SUBSEQUENT";
}

StepKind step_kind_from(const std::string& s) {
  if (s == "FIRST") return StepKind::kFirst;
  if (s == "SUBSEQUENT") return StepKind::kSubsequent;
  throw std::invalid_argument("config: step_kind must be FIRST or SUBSEQUENT");
}

}  // namespace

void CaseConfig::validate() const {
  stairs.validate();
  robot.validate();
  gait.validate();
  ik.validate();
  contact.validate();
  aco.validate();
  if (schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");
}

CaseConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path.string());
  json j = json::parse(in);
  CaseConfig c;
  c.schema_version = j.value("schema_version", 1);
  c.case_id = j.value("case_id", c.case_id);
  c.seed = j.value("seed", c.seed);
  if (j.contains("stairs")) {
    const auto& s = j["stairs"];
    c.stairs.run = s.value("run", c.stairs.run);
    c.stairs.rise = s.value("rise", c.stairs.rise);
    c.stairs.n_steps = s.value("n_steps", c.stairs.n_steps);
  }
  c.step_kind = step_kind_from(j.value("step_kind", step_kind_name(c.step_kind)));
  if (j.contains("robot")) {
    const auto& r = j["robot"];
    if (r.contains("lengths"))
      for (int i = 0; i < 9; ++i) c.robot.lengths[i] = r["lengths"].at(i).get<double>();
    if (r.contains("masses"))
      for (int i = 0; i < 9; ++i) c.robot.masses[i] = r["masses"].at(i).get<double>();
    if (r.contains("inertias"))
      for (int i = 0; i < 9; ++i) c.robot.inertias[i] = r["inertias"].at(i).get<double>();
    else {
      c.robot.inertias.fill(0.0);
      c.robot.derive_default_inertias();
    }
    c.robot.gravity = r.value("gravity", c.robot.gravity);
  }
  if (j.contains("gait")) gait_params_from_json(j["gait"], c.gait);
  if (j.contains("knot_shift")) {
    const auto& k = j["knot_shift"];
    c.knot_shift_enabled = k.value("enabled", c.knot_shift_enabled);
    if (k.contains("bounds")) {
      const auto& b = k["bounds"];
      for (int d = 0; d < 8; ++d) {
        c.knot_bounds.box[d][0] = b.at(d).at(0).get<double>();
        c.knot_bounds.box[d][1] = b.at(d).at(1).get<double>();
      }
    }
  }
  if (j.contains("ik")) {
    const auto& k = j["ik"];
    c.ik.learning_rate = k.value("learning_rate", c.ik.learning_rate);
    c.ik.max_epochs = k.value("max_epochs", c.ik.max_epochs);
    c.ik.error_threshold = k.value("error_threshold", c.ik.error_threshold);
    c.torso_pitch_nominal = k.value("torso_pitch_nominal", c.torso_pitch_nominal);
  }
  if (j.contains("contact")) {
    const auto& k = j["contact"];
    c.contact.k_s = k.value("k_s", c.contact.k_s);
    c.contact.k_d = k.value("k_d", c.contact.k_d);
    c.contact.mu = k.value("mu", c.contact.mu);
    c.contact.smoothing_eps = k.value("smoothing_eps", c.contact.smoothing_eps);
    c.contact.active_threshold = k.value("active_threshold", c.contact.active_threshold);
    c.contact.n_substeps = k.value("n_substeps", c.contact.n_substeps);
  }
  if (j.contains("aco")) {
    const auto& a = j["aco"];
    c.aco.n_ants = a.value("n_ants", c.aco.n_ants);
    c.aco.n_iterations = a.value("n_iterations", c.aco.n_iterations);
    c.aco.evaporation = a.value("evaporation", c.aco.evaporation);
    c.aco.archive_size = a.value("archive_size", c.aco.archive_size);
    c.aco.penalty_weight = a.value("penalty_weight", c.aco.penalty_weight);
    if (a.contains("bounds")) {
      const auto& b = a["bounds"];
      for (int d = 0; d < 3; ++d) {
        c.aco.bounds[d][0] = b.at(d).at(0).get<double>();
        c.aco.bounds[d][1] = b.at(d).at(1).get<double>();
      }
    }
  }
  if (j.contains("disturbance")) {
    const auto& d = j["disturbance"];
    c.disturbance.enabled = d.value("enabled", c.disturbance.enabled);
    c.disturbance.amplitude = d.value("amplitude", c.disturbance.amplitude);
    c.disturbance.frequency = d.value("frequency", c.disturbance.frequency);
  }
  c.zmp_k_term = j.value("zmp_k_term", c.zmp_k_term);
  if (j.contains("fixed_gains")) {
    const auto& fg = j["fixed_gains"];
    c.fixed_gains.kp = fg.value("kp", c.fixed_gains.kp);
    c.fixed_gains.kd = fg.value("kd", c.fixed_gains.kd);
    c.fixed_gains.q5_torso = fg.value("q5_torso", c.fixed_gains.q5_torso);
  }
  c.validate();
  return c;
}

void save_config(const CaseConfig& c, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = c.schema_version;
  j["case_id"] = c.case_id;
  j["seed"] = c.seed;
  j["stairs"] = {{"run", c.stairs.run}, {"rise", c.stairs.rise}, {"n_steps", c.stairs.n_steps}};
  j["step_kind"] = step_kind_name(c.step_kind);
  j["robot"] = {{"lengths", c.robot.lengths},
                {"masses", c.robot.masses},
                {"inertias", c.robot.inertias},
                {"gravity", c.robot.gravity}};
  j["gait"] = gait_params_to_json(c.gait);
  j["knot_shift"] = {{"enabled", c.knot_shift_enabled}, {"bounds", c.knot_bounds.box}};
  j["ik"] = {{"learning_rate", c.ik.learning_rate},
             {"max_epochs", c.ik.max_epochs},
             {"error_threshold", c.ik.error_threshold},
             {"torso_pitch_nominal", c.torso_pitch_nominal}};
  j["contact"] = {{"k_s", c.contact.k_s},
                  {"k_d", c.contact.k_d},
                  {"mu", c.contact.mu},
                  {"smoothing_eps", c.contact.smoothing_eps},
                  {"active_threshold", c.contact.active_threshold},
                  {"n_substeps", c.contact.n_substeps}};
  j["aco"] = {{"n_ants", c.aco.n_ants},
              {"n_iterations", c.aco.n_iterations},
              {"evaporation", c.aco.evaporation},
              {"archive_size", c.aco.archive_size},
              {"penalty_weight", c.aco.penalty_weight},
              {"bounds", c.aco.bounds}};
  j["disturbance"] = {{"enabled", c.disturbance.enabled},
                      {"amplitude", c.disturbance.amplitude},
                      {"frequency", c.disturbance.frequency}};
  j["zmp_k_term"] = c.zmp_k_term;
  j["fixed_gains"] = {{"kp", c.fixed_gains.kp},
                      {"kd", c.fixed_gains.kd},
                      {"q5_torso", c.fixed_gains.q5_torso}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_config: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

CaseConfig case_preset(int index) {
  CaseConfig c;
  c.step_kind = StepKind::kSubsequent;
  c.gait.t_bc = 2.4;   // later blend keeps theta_c monotone on these stairs
  c.gait.z_ci = 0.62;  // the leg workspace cannot host 0.78 on two-step swings
  c.gait.hip_x0 = 0.0;
  c.gait.hip_dx = -1.0;  // default 0.72 * run
  c.disturbance.enabled = true;
  switch (index) {
    case 1:
      c.case_id = "case1";
      c.stairs.run = 0.5588;
      c.stairs.rise = 0.64 * 0.5588;
      break;
    case 2:
      c.case_id = "case2";
      c.stairs.run = 0.5080;
      c.stairs.rise = 0.70 * 0.5080;
      break;
    case 3:
      c.case_id = "case3";
      c.stairs.run = 0.5588;
      c.stairs.rise = 0.72 * 0.5588;
      break;
    default:
      throw std::invalid_argument("case_preset: index must be 1, 2 or 3");
  }
  return c;
}

CaseConfig first_step_preset() {
  CaseConfig c;
  c.case_id = "first_step";
  c.step_kind = StepKind::kFirst;
  c.stairs.run = 0.5588;
  c.stairs.rise = 0.64 * 0.5588;
  c.gait.t_bc = 2.5;
  c.gait.z_ci = 0.78;
  c.gait.hip_x0 = 0.0;
  c.gait.hip_dx = 0.15;
  c.disturbance.enabled = false;
  return c;
}

// --- trace emission ----------------------------------------------------------

void emit_gait_csv(const CartesianGait& gait, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"t", "x_A", "z_A", "x_S", "z_S", "x_T", "z_T", "x_H", "z_H", "phase"};
  for (std::size_t k = 0; k < gait.size(); ++k) {
    t.rows.push_back({g17(gait.t[k]), g17(gait.ankle[k].x()), g17(gait.ankle[k].y()),
                      g17(gait.sole[k].x()), g17(gait.sole[k].y()), g17(gait.toe[k].x()),
                      g17(gait.toe[k].y()), g17(gait.hip[k].x()), g17(gait.hip[k].y()),
                      to_string(gait.phase[k])});
  }
  write_csv(path, t);
}

void emit_joint_trajectory_csv(const JointTrajectory& traj, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"t"};
  for (int i = 1; i <= 9; ++i) t.header.push_back("q" + std::to_string(i));
  for (int i = 1; i <= 9; ++i) t.header.push_back("qdot" + std::to_string(i));
  t.header.insert(t.header.end(), {"epochs", "error", "solve_ms"});
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<std::string> row{g17(traj.t[k])};
    for (int i = 0; i < 9; ++i) row.push_back(g17(traj.q_des[k][i]));
    for (int i = 0; i < 9; ++i) row.push_back(g17(traj.qdot_des[k][i]));
    row.push_back(std::to_string(traj.epochs[k]));
    row.push_back(g17(traj.error[k]));
    row.push_back(g17(traj.solve_ms[k]));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

void emit_sim_trace_csv(const RolloutResult& r, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"t"};
  for (int i = 1; i <= 9; ++i) t.header.push_back("q" + std::to_string(i));
  for (int i = 1; i <= 9; ++i) t.header.push_back("qdot" + std::to_string(i));
  for (int i = 1; i <= 9; ++i) t.header.push_back("qddot" + std::to_string(i));
  for (int i = 1; i <= 9; ++i) t.header.push_back("tau" + std::to_string(i));
  for (int i = 1; i <= kNumContacts; ++i) t.header.push_back("Fn" + std::to_string(i));
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    std::vector<std::string> row{g17(r.t[k])};
    for (int i = 0; i < 9; ++i) row.push_back(g17(r.q[k][i]));
    for (int i = 0; i < 9; ++i) row.push_back(g17(r.qdot[k][i]));
    for (int i = 0; i < 9; ++i) row.push_back(g17(r.qddot[k][i]));
    for (int i = 0; i < 9; ++i) row.push_back(g17(r.tau[k][i]));
    for (int p = 0; p < kNumContacts; ++p) row.push_back(g17(r.contact_force[k][2 * p + 1]));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

void emit_zmp_csv(const RolloutResult& r, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"t", "x_zmp", "x_min", "x_max", "margin", "supported"};
  for (const auto& z : r.zmp) {
    t.rows.push_back({g17(z.t), g17(z.x_zmp), g17(z.x_min), g17(z.x_max), g17(z.margin),
                      z.supported ? "1" : "0"});
  }
  write_csv(path, t);
}

void emit_tuning_log_csv(const AcoResult& tuning, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"iteration", "best_cost", "mean_cost"};
  for (std::size_t i = 0; i < tuning.best_cost_curve.size(); ++i) {
    t.rows.push_back({std::to_string(i + 1), g17(tuning.best_cost_curve[i]),
                      g17(tuning.mean_cost_curve[i])});
  }
  write_csv(path, t);
}

void emit_gains_json(const ControllerGains& gains, double cost,
                     const std::filesystem::path& path) {
  json j{{"kp", gains.kp}, {"kd", gains.kd}, {"q5_torso", gains.q5_torso}, {"cost", cost}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_gains_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<std::string> plot_series_manifest() {
  std::vector<std::string> names{"swing_ankle.dat", "swing_sole.dat", "swing_toe.dat",
                                 "hip_path.dat"};
  for (int i = 1; i <= 9; ++i) {
    names.push_back("q" + std::to_string(i) + "_des.dat");
    names.push_back("q" + std::to_string(i) + "_act.dat");
  }
  for (int i = 1; i <= 9; ++i) {
    names.push_back("qdot" + std::to_string(i) + "_des.dat");
    names.push_back("qdot" + std::to_string(i) + "_act.dat");
  }
  for (int i = 1; i <= 9; ++i) names.push_back("tau" + std::to_string(i) + ".dat");
  names.insert(names.end(), {"zmp.dat", "zmp_lower.dat", "zmp_upper.dat", "ik_pose_ms.dat"});
  return names;
}

void emit_plot_data(const CaseArtifacts& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  using Series = std::vector<std::pair<double, double>>;
  auto path_series = [&](const std::vector<Vec2>& pts) {
    Series s;
    for (const auto& p : pts) s.emplace_back(p.x(), p.y());
    return s;
  };
  write_series(dir / "swing_ankle.dat", path_series(a.gait.ankle));
  write_series(dir / "swing_sole.dat", path_series(a.gait.sole));
  write_series(dir / "swing_toe.dat", path_series(a.gait.toe));
  write_series(dir / "hip_path.dat", path_series(a.gait.hip));

  const std::size_t nsim = a.final_rollout.t.size();
  for (int i = 0; i < 9; ++i) {
    Series des, act, vdes, vact, tau;
    for (std::size_t k = 0; k < a.traj.size(); ++k) {
      des.emplace_back(a.traj.t[k], a.traj.q_des[k][i]);
      vdes.emplace_back(a.traj.t[k], a.traj.qdot_des[k][i]);
    }
    for (std::size_t k = 0; k < nsim; ++k) {
      act.emplace_back(a.final_rollout.t[k], a.final_rollout.q[k][i]);
      vact.emplace_back(a.final_rollout.t[k], a.final_rollout.qdot[k][i]);
      tau.emplace_back(a.final_rollout.t[k], a.final_rollout.tau[k][i]);
    }
    const std::string n = std::to_string(i + 1);
    write_series(dir / ("q" + n + "_des.dat"), des);
    write_series(dir / ("q" + n + "_act.dat"), act);
    write_series(dir / ("qdot" + n + "_des.dat"), vdes);
    write_series(dir / ("qdot" + n + "_act.dat"), vact);
    write_series(dir / ("tau" + n + ".dat"), tau);
  }
  Series zmp, lo, hi;
  for (const auto& z : a.final_rollout.zmp) {
    if (!z.supported) continue;
    zmp.emplace_back(z.t, z.x_zmp);
    lo.emplace_back(z.t, z.x_min);
    hi.emplace_back(z.t, z.x_max);
  }
  write_series(dir / "zmp.dat", zmp);
  write_series(dir / "zmp_lower.dat", lo);
  write_series(dir / "zmp_upper.dat", hi);
  Series ik_ms;
  for (std::size_t k = 0; k < a.traj.size(); ++k)
    ik_ms.emplace_back(static_cast<double>(k), a.traj.solve_ms[k]);
  write_series(dir / "ik_pose_ms.dat", ik_ms);
}

// --- reports -------------------------------------------------------------------

namespace {

json report_json_impl(const CaseReport& r, bool comparable) {
  json j;
  j["schema_version"] = r.schema_version;
  j["case_id"] = r.case_id;
  j["seed"] = r.seed;
  j["stairs"] = {{"run", r.run}, {"rise", r.rise}};
  j["step_kind"] = step_kind_name(r.step_kind);
  j["gait_params"] = gait_params_to_json(r.gait_params);
  j["max_joint_accel"] = r.max_joint_accel;
  j["max_joint_jerk"] = r.max_joint_jerk;
  j["gains"] = {{"kp", r.gains.kp}, {"kd", r.gains.kd}, {"q5_torso", r.gains.q5_torso}};
  j["cost"] = r.cost;
  j["tracking_cost"] = r.tracking_cost;
  j["power_cost"] = r.power_cost;
  j["penalty_cost"] = r.penalty_cost;
  j["energy"] = r.energy;
  j["energy_joules"] = r.energy_joules;
  j["peak_torque"] = r.peak_torque;
  j["zmp"] = {{"min_margin", r.zmp.min_margin},
              {"supported", r.zmp.supported},
              {"ssp_supported", r.zmp.ssp_supported},
              {"ssp_margin_ok", r.zmp.ssp_margin_ok},
              {"ssp_margin_ok_fraction", r.zmp.ssp_margin_ok_fraction()},
              {"violations", r.zmp.violations}};
  j["ik"] = {{"poses", r.ik_poses},
             {"total_epochs", r.ik_total_epochs},
             {"mean_solve_ms", comparable ? 0.0 : r.ik_mean_solve_ms}};
  j["wall_clock_seconds"] = comparable ? 0.0 : r.wall_clock_seconds;
  return j;
}

}  // namespace

std::string report_to_json(const CaseReport& r) { return report_json_impl(r, false).dump(2); }
std::string report_comparable_json(const CaseReport& r) {
  return report_json_impl(r, true).dump(2);
}

// --- pipeline ------------------------------------------------------------------

namespace {

ContactParams wired_contact(const CaseConfig& config) {
  ContactParams c = config.contact;
  c.ground = config.stairs;
  c.ground_enabled = true;
  return c;
}

SimState initial_state(const JointTrajectory& traj, double q5) {
  SimState s;
  s.q = traj.q_des.front();
  s.qdot = traj.qdot_des.front();
  s.q[kTorso] = q5;
  s.qdot[kTorso] = 0.0;
  s.t = 0;
  return s;
}

RolloutOptions rollout_options(const CaseConfig& config, const CartesianGait& gait) {
  RolloutOptions opt;
  opt.disturbance = config.disturbance;
  opt.zmp_penalty_weight = config.aco.penalty_weight;
  opt.k_slope = gait.k_slope;
  opt.zmp_k_term = config.zmp_k_term;
  opt.phase = gait.phase;
  return opt;
}

[[noreturn]] void stage_error(const std::string& stage, const std::exception& e) {
  throw std::runtime_error("stage '" + stage + "' failed: " + e.what());
}

}  // namespace

CartesianGait run_plan(const CaseConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  save_config(config, out_dir / "config_echo.json");
  try {
    CartesianGait gait = assemble_gait(config.stairs, config.robot, config.gait, config.step_kind);
    emit_gait_csv(gait, out_dir / "gait.csv");
    return gait;
  } catch (const std::exception& e) {
    stage_error("plan", e);
  }
}

JointTrajectory run_ik(const CaseConfig& config, const std::filesystem::path& out_dir,
                       CartesianGait* gait_out) {
  CartesianGait gait = run_plan(config, out_dir);
  try {
    JointTrajectory traj = solve_gait(gait, config.robot, config.ik, config.torso_pitch_nominal,
                                      derive_seed(config.seed, kIkSeedTag));
    emit_joint_trajectory_csv(traj, out_dir / "joint_trajectory.csv");
    if (gait_out) *gait_out = std::move(gait);
    return traj;
  } catch (const std::exception& e) {
    stage_error("ik", e);
  }
}

RolloutResult run_simulate(const CaseConfig& config, const std::filesystem::path& out_dir) {
  CartesianGait gait;
  JointTrajectory traj = run_ik(config, out_dir, &gait);
  try {
    const ChainKinematics chain(config.robot);
    const ContactParams contact = wired_contact(config);
    RolloutResult r = rollout(config.fixed_gains, traj, initial_state(traj, config.fixed_gains.q5_torso),
                              chain, gait.stance_anchor, contact, rollout_options(config, gait));
    emit_sim_trace_csv(r, out_dir / "sim_trace.csv");
    emit_zmp_csv(r, out_dir / "zmp.csv");
    return r;
  } catch (const std::exception& e) {
    stage_error("simulate", e);
  }
}

CaseReport run_case(const CaseConfig& config, const std::filesystem::path& out_dir,
                    CaseArtifacts* artifacts) {
  const auto t_start = std::chrono::steady_clock::now();
  config.validate();
  std::filesystem::create_directories(out_dir);
  save_config(config, out_dir / "config_echo.json");

  CaseArtifacts a;
  GaitParams params = config.gait;

  if (config.knot_shift_enabled) {
    try {
      const KnotShiftResult ks =
          knot_shift_optimize(config.stairs, config.robot, config.knot_bounds, config.step_kind,
                              config.ik, config.torso_pitch_nominal,
                              derive_seed(config.seed, kKnotSeedTag), config.gait);
      params = ks.params;
    } catch (const std::exception& e) {
      stage_error("knot_shift", e);
    }
  }

  try {
    a.gait = assemble_gait(config.stairs, config.robot, params, config.step_kind);
    emit_gait_csv(a.gait, out_dir / "gait.csv");
  } catch (const std::exception& e) {
    stage_error("plan", e);
  }

  try {
    a.traj = solve_gait(a.gait, config.robot, config.ik, config.torso_pitch_nominal,
                        derive_seed(config.seed, kIkSeedTag));
    emit_joint_trajectory_csv(a.traj, out_dir / "joint_trajectory.csv");
  } catch (const std::exception& e) {
    stage_error("ik", e);
  }

  const ChainKinematics chain(config.robot);
  const ContactParams contact = wired_contact(config);
  const RolloutOptions options = rollout_options(config, a.gait);

  try {
    AcoConfig aco = config.aco;
    aco.seed = derive_seed(config.seed, kAcoSeedTag);
    auto cost_fn = [&](const ControllerGains& gains) {
      return rollout(gains, a.traj, initial_state(a.traj, gains.q5_torso), chain,
                     a.gait.stance_anchor, contact, options)
          .cost;
    };
    a.tuning = aco_tune(aco, cost_fn, true);
    emit_tuning_log_csv(a.tuning, out_dir / "tuning_log.csv");
    emit_gains_json(a.tuning.best, a.tuning.best_cost, out_dir / "gains.json");
  } catch (const std::exception& e) {
    stage_error("tune", e);
  }

  try {
    a.final_rollout =
        rollout(a.tuning.best, a.traj, initial_state(a.traj, a.tuning.best.q5_torso), chain,
                a.gait.stance_anchor, contact, options);
    emit_sim_trace_csv(a.final_rollout, out_dir / "sim_trace.csv");
    emit_zmp_csv(a.final_rollout, out_dir / "zmp.csv");
  } catch (const std::exception& e) {
    stage_error("rollout", e);
  }

  CaseReport& r = a.report;
  r.case_id = config.case_id;
  r.seed = config.seed;
  r.run = config.stairs.run;
  r.rise = config.stairs.rise;
  r.step_kind = config.step_kind;
  r.gait_params = params;
  r.max_joint_accel = max_fd_accel(a.traj.q_des, a.traj.dt);
  r.max_joint_jerk = max_fd_jerk(a.traj.q_des, a.traj.dt);
  r.gains = a.tuning.best;
  r.cost = a.final_rollout.cost;
  r.tracking_cost = a.final_rollout.tracking_cost;
  r.power_cost = a.final_rollout.power_cost;
  r.penalty_cost = a.final_rollout.penalty_cost;
  r.energy = a.final_rollout.energy;
  r.energy_joules = a.final_rollout.energy_joules;
  r.peak_torque = a.final_rollout.peak_torque;
  r.zmp.min_margin = a.final_rollout.min_margin;
  r.zmp.supported = a.final_rollout.supported_samples;
  r.zmp.ssp_supported = a.final_rollout.ssp_supported_samples;
  r.zmp.ssp_margin_ok = a.final_rollout.ssp_margin_ok;
  r.zmp.violations = a.final_rollout.zmp_violations;
  r.ik_poses = static_cast<int>(a.traj.size());
  r.ik_total_epochs = 0;
  double ms = 0;
  for (std::size_t k = 0; k < a.traj.size(); ++k) {
    r.ik_total_epochs += a.traj.epochs[k];
    ms += a.traj.solve_ms[k];
  }
  r.ik_mean_solve_ms = a.traj.size() ? ms / a.traj.size() : 0.0;
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  {
    std::ofstream out(out_dir / "report.json");
    if (!out) throw std::runtime_error("run_case: cannot write report.json");
    out << report_to_json(r) << "\n";
  }
  emit_plot_data(a, out_dir / "plot");
  if (artifacts) *artifacts = std::move(a);
  return r;
}

void reproduce_cases(const std::filesystem::path& out_root, std::uint64_t seed_override,
                     bool has_seed_override) {
  for (int i = 1; i <= 3; ++i) {
    CaseConfig config = case_preset(i);
    if (has_seed_override) config.seed = seed_override;
    run_case(config, out_root / config.case_id);
  }
}

}  // namespace cyclogait
