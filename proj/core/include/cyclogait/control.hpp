#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cyclogait/dynamics.hpp"
#include "cyclogait/ik_network.hpp"
#include "cyclogait/stability.hpp"

namespace cyclogait {

struct ControllerGains {
  double kp = 0;        // shared across all joints [N m / rad]
  double kd = 0;        // [N m s / rad]
  double q5_torso = 1.25;  // commanded torso pitch [rad]
};

struct DisturbanceSpec {
  bool enabled = false;
  double amplitude = 1.0 / 70.0;  // [N m], applied to every joint
  double frequency = 2.0;         // [rad/s]
  double torque_at(double t) const { return enabled ? amplitude * std::sin(frequency * t) : 0.0; }
};

Vec9 pd_torque(const ControllerGains& gains, const Vec9& q_des, const Vec9& q,
               const Vec9& qdot_des, const Vec9& qdot);

struct RolloutOptions {
  DisturbanceSpec disturbance;
  double zmp_penalty_weight = 100.0;  // cost per ZMP-violating supported sample
  double k_slope = 0;
  bool zmp_k_term = true;
  std::vector<GaitPhase> phase;  // plan phase labels, for SSP bookkeeping
};

struct RolloutResult {
  bool feasible = true;
  std::string failure;
  double cost = 0;             // tracking + instantaneous power + ZMP penalty
  double tracking_cost = 0;    // sum |e| + |edot|
  double power_cost = 0;       // sum |tau .* qdot|
  double penalty_cost = 0;
  double energy = 0;           // sum_k sum_j |tau qdot| (per-sample, unintegrated)
  double energy_joules = 0;    // the same integrated over dt
  double peak_torque = 0;
  double max_qddot = 0;
  double max_jerk = 0;         // finite-difference jerk of the simulated q
  int zmp_violations = 0;
  int supported_samples = 0;
  int ssp_supported_samples = 0;
  int ssp_margin_ok = 0;       // supported SSP samples with margin >= 0
  double min_margin = 0;
  // traces, one row per reporting sample
  std::vector<double> t;
  std::vector<Vec9> q, qdot, qddot, tau;
  std::vector<Vec12> contact_force;
  std::vector<ZmpRecord> zmp;
};

// Closed-loop tracking of a desired joint trajectory through the quantized
// dynamics. The PD law is evaluated each substep against the zero-order-held
// desired sample; the derivative gain is folded into the implicit velocity
// solve (an explicit kd on the light toe joints is unstable at any usable
// substep). Dynamics blow-up is reported as an infeasible result, not thrown.
RolloutResult rollout(const ControllerGains& gains, const JointTrajectory& traj,
                      const SimState& initial, const ChainKinematics& chain,
                      const Vec2& stance_anchor, const ContactParams& contact,
                      const RolloutOptions& options);

struct AcoConfig {
  int n_ants = 30;
  int n_iterations = 100;
  double evaporation = 0.7;  // maps to kernel width 1 - rho
  std::uint64_t seed = 1;
  int archive_size = 30;
  double penalty_weight = 100.0;
  // decision variable bounds: kp, kd, q5
  std::array<std::array<double, 2>, 3> bounds{{{0.0, 200.0}, {0.0, 200.0}, {1.0, 1.5}}};

  void validate() const {
    if (n_ants < 2) throw std::invalid_argument("AcoConfig: n_ants must be >= 2");
    if (n_iterations < 1) throw std::invalid_argument("AcoConfig: n_iterations must be >= 1");
    if (!(evaporation > 0 && evaporation < 1))
      throw std::invalid_argument("AcoConfig: evaporation must be in (0, 1)");
    if (archive_size < 2) throw std::invalid_argument("AcoConfig: archive_size must be >= 2");
    for (const auto& b : bounds)
      if (!(b[1] > b[0])) throw std::invalid_argument("AcoConfig: degenerate bounds");
  }
};

struct AcoResult {
  ControllerGains best;
  double best_cost = 0;
  std::vector<double> best_cost_curve;  // per iteration, non-increasing
  std::vector<double> mean_cost_curve;
  int evaluations = 0;
};

// Continuous-domain ant colony: Gaussian kernel sampling around a ranked
// solution archive. Candidate RNG streams derive from (seed, iteration, ant)
// so concurrent evaluation cannot change the result.
AcoResult aco_tune(const AcoConfig& config,
                   const std::function<double(const ControllerGains&)>& cost_fn,
                   bool parallel = true);

}  // namespace cyclogait
