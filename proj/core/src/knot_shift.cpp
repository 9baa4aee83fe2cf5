#include <cmath>
#include <limits>

#include "cyclogait/gait_planner.hpp"
#include "cyclogait/ik_network.hpp"
#include "cyclogait/rng.hpp"

namespace cyclogait {

namespace {

std::array<double, 8> to_vector(const GaitParams& p) {
  return {p.t1, p.t2, p.t_bc, p.t3, p.theta_a, p.theta_b, p.dtheta_c0, p.z_ci};
}

GaitParams from_vector(const GaitParams& base, const std::array<double, 8>& x) {
  GaitParams p = base;
  p.t1 = x[0];
  p.t2 = x[1];
  p.t_bc = x[2];
  p.t3 = x[3];
  p.theta_a = x[4];
  p.theta_b = x[5];
  p.dtheta_c0 = x[6];
  p.z_ci = x[7];
  return p;
}

}  // namespace

KnotShiftResult knot_shift_optimize(const StairSpec& stairs, const RobotModel& model,
                                    const KnotShiftBounds& bounds, StepKind kind,
                                    const IkHyper& hyper, double torso_pitch,
                                    std::uint64_t seed, const GaitParams& base) {
  for (const auto& b : bounds.box)
    if (!(b[1] >= b[0])) throw std::invalid_argument("knot_shift_optimize: empty bounds");

  int evaluations = 0;
  auto objective = [&](const std::array<double, 8>& x) -> double {
    ++evaluations;
    try {
      const GaitParams p = from_vector(base, x);
      p.validate();
      const CartesianGait gait = assemble_gait(stairs, model, p, kind);
      const JointTrajectory traj =
          solve_gait(gait, model, hyper, torso_pitch, derive_seed(seed, 7));
      return max_fd_jerk(traj.q_des, p.dt);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Seed the incumbent: base parameters, the box midpoint, and a deterministic
  // scatter; the box may contain large infeasible regions.
  std::array<double, 8> best = to_vector(base);
  for (int d = 0; d < 8; ++d) best[d] = std::clamp(best[d], bounds.box[d][0], bounds.box[d][1]);
  double best_cost = objective(best);
  {
    std::array<double, 8> mid{};
    for (int d = 0; d < 8; ++d) mid[d] = 0.5 * (bounds.box[d][0] + bounds.box[d][1]);
    const double c = objective(mid);
    if (c < best_cost) {
      best_cost = c;
      best = mid;
    }
    auto rng = make_rng(seed, 11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int s = 0; s < 30; ++s) {
      std::array<double, 8> x{};
      for (int d = 0; d < 8; ++d)
        x[d] = bounds.box[d][0] + u01(rng) * (bounds.box[d][1] - bounds.box[d][0]);
      const double cs = objective(x);
      if (cs < best_cost) {
        best_cost = cs;
        best = x;
      }
    }
  }
  if (!std::isfinite(best_cost))
    throw std::runtime_error("knot_shift_optimize: no feasible parameter set inside the bounds");

  // Coordinate descent over a refining grid: 3 rounds, 7 points per parameter.
  constexpr int kRounds = 3, kGrid = 7;
  for (int round = 0; round < kRounds; ++round) {
    const double shrink = std::pow(0.4, round);
    for (int d = 0; d < 8; ++d) {
      const double half = 0.5 * shrink * (bounds.box[d][1] - bounds.box[d][0]);
      if (half <= 0) continue;
      const double lo = std::max(bounds.box[d][0], best[d] - half);
      const double hi = std::min(bounds.box[d][1], best[d] + half);
      for (int gi = 0; gi < kGrid; ++gi) {
        std::array<double, 8> x = best;
        x[d] = lo + (hi - lo) * gi / (kGrid - 1);
        const double c = objective(x);
        if (c < best_cost) {
          best_cost = c;
          best = x;
        }
      }
    }
  }

  KnotShiftResult res;
  res.params = from_vector(base, best);
  res.max_jerk = best_cost;
  res.evaluations = evaluations;
  return res;
}

}  // namespace cyclogait
