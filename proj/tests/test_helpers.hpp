#pragma once

#include <cmath>
#include <random>

#include "cyclogait/robot_model.hpp"

namespace cyclogait::testing {

// Closed-form two-link IK oracle, elbow branch selected by knee_forward
// (positive relative knee angle). Independent of the production solvers.
inline std::pair<double, double> two_link_ik(const Vec2& hip, const Vec2& target,
                                             double l1, double l2, bool knee_forward = true) {
  const double x = target.x() - hip.x();
  const double zp = hip.y() - target.y();  // z' measured downward
  const double r2 = x * x + zp * zp;
  double c2 = (r2 - l1 * l1 - l2 * l2) / (2 * l1 * l2);
  c2 = std::clamp(c2, -1.0, 1.0);
  double t2 = std::acos(c2);
  if (!knee_forward) t2 = -t2;
  const double t1 = std::atan2(zp, x) - std::atan2(l2 * std::sin(t2), l1 + l2 * std::cos(t2));
  return {t1, t2};
}

inline double wrap_angle(double a) {
  return std::remainder(a, 2 * M_PI);
}

// Random joint state with moderate rates; seeds are fixed by the callers.
inline JointState random_state(std::mt19937_64& rng, double q_span = 1.5, double v_span = 1.0) {
  std::uniform_real_distribution<double> uq(-q_span, q_span);
  std::uniform_real_distribution<double> uv(-v_span, v_span);
  JointState s;
  for (int i = 0; i < 9; ++i) {
    s.q[i] = uq(rng);
    s.qdot[i] = uv(rng);
  }
  return s;
}

}  // namespace cyclogait::testing
