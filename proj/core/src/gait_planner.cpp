#include "cyclogait/gait_planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cyclogait {

CubicSegment solve_boundary_cubic(double ta, double tb, double v0, double d0,
                                  double v1, double d1) {
  if (tb <= ta) throw std::invalid_argument("solve_boundary_cubic: singular system (ta >= tb)");
  Eigen::Matrix4d A;
  A << 1, ta, ta * ta, ta * ta * ta,
       0, 1, 2 * ta, 3 * ta * ta,
       1, tb, tb * tb, tb * tb * tb,
       0, 1, 2 * tb, 3 * tb * tb;
  Eigen::Vector4d rhs{v0, d0, v1, d1};
  Eigen::Vector4d c = A.fullPivLu().solve(rhs);
  CubicSegment seg;
  seg.c = {c[0], c[1], c[2], c[3]};
  seg.t_start = ta;
  seg.t_end = tb;
  return seg;
}

// --- double support ----------------------------------------------------------

double DspPlan::theta6(double t) const {
  return t <= t1 ? sole_rise.value(t) : sole_return.value(t);
}
double DspPlan::theta6_dot(double t) const {
  return t <= t1 ? sole_rise.deriv(t) : sole_return.deriv(t);
}
double DspPlan::theta7(double t) const { return t <= t1 ? 0.0 : toe_rise.value(t); }
double DspPlan::theta7_dot(double t) const { return t <= t1 ? 0.0 : toe_rise.deriv(t); }

Vec2 DspPlan::ankle(double t, double l6, double l7) const {
  const double th6 = theta6(t), th7 = theta7(t);
  return {l6 * (1 - std::cos(th6)) + l7 * (1 - std::cos(th7)),
          l6 * std::sin(th6) + l7 * std::sin(th7)};
}

Vec2 DspPlan::ankle_vel(double t, double l6, double l7) const {
  const double th6 = theta6(t), th7 = theta7(t);
  const double d6 = theta6_dot(t), d7 = theta7_dot(t);
  return {l6 * std::sin(th6) * d6 + l7 * std::sin(th7) * d7,
          l6 * std::cos(th6) * d6 + l7 * std::cos(th7) * d7};
}

DspPlan plan_dsp(const GaitParams& params, double l6, double l7) {
  if (params.t1 >= params.t2) throw std::invalid_argument("plan_dsp: t1 must be < t2");
  if (!(params.t1 > 0)) throw std::invalid_argument("plan_dsp: t1 must be > 0");
  (void)l6;
  (void)l7;
  DspPlan plan;
  plan.t1 = params.t1;
  plan.t2 = params.t2;
  // Zero-velocity boundary cubics; the printed closed forms only satisfy their
  // own boundary conditions when t2 = 2 t1.
  plan.sole_rise = solve_boundary_cubic(0.0, params.t1, 0.0, 0.0, params.theta_a, 0.0);
  plan.sole_return = solve_boundary_cubic(params.t1, params.t2, params.theta_a, 0.0, 0.0, 0.0);
  plan.toe_rise = solve_boundary_cubic(params.t1, params.t2, 0.0, 0.0, params.theta_b, 0.0);
  return plan;
}

// --- cycloid -----------------------------------------------------------------

Vec2 cycloid_point(const CycloidSegment& seg, double theta) {
  if (!(seg.r > 0)) throw std::invalid_argument("cycloid_point: r must be > 0");
  return seg.point(theta);
}

double solve_theta_c0(double r, double dx_c) {
  if (!(r > 0)) throw std::invalid_argument("solve_theta_c0: r must be > 0");
  if (dx_c < 0) throw std::invalid_argument("solve_theta_c0: dx_c must be >= 0");
  const double target = M_PI * r - dx_c;
  if (target < 0) return 0.0;
  // theta - sin(theta) is monotone on [0, pi]; bisect.
  double lo = 0.0, hi = M_PI;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (r * (mid - std::sin(mid)) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// --- bezier catch ------------------------------------------------------------

Vec2 BezierSegment::value(double t) const {
  const double s = (t - t_start) / (t_end - t_start);
  const double u = 1 - s;
  return u * u * u * p[0] + 3 * u * u * s * p[1] + 3 * u * s * s * p[2] + s * s * s * p[3];
}

Vec2 BezierSegment::deriv(double t) const {
  const double s = (t - t_start) / (t_end - t_start);
  const double u = 1 - s;
  const Vec2 d = 3 * (u * u * (p[1] - p[0]) + 2 * u * s * (p[2] - p[1]) + s * s * (p[3] - p[2]));
  return d / (t_end - t_start);
}

CatchPlan plan_catch_bezier(const Vec2& dsp_end, const CycloidSegment& seg,
                            double dtheta_c0, double t2, double t_bc) {
  if (t_bc <= t2) throw std::invalid_argument("plan_catch_bezier: t_bc must be > t2");
  const double th3 = seg.theta_c0 + dtheta_c0;
  const double th4 = seg.theta_c0 + 2 * dtheta_c0;
  CatchPlan plan;
  plan.theta_b_c4 = th4;
  BezierSegment& b = plan.bezier;
  b.t_start = t2;
  b.t_end = t_bc;
  b.p[0] = dsp_end;
  // Case split: theta_c0 > 0 iff the half-cycloid span exceeds the remaining
  // horizontal distance (pi r >= dx_c).
  if (seg.theta_c0 > 0.0) {
    b.p[1] = {dsp_end.x(), dsp_end.y() + seg.r * (1 - std::cos(seg.theta_c0))};
  } else {
    b.p[1] = {seg.x_c0, dsp_end.y()};  // x_c0 = target_dx - pi r
  }
  b.p[2] = Vec2{seg.x_c0, seg.z_c0} + seg.point(th3);
  b.p[3] = Vec2{seg.x_c0, seg.z_c0} + seg.point(th4);
  const double s4 = std::sin(th4);
  if (std::abs(s4) < 1e-9)
    throw std::runtime_error(
        "plan_catch_bezier: degenerate blend, sin(theta_b_c4) ~ 0 "
        "(dtheta_c0 too small or flat cycloid start)");
  const double zdot_end = 3 * (b.p[3].y() - b.p[2].y()) / b.duration();
  plan.theta_dot_bc = zdot_end / (seg.r * s4);
  return plan;
}

std::array<double, 4> solve_theta_c_poly(double theta_b_c4, double theta_dot_bc,
                                         double t_bc, double t3, double r, double g) {
  if (t_bc == t3) throw std::invalid_argument("solve_theta_c_poly: singular system (t_bc == t3)");
  const CubicSegment seg =
      solve_boundary_cubic(t_bc, t3, theta_b_c4, theta_dot_bc, M_PI, std::sqrt(g / r));
  return seg.c;
}

CubicSegment plan_swing_foot_orientation(double theta_b, double t2, double t3) {
  return plan_swing_foot_orientation(theta_b, 0.0, theta_b, 0.0, t2, t3);
}

CubicSegment plan_swing_foot_orientation(double v0, double d0, double v1, double d1,
                                         double t2, double t3) {
  if (t2 >= t3) throw std::invalid_argument("plan_swing_foot_orientation: t2 must be < t3");
  return solve_boundary_cubic(t2, t3, v0, d0, v1, d1);
}

// --- hip ---------------------------------------------------------------------

HipPlan plan_hip(double x_zmp_initial, double x_zmp_final, double x_cog_initial,
                 double x_cog_final, const Vec2& hip_start, const Vec2& hip_end,
                 double z_ci, double t3, double g) {
  if (!(t3 > 0)) throw std::invalid_argument("plan_hip: t3 must be > 0");
  if (!(z_ci > 0)) throw std::invalid_argument("plan_hip: z_ci must be > 0");
  HipPlan plan;
  plan.z_ci = z_ci;
  plan.g = g;
  plan.omega = std::sqrt(g / z_ci);
  plan.x0 = hip_start.x();
  plan.z0 = hip_start.y();

  const CubicSegment zmp = solve_boundary_cubic(0.0, t3, x_zmp_initial, 0.0, x_zmp_final, 0.0);
  plan.a_z = zmp.c;

  auto particular = [&](double t) {
    return plan.zmp_at(t) + (z_ci / g) * (6 * plan.a_z[3] * t + 2 * plan.a_z[2]);
  };
  const double e = std::exp(plan.omega * t3);
  Eigen::Matrix2d A;
  A << 1, 1, e, 1 / e;
  Eigen::Vector2d rhs{x_cog_initial - particular(0.0), x_cog_final - particular(t3)};
  Eigen::Vector2d c = A.fullPivLu().solve(rhs);
  plan.c1 = c[0];
  plan.c2 = c[1];

  const double dxh = hip_end.x() - hip_start.x();
  const double dzh = hip_end.y() - hip_start.y();
  if (std::abs(dzh) < 1e-12) {
    plan.arc_radius = 0;  // flat: constant hip height
    plan.arc_angle = 0;
    return plan;
  }
  if (std::abs(dxh) < 1e-12)
    throw std::runtime_error("plan_hip: arc solver needs horizontal hip travel for a height change");

  // Solve R sin(th) = dxh, R (1 - cos(th)) = dzh. Eliminating R gives
  // f(th) = dxh (1 - cos th) - dzh sin th = 0 with root th = 2 atan(dzh/dxh).
  auto f = [&](double th) { return dxh * (1 - std::cos(th)) - dzh * std::sin(th); };
  double lo = 1e-8, hi = M_PI - 1e-8;
  double th = 2 * std::atan2(dzh, dxh);  // analytic seed
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double fv = f(th);
    const double dfv = dxh * std::sin(th) - dzh * std::cos(th);
    if (std::abs(fv) < 1e-14) {
      converged = true;
      break;
    }
    double next = th - fv / dfv;
    if (!(next > lo && next < hi) || dfv == 0) {  // bisection fallback
      if (f(lo) * fv < 0)
        hi = th;
      else
        lo = th;
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - th) < 1e-12 && std::abs(f(next)) < 1e-10) {
      th = next;
      converged = true;
      break;
    }
    th = next;
  }
  if (!converged && std::abs(f(th)) > 1e-10) {
    std::ostringstream msg;
    msg << "plan_hip: arc solver failed to converge, residual " << f(th);
    throw std::runtime_error(msg.str());
  }
  plan.arc_angle = th;
  plan.arc_radius = dxh / std::sin(th);

  // Both endpoints must sit on the arc.
  const double z_end = plan.z_at(hip_end.x());
  if (std::abs(z_end - hip_end.y()) > 1e-9) {
    std::ostringstream msg;
    msg << "plan_hip: arc endpoint residual " << z_end - hip_end.y();
    throw std::runtime_error(msg.str());
  }
  return plan;
}

// --- assembly ----------------------------------------------------------------

namespace {

double default_hip_dx(const StairSpec& stairs, StepKind kind) {
  return kind == StepKind::kSubsequent ? 0.72 * stairs.run : 0.15;
}

}  // namespace

CartesianGait assemble_gait(const StairSpec& stairs, const RobotModel& model,
                            const GaitParams& params, StepKind kind) {
  stairs.validate();
  model.validate();
  params.validate();
  const double l6 = model.lengths[5], l7 = model.lengths[6];
  const double g = model.gravity;

  CartesianGait gait;
  gait.kind = kind;
  gait.dt = params.dt;
  gait.k_slope = stairs.slope();

  const bool sub = kind == StepKind::kSubsequent;
  const double DX = sub ? 2 * stairs.run : stairs.run;
  const double DZ = sub ? 2 * stairs.rise : stairs.rise;
  gait.target_dx = DX;
  gait.target_dz = DZ;
  gait.stance_anchor = sub ? Vec2{stairs.run, stairs.rise} : Vec2{0.0, 0.0};

  const DspPlan dsp = plan_dsp(params, l6, l7);
  const Vec2 dsp_end = dsp.ankle(params.t2, l6, l7);

  CycloidSegment cyc;
  cyc.r = DZ / 2;  // half-cycloid apex = step rise
  cyc.z_c0 = 0.0;  // launch tread level
  const double dx_c = DX - dsp_end.x();
  cyc.theta_c0 = solve_theta_c0(cyc.r, dx_c);
  cyc.x_c0 = DX - M_PI * cyc.r;
  const CatchPlan catch_plan =
      plan_catch_bezier(dsp_end, cyc, params.dtheta_c0, params.t2, params.t_bc);
  cyc.a_c = solve_theta_c_poly(catch_plan.theta_b_c4, catch_plan.theta_dot_bc,
                               params.t_bc, params.t3, cyc.r, g);
  gait.cycloid = cyc;

  // theta_c must not run backwards on the track segment.
  {
    const double a1 = cyc.a_c[1], a2 = cyc.a_c[2], a3 = cyc.a_c[3];
    double min_rate = std::min(cyc.theta_dot_at(params.t_bc), cyc.theta_dot_at(params.t3));
    if (a3 != 0) {
      const double t_ext = -a2 / (3 * a3);  // vertex of the quadratic rate
      if (t_ext > params.t_bc && t_ext < params.t3)
        min_rate = std::min(min_rate, a1 + t_ext * (2 * a2 + 3 * a3 * t_ext));
    }
    if (min_rate < -1e-9) {
      std::ostringstream msg;
      msg << "assemble_gait: theta_c(t) is not monotone on the track segment "
          << "(min rate " << min_rate << " rad/s); shift t_bc/t3 knots";
      throw std::runtime_error(msg.str());
    }
  }

  // Swing foot orientation over the SSP: sole stays level, toe eases out from
  // theta_b to a flat landing.
  const CubicSegment toe_ease =
      plan_swing_foot_orientation(params.theta_b, 0.0, 0.0, 0.0, params.t2, params.t3);

  // Hip plan: start above the swing ankle, advance hip_dx, rise one step for
  // a subsequent gait. ZMP boundaries coincide with the COG at rest.
  const double hip_dx = params.hip_dx >= 0 ? params.hip_dx : default_hip_dx(stairs, kind);
  const Vec2 hip_start{params.hip_x0, params.z_ci};
  const Vec2 hip_end{params.hip_x0 + hip_dx, params.z_ci + (sub ? stairs.rise : 0.0)};
  gait.hip_plan = plan_hip(hip_start.x(), hip_end.x(), hip_start.x(), hip_end.x(),
                           hip_start, hip_end, params.z_ci, params.t3, g);

  const int n = static_cast<int>(std::lround(params.t3 / params.dt));
  gait.t.reserve(n + 1);
  const double reach = model.leg_reach() - 1e-4;

  for (int k = 0; k <= n; ++k) {
    const double t = std::min(k * params.dt, params.t3);
    Vec2 ankle, ankle_vel;
    double th6, th7, th6d, th7d;
    GaitPhase phase;
    if (t <= params.t2) {
      phase = GaitPhase::kDsp;
      ankle = dsp.ankle(t, l6, l7);
      ankle_vel = dsp.ankle_vel(t, l6, l7);
      th6 = dsp.theta6(t);
      th6d = dsp.theta6_dot(t);
      th7 = dsp.theta7(t);
      th7d = dsp.theta7_dot(t);
    } else {
      if (t <= params.t_bc) {
        phase = GaitPhase::kCatch;
        ankle = catch_plan.bezier.value(t);
        ankle_vel = catch_plan.bezier.deriv(t);
      } else {
        phase = GaitPhase::kTrack;
        const double th = cyc.theta_at(t);
        const double thd = cyc.theta_dot_at(t);
        ankle = Vec2{cyc.x_c0, cyc.z_c0} + cyc.point(th);
        ankle_vel = thd * Vec2{cyc.r * (1 - std::cos(th)), cyc.r * std::sin(th)};
      }
      th6 = 0.0;
      th6d = 0.0;
      th7 = toe_ease.value(t);
      th7d = toe_ease.deriv(t);
    }
    const FootPoints fp = foot_points(ankle, th6, th7, l6, l7);
    const double x_hip = gait.hip_plan.x_at(t);
    const Vec2 hip{x_hip, gait.hip_plan.z_at(x_hip)};

    // Workspace feasibility for both legs.
    const double d_swing = (ankle - hip).norm();
    const double d_stance = (gait.stance_anchor - hip).norm();
    if (d_swing > reach || d_stance > reach) {
      std::ostringstream msg;
      msg << "assemble_gait: workspace violation at t=" << t << " (sample " << k << "): "
          << (d_swing > reach ? "swing" : "stance") << " leg needs "
          << std::max(d_swing, d_stance) << " m, reach is " << reach << " m";
      throw std::runtime_error(msg.str());
    }
    // Plan-level ground clearance: never below the launch tread during the
    // swing, and on (not under) the staircase at touchdown.
    const double launch_level = 0.0;
    if (fp.sole.y() < launch_level - 1e-6 || fp.toe.y() < launch_level - 1e-6) {
      std::ostringstream msg;
      msg << "assemble_gait: planned foot below launch tread at t=" << t;
      throw std::runtime_error(msg.str());
    }
    if (k == n) {
      const double hs = stairs.height_at(fp.sole.x()), ht = stairs.height_at(fp.toe.x());
      if (fp.sole.y() < hs - 1e-6 || fp.toe.y() < ht - 1e-6)
        throw std::runtime_error("assemble_gait: planned foot penetrates the landing tread");
    }

    gait.t.push_back(t);
    gait.ankle.push_back(ankle);
    gait.ankle_vel.push_back(ankle_vel);
    gait.sole.push_back(fp.sole);
    gait.toe.push_back(fp.toe);
    gait.hip.push_back(hip);
    gait.hip_vel.push_back(Vec2{gait.hip_plan.xdot_at(t), 0.0});
    gait.sole_angle.push_back(th6);
    gait.sole_angle_vel.push_back(th6d);
    gait.toe_angle.push_back(th7);
    gait.toe_angle_vel.push_back(th7d);
    gait.phase.push_back(phase);
  }
  return gait;
}

// --- jerk metric -------------------------------------------------------------

namespace {

std::vector<Vec9> central_diff(const std::vector<Vec9>& x, double dt) {
  const std::size_t n = x.size();
  std::vector<Vec9> d(n);
  if (n < 2) {
    for (auto& v : d) v.setZero();
    return d;
  }
  d[0] = (x[1] - x[0]) / dt;
  d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2 * dt);
  return d;
}

}  // namespace

double max_fd_jerk(const std::vector<Vec9>& q, double dt) {
  const auto v = central_diff(q, dt);
  const auto a = central_diff(v, dt);
  const auto j = central_diff(a, dt);
  double m = 0;
  for (const auto& ji : j) m = std::max(m, ji.cwiseAbs().maxCoeff());
  return m;
}

double max_fd_accel(const std::vector<Vec9>& q, double dt) {
  const auto v = central_diff(q, dt);
  const auto a = central_diff(v, dt);
  double m = 0;
  for (const auto& ai : a) m = std::max(m, ai.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace cyclogait
