#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyclogait/robot_model.hpp"

namespace cyclogait {

struct StairSpec {
  double run = 0.5588;   // tread depth per step [m]
  double rise = 0.3576;  // height per step [m]
  int n_steps = 8;

  void validate() const {
    if (!(run > 0) || !(rise > 0) || n_steps < 1)
      throw std::invalid_argument("StairSpec: run, rise > 0 and n_steps >= 1 required");
  }
  // Tread height under x; risers sit at integer multiples of the run so a
  // landing ankle rests on the step nose.
  double height_at(double x) const {
    double k = std::floor(x / run);
    if (k < 0) k = 0;
    if (k > n_steps) k = n_steps;
    return rise * k;
  }
  double slope() const { return rise / run; }
};

enum class StepKind { kFirst, kSubsequent };

struct GaitParams {
  double t1 = 0.5;    // heel lift peak [s]
  double t2 = 1.4;    // end of double support [s]
  double t_bc = 2.2;  // bezier-cycloid blend time [s]
  double t3 = 3.5;    // end of gait [s]
  double theta_a = M_PI / 6;   // sole lift angle
  double theta_b = M_PI / 6;   // toe lift angle
  double dtheta_c0 = 0.01;     // bezier catch spacing on the cycloid [rad]
  double z_ci = 0.78;          // initial hip (COG) height [m]
  double dt = 0.01;            // sample step [s]
  double t1p = 0.8, t2p = 1.1;  // reserved; not used by any formula
  double hip_x0 = 0.0;          // hip start x in the gait frame
  double hip_dx = -1.0;         // hip advance; < 0 means pick a default

  void validate() const {
    if (!(0 < t1 && t1 < t2 && t2 < t_bc && t_bc < t3))
      throw std::invalid_argument("GaitParams: need 0 < t1 < t2 < t_bc < t3");
    if (!(theta_a > 0 && theta_a < M_PI / 2 && theta_b > 0 && theta_b < M_PI / 2))
      throw std::invalid_argument("GaitParams: theta_a, theta_b must be in (0, pi/2)");
    if (!(dtheta_c0 > 0)) throw std::invalid_argument("GaitParams: dtheta_c0 must be > 0");
    if (!(z_ci > 0)) throw std::invalid_argument("GaitParams: z_ci must be > 0");
    if (!(dt > 0)) throw std::invalid_argument("GaitParams: dt must be > 0");
  }
};

struct CycloidSegment {
  double r = 0;        // rolling-circle radius [m]
  double theta_c0 = 0; // truncation angle at the start
  double x_c0 = 0;     // horizontal origin so the apex lands on target
  double z_c0 = 0;     // vertical origin (launch tread level)
  std::array<double, 4> a_c{};  // theta_c(t) cubic coefficients

  Vec2 point(double theta) const {
    return {r * (theta - std::sin(theta)), r * (1.0 - std::cos(theta))};
  }
  double theta_at(double t) const {
    return a_c[0] + t * (a_c[1] + t * (a_c[2] + t * a_c[3]));
  }
  double theta_dot_at(double t) const {
    return a_c[1] + t * (2 * a_c[2] + 3 * a_c[3] * t);
  }
};

// Cubic polynomial segment p(t) = c0 + c1 t + c2 t^2 + c3 t^3 on [t_start, t_end].
struct CubicSegment {
  std::array<double, 4> c{};
  double t_start = 0, t_end = 0;
  double value(double t) const { return c[0] + t * (c[1] + t * (c[2] + t * c[3])); }
  double deriv(double t) const { return c[1] + t * (2 * c[2] + 3 * c[3] * t); }
  double accel(double t) const { return 2 * c[2] + 6 * c[3] * t; }
};

// Solve [p(ta), p'(ta), p(tb), p'(tb)] = [v0, d0, v1, d1] for the cubic.
CubicSegment solve_boundary_cubic(double ta, double tb, double v0, double d0,
                                  double v1, double d1);

struct HipPlan {
  std::array<double, 4> a_z{};  // planned ZMP polynomial
  double c1 = 0, c2 = 0;        // homogeneous COG coefficients
  double omega = 0;             // sqrt(g / z_ci)
  double z_ci = 0;
  double x0 = 0;                // hip/COG start x
  double z0 = 0;                // hip start height
  double arc_radius = 0;        // 0 when the hip height is constant
  double arc_angle = 0;
  double k_slope = 0;           // staircase virtual slope
  double g = 9.81;

  double zmp_at(double t) const {
    return a_z[0] + t * (a_z[1] + t * (a_z[2] + t * a_z[3]));
  }
  double x_at(double t) const {
    const double poly = zmp_at(t) + (z_ci / g) * (6 * a_z[3] * t + 2 * a_z[2]);
    return c1 * std::exp(omega * t) + c2 * std::exp(-omega * t) + poly;
  }
  double xdot_at(double t) const {
    const double dpoly = a_z[1] + 2 * a_z[2] * t + 3 * a_z[3] * t * t + (z_ci / g) * 6 * a_z[3];
    return omega * (c1 * std::exp(omega * t) - c2 * std::exp(-omega * t)) + dpoly;
  }
  double z_at(double x) const {
    if (arc_radius == 0) return z0;
    double arg = arc_radius * arc_radius - (x - x0) * (x - x0);
    if (arg < 0) arg = 0;
    return z0 + arc_radius - std::sqrt(arg);
  }
};

enum class GaitPhase : std::uint8_t { kDsp = 0, kCatch = 1, kTrack = 2 };

inline const char* to_string(GaitPhase p) {
  switch (p) {
    case GaitPhase::kDsp: return "DSP";
    case GaitPhase::kCatch: return "CATCH";
    default: return "TRACK";
  }
}

// Sampled swing-foot and hip plan on the uniform dt grid, in the gait frame
// (origin = swing ankle start on its tread).
struct CartesianGait {
  std::vector<double> t;
  std::vector<Vec2> ankle, sole, toe, hip;
  std::vector<Vec2> ankle_vel, hip_vel;             // analytic per-segment
  std::vector<double> sole_angle, toe_angle;        // q6, q7 reference
  std::vector<double> sole_angle_vel, toe_angle_vel;
  std::vector<GaitPhase> phase;
  Vec2 stance_anchor{0, 0};
  double k_slope = 0;
  double dt = 0.01;
  StepKind kind = StepKind::kSubsequent;
  double target_dx = 0, target_dz = 0;  // swing ankle displacement over the gait
  CycloidSegment cycloid;
  HipPlan hip_plan;
  std::size_t size() const { return t.size(); }
};

// --- individual planning operations -----------------------------------------

struct DspPlan {
  CubicSegment sole_rise, sole_return, toe_rise;  // theta6 on [0,t1],[t1,t2]; theta7 on [t1,t2]
  double t1 = 0, t2 = 0;
  double theta6(double t) const;
  double theta6_dot(double t) const;
  double theta7(double t) const;
  double theta7_dot(double t) const;
  // Ankle position/velocity from the foot angles (toe pinned at l6 + l7).
  Vec2 ankle(double t, double l6, double l7) const;
  Vec2 ankle_vel(double t, double l6, double l7) const;
};

DspPlan plan_dsp(const GaitParams& params, double l6, double l7);

Vec2 cycloid_point(const CycloidSegment& seg, double theta);

// Truncation angle: root of r(th - sin th) = pi r - dx_c in [0, pi] when
// pi r >= dx_c, else 0.
double solve_theta_c0(double r, double dx_c);

struct BezierSegment {
  std::array<Vec2, 4> p;
  double t_start = 0, t_end = 0;
  Vec2 value(double t) const;
  Vec2 deriv(double t) const;
  double duration() const { return t_end - t_start; }
};

struct CatchPlan {
  BezierSegment bezier;
  double theta_b_c4 = 0;      // cycloid angle at the blend
  double theta_dot_bc = 0;    // blend angular velocity
};

// Bridge from the DSP end onto the cycloid at theta_c0 + 2*dtheta_c0.
CatchPlan plan_catch_bezier(const Vec2& dsp_end, const CycloidSegment& seg,
                            double dtheta_c0, double t2, double t_bc);

// theta_c(t) cubic from the blend conditions to (pi, sqrt(g/r)) at t3.
std::array<double, 4> solve_theta_c_poly(double theta_b_c4, double theta_dot_bc,
                                         double t_bc, double t3, double r, double g);

// Swing foot orientation cubic over the single-support phase; the nominal
// boundary (theta_b, 0, theta_b, 0) degenerates to a constant.
CubicSegment plan_swing_foot_orientation(double theta_b, double t2, double t3);
CubicSegment plan_swing_foot_orientation(double v0, double d0, double v1, double d1,
                                         double t2, double t3);

HipPlan plan_hip(double x_zmp_initial, double x_zmp_final, double x_cog_initial,
                 double x_cog_final, const Vec2& hip_start, const Vec2& hip_end,
                 double z_ci, double t3, double g);

CartesianGait assemble_gait(const StairSpec& stairs, const RobotModel& model,
                            const GaitParams& params, StepKind kind);

// --- knot shifting -----------------------------------------------------------

struct KnotShiftBounds {
  // per-parameter [lo, hi]; order: t1, t2, t_bc, t3, theta_a, theta_b, dtheta_c0, z_ci
  std::array<std::array<double, 2>, 8> box{{{0.3, 0.7},
                                            {1.1, 1.7},
                                            {2.1, 2.7},
                                            {3.2, 3.8},
                                            {0.35, 0.75},
                                            {0.35, 0.75},
                                            {0.005, 0.02},
                                            {0.58, 0.80}}};
};

struct KnotShiftResult {
  GaitParams params;
  double max_jerk = 0;  // max over joints and samples of |finite-difference jerk|
  int evaluations = 0;
};

struct IkHyper;  // ik_network.hpp

// Coordinate-descent search (3 refinement rounds, 7 grid points per parameter)
// minimizing the max finite-difference jerk of the IK joint trajectory.
KnotShiftResult knot_shift_optimize(const StairSpec& stairs, const RobotModel& model,
                                    const KnotShiftBounds& bounds, StepKind kind,
                                    const IkHyper& hyper, double torso_pitch,
                                    std::uint64_t seed, const GaitParams& base);

// Max |finite-difference jerk| over joints/samples of a sampled trajectory.
double max_fd_jerk(const std::vector<Vec9>& q, double dt);
double max_fd_accel(const std::vector<Vec9>& q, double dt);

}  // namespace cyclogait
