#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace cyclogait {

using Vec2 = Eigen::Vector2d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat29 = Eigen::Matrix<double, 2, 9>;
using Mat12x9 = Eigen::Matrix<double, 12, 9>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

// Joint indices (0-based). All q_i are absolute pitch angles of link i in the
// sagittal plane. Leg and foot links point along (cos q, -sin q); the torso
// points along (cos q, +sin q) so that q5 ~ pi/2 is upright.
enum Joint : int {
  kSwingThigh = 0,
  kSwingShank = 1,
  kStanceThigh = 2,
  kStanceShank = 3,
  kTorso = 4,
  kSwingSole = 5,
  kSwingToe = 6,
  kStanceSole = 7,
  kStanceToe = 8,
};

// Contact point indices: {toe, sole, ankle} x {swing, stance}.
enum Contact : int {
  kContactSwingToe = 0,
  kContactSwingSole = 1,
  kContactSwingAnkle = 2,
  kContactStanceToe = 3,
  kContactStanceSole = 4,
  kContactStanceAnkle = 5,
};
inline constexpr int kNumContacts = 6;

// Planar 9-link toe-foot biped: two 2-link legs, torso, and two 2-link feet
// (ankle-sole, sole-toe). Lengths/masses follow the reference geometry; link
// inertia defaults to the uniform slender rod m*l^2/12 about the link COM.
struct RobotModel {
  std::array<double, 9> lengths{0.40, 0.40, 0.40, 0.40, 0.30, 0.12, 0.05, 0.12, 0.05};
  std::array<double, 9> masses{6.0, 4.0, 6.0, 4.0, 30.0, 0.70, 0.15, 0.70, 0.15};
  std::array<double, 9> inertias{};  // zero means "derive slender-rod default"
  double gravity = 9.81;

  RobotModel() { derive_default_inertias(); }

  void derive_default_inertias() {
    for (int i = 0; i < 9; ++i) {
      if (inertias[i] == 0.0)
        inertias[i] = masses[i] * lengths[i] * lengths[i] / 12.0;
    }
  }

  double leg_reach() const { return lengths[0] + lengths[1]; }
  double total_mass() const {
    double m = 0;
    for (double mi : masses) m += mi;
    return m;
  }

  void validate() const {
    for (int i = 0; i < 9; ++i) {
      if (!(lengths[i] > 0)) throw std::invalid_argument("RobotModel: lengths must be > 0");
      if (!(masses[i] > 0)) throw std::invalid_argument("RobotModel: masses must be > 0");
      if (!(inertias[i] >= 0)) throw std::invalid_argument("RobotModel: inertias must be >= 0");
    }
    if (lengths[0] != lengths[2] || lengths[1] != lengths[3] ||
        lengths[5] != lengths[7] || lengths[6] != lengths[8])
      throw std::invalid_argument("RobotModel: leg/foot lengths must be symmetric");
  }
};

struct JointState {
  Vec9 q = Vec9::Zero();
  Vec9 qdot = Vec9::Zero();
};

// Per-link COM position and its exact first/second time derivatives.
struct LinkComStates {
  Eigen::Matrix<double, 9, 1> x, z, xdot, zdot, xddot, zddot;
};

// Kinematics of the chain rooted at the (fixed) stance ankle. Every link COM
// and contact point is an affine combination of the per-joint unit vectors
//   u_j = (cos q_j, -sin q_j)   (legs, feet)
//   u_5 = (cos q_5, +sin q_5)   (torso)
// with constant length coefficients, so Jacobians and accelerations are exact.
class ChainKinematics {
 public:
  explicit ChainKinematics(const RobotModel& model);

  // COM coefficient row i: com_i = anchor + sum_j coeff(i,j) * u_j
  const Mat9& com_coeffs() const { return com_; }
  // Contact point coefficient rows in Contact order.
  const Eigen::Matrix<double, 6, 9>& contact_coeffs() const { return pts_; }

  LinkComStates link_com_states(const JointState& s, const Vec9& qddot,
                                const Vec2& stance_anchor) const;

  // Positions of the 6 contact points.
  void contact_points(const Vec9& q, const Vec2& stance_anchor,
                      Eigen::Matrix<double, 6, 1>& x,
                      Eigen::Matrix<double, 6, 1>& z) const;

  // 12x9 Jacobian mapping qdot to contact-point (x, z) velocities, rows
  // interleaved per point.
  Mat12x9 contact_jacobian(const Vec9& q) const;

  // 2x9 COM Jacobian of link i.
  Mat29 com_jacobian(int link, const Vec9& q) const;

  Vec2 hip_position(const Vec9& q, const Vec2& stance_anchor) const;

  const RobotModel& model() const { return model_; }

  // Mass-weighted Gram matrix of the COM coefficient columns and the
  // mass-weighted column sums; constant per model, used by the dynamics.
  const Mat9& mass_gram() const { return gram_; }
  const Vec9& inertia_diag() const { return inertia_diag_; }
  const Vec9& mass_coeff() const { return mass_coeff_; }

 private:
  RobotModel model_;
  Mat9 com_;                       // link COM coefficients
  Eigen::Matrix<double, 6, 9> pts_;  // contact point coefficients
  Mat9 gram_;
  Vec9 inertia_diag_;
  Vec9 mass_coeff_;
};

// Forward kinematics of one 2-link leg, hip -> ankle. theta1 is the absolute
// thigh pitch, theta2 the knee angle relative to the thigh:
//   x = x_H + l1 cos(t1) + l2 cos(t1+t2)
//   z = z_H - l1 sin(t1) - l2 sin(t1+t2)
Vec2 forward_kinematics_leg(const Vec2& hip, double theta1, double theta2,
                            double l1, double l2);

// Sole and toe from the ankle: sole = ankle + l6 (cos, -sin)(theta_sole),
// toe = sole + l7 (cos, -sin)(theta_toe). Positive angles lift the heel.
struct FootPoints {
  Vec2 sole, toe;
};
FootPoints foot_points(const Vec2& ankle, double theta_sole, double theta_toe,
                       double l6, double l7);

}  // namespace cyclogait
