#include "cyclogait/robot_model.hpp"

#include <cmath>

namespace cyclogait {

namespace {

inline void unit_vectors(const Vec9& q, Vec9& ux, Vec9& uz, Vec9& wx, Vec9& wz) {
  for (int j = 0; j < 9; ++j) {
    const double c = std::cos(q[j]);
    const double s = std::sin(q[j]);
    ux[j] = c;
    wx[j] = -s;
    if (j == kTorso) {
      uz[j] = s;
      wz[j] = c;
    } else {
      uz[j] = -s;
      wz[j] = -c;
    }
  }
}

}  // namespace

ChainKinematics::ChainKinematics(const RobotModel& model) : model_(model) {
  model_.validate();
  const auto& l = model_.lengths;
  com_.setZero();
  pts_.setZero();

  // Hip sits at anchor - l4 u4 - l3 u3 (chain rooted at the stance ankle).
  auto via_hip_com = [&](int i) {
    com_(i, kStanceThigh) -= l[2];
    com_(i, kStanceShank) -= l[3];
  };
  auto via_hip_pt = [&](int p) {
    pts_(p, kStanceThigh) -= l[2];
    pts_(p, kStanceShank) -= l[3];
  };

  // Link COMs (midpoint of each segment).
  via_hip_com(0);
  com_(0, kSwingThigh) = l[0] / 2;
  via_hip_com(1);
  com_(1, kSwingThigh) = l[0];
  com_(1, kSwingShank) = l[1] / 2;
  via_hip_com(2);
  com_(2, kStanceThigh) += l[2] / 2;
  com_(3, kStanceShank) = -l[3] / 2;
  via_hip_com(4);
  com_(4, kTorso) = l[4] / 2;
  via_hip_com(5);
  com_(5, kSwingThigh) = l[0];
  com_(5, kSwingShank) = l[1];
  com_(5, kSwingSole) = l[5] / 2;
  via_hip_com(6);
  com_(6, kSwingThigh) = l[0];
  com_(6, kSwingShank) = l[1];
  com_(6, kSwingSole) = l[5];
  com_(6, kSwingToe) = l[6] / 2;
  com_(7, kStanceSole) = l[7] / 2;
  com_(8, kStanceSole) = l[7];
  com_(8, kStanceToe) = l[8] / 2;

  // Contact points.
  via_hip_pt(kContactSwingToe);
  pts_(kContactSwingToe, kSwingThigh) = l[0];
  pts_(kContactSwingToe, kSwingShank) = l[1];
  pts_(kContactSwingToe, kSwingSole) = l[5];
  pts_(kContactSwingToe, kSwingToe) = l[6];
  via_hip_pt(kContactSwingSole);
  pts_(kContactSwingSole, kSwingThigh) = l[0];
  pts_(kContactSwingSole, kSwingShank) = l[1];
  pts_(kContactSwingSole, kSwingSole) = l[5];
  via_hip_pt(kContactSwingAnkle);
  pts_(kContactSwingAnkle, kSwingThigh) = l[0];
  pts_(kContactSwingAnkle, kSwingShank) = l[1];
  pts_(kContactStanceToe, kStanceSole) = l[7];
  pts_(kContactStanceToe, kStanceToe) = l[8];
  pts_(kContactStanceSole, kStanceSole) = l[7];
  // stance ankle row stays zero: it is the anchor itself

  Vec9 m;
  for (int i = 0; i < 9; ++i) {
    m[i] = model_.masses[i];
    inertia_diag_[i] = model_.inertias[i];
  }
  gram_ = com_.transpose() * m.asDiagonal() * com_;
  mass_coeff_ = com_.transpose() * m;
}

LinkComStates ChainKinematics::link_com_states(const JointState& s, const Vec9& qddot,
                                               const Vec2& stance_anchor) const {
  Vec9 ux, uz, wx, wz;
  unit_vectors(s.q, ux, uz, wx, wz);
  LinkComStates out;
  // com = anchor + C u;  d(u)/dt = qdot w;  d(w)/dt = -qdot u
  const Vec9 qd2 = s.qdot.cwiseProduct(s.qdot);
  out.x = Vec9::Constant(stance_anchor.x()) + com_ * ux;
  out.z = Vec9::Constant(stance_anchor.y()) + com_ * uz;
  out.xdot = com_ * (s.qdot.cwiseProduct(wx));
  out.zdot = com_ * (s.qdot.cwiseProduct(wz));
  out.xddot = com_ * (qddot.cwiseProduct(wx) - qd2.cwiseProduct(ux));
  out.zddot = com_ * (qddot.cwiseProduct(wz) - qd2.cwiseProduct(uz));
  return out;
}

void ChainKinematics::contact_points(const Vec9& q, const Vec2& stance_anchor,
                                     Eigen::Matrix<double, 6, 1>& x,
                                     Eigen::Matrix<double, 6, 1>& z) const {
  Vec9 ux, uz, wx, wz;
  unit_vectors(q, ux, uz, wx, wz);
  x = Eigen::Matrix<double, 6, 1>::Constant(stance_anchor.x()) + pts_ * ux;
  z = Eigen::Matrix<double, 6, 1>::Constant(stance_anchor.y()) + pts_ * uz;
}

Mat12x9 ChainKinematics::contact_jacobian(const Vec9& q) const {
  Vec9 ux, uz, wx, wz;
  unit_vectors(q, ux, uz, wx, wz);
  Mat12x9 J;
  for (int p = 0; p < kNumContacts; ++p) {
    for (int j = 0; j < 9; ++j) {
      J(2 * p, j) = pts_(p, j) * wx[j];
      J(2 * p + 1, j) = pts_(p, j) * wz[j];
    }
  }
  return J;
}

Mat29 ChainKinematics::com_jacobian(int link, const Vec9& q) const {
  Vec9 ux, uz, wx, wz;
  unit_vectors(q, ux, uz, wx, wz);
  Mat29 J;
  for (int j = 0; j < 9; ++j) {
    J(0, j) = com_(link, j) * wx[j];
    J(1, j) = com_(link, j) * wz[j];
  }
  return J;
}

Vec2 ChainKinematics::hip_position(const Vec9& q, const Vec2& stance_anchor) const {
  const auto& l = model_.lengths;
  const Vec2 u3{std::cos(q[kStanceThigh]), -std::sin(q[kStanceThigh])};
  const Vec2 u4{std::cos(q[kStanceShank]), -std::sin(q[kStanceShank])};
  return stance_anchor - l[3] * u4 - l[2] * u3;
}

Vec2 forward_kinematics_leg(const Vec2& hip, double theta1, double theta2,
                            double l1, double l2) {
  const double t12 = theta1 + theta2;
  return {hip.x() + l1 * std::cos(theta1) + l2 * std::cos(t12),
          hip.y() - l1 * std::sin(theta1) - l2 * std::sin(t12)};
}

FootPoints foot_points(const Vec2& ankle, double theta_sole, double theta_toe,
                       double l6, double l7) {
  FootPoints fp;
  fp.sole = ankle + l6 * Vec2{std::cos(theta_sole), -std::sin(theta_sole)};
  fp.toe = fp.sole + l7 * Vec2{std::cos(theta_toe), -std::sin(theta_toe)};
  return fp;
}

}  // namespace cyclogait
