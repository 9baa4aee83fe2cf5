#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cyclogait/robot_model.hpp"
#include "test_helpers.hpp"

using namespace cyclogait;
using cyclogait::testing::random_state;
using cyclogait::testing::two_link_ik;

TEST_CASE("leg forward kinematics matches the printed form") {
  const Vec2 hip{0, 0.8};
  SUBCASE("straight leg pointing down") {
    const Vec2 a = forward_kinematics_leg(hip, M_PI / 2, 0.0, 0.4, 0.4);
    CHECK(a.x() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.y() == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("horizontal leg") {
    const Vec2 a = forward_kinematics_leg(hip, 0.0, 0.0, 0.4, 0.4);
    CHECK(a.x() == doctest::Approx(0.8));
    CHECK(a.y() == doctest::Approx(0.8));
  }
  SUBCASE("general pose agrees with a rotation-matrix oracle") {
    const Vec2 hip2{0, 0.78};
    const double t1 = 1.2, t2 = 0.3;
    // homogeneous-transform composition, z flipped to the sagittal convention
    Eigen::Rotation2D<double> r1(-t1), r12(-(t1 + t2));
    const Vec2 oracle = hip2 + r1 * Vec2{0.4, 0} + r12 * Vec2{0.4, 0};
    const Vec2 got = forward_kinematics_leg(hip2, t1, t2, 0.4, 0.4);
    CHECK((got - oracle).norm() <= 1e-12);
  }
}

TEST_CASE("FK round-trip through the analytic IK") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ur(0.25, 0.75);
  std::uniform_real_distribution<double> ua(0.3, M_PI - 0.3);
  const Vec2 hip{0.1, 0.9};
  for (int i = 0; i < 200; ++i) {
    const double rho = ur(rng), ang = ua(rng);
    const Vec2 target = hip + Vec2{rho * std::cos(ang), -rho * std::sin(ang)};
    const auto [t1, t2] = two_link_ik(hip, target, 0.4, 0.4);
    const Vec2 back = forward_kinematics_leg(hip, t1, t2, 0.4, 0.4);
    CHECK((back - target).norm() <= 1e-10);
  }
}

TEST_CASE("foot points") {
  SUBCASE("flat foot matches the resting geometry") {
    const FootPoints fp = foot_points({0, 0}, 0, 0, 0.12, 0.05);
    CHECK(fp.sole.x() == doctest::Approx(0.12));
    CHECK(fp.sole.y() == doctest::Approx(0.0));
    CHECK(fp.toe.x() == doctest::Approx(0.17));
    CHECK(fp.toe.y() == doctest::Approx(0.0));
  }
  SUBCASE("quarter turn drops the sole below the ankle") {
    const FootPoints fp = foot_points({0, 0}, M_PI / 2, M_PI / 2, 0.12, 0.05);
    CHECK(fp.sole.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fp.sole.y() == doctest::Approx(-0.12));
    CHECK(fp.toe.y() == doctest::Approx(-0.17));
  }
  SUBCASE("rotation oracle") {
    const Vec2 ankle{0.1, 0.05};
    const double th = M_PI / 6;
    const FootPoints fp = foot_points(ankle, th, th, 0.12, 0.05);
    const Vec2 dir{std::cos(-th), std::sin(-th)};
    CHECK((fp.sole - (ankle + 0.12 * dir)).norm() <= 1e-12);
    CHECK((fp.toe - (ankle + 0.17 * dir)).norm() <= 1e-12);
  }
}

TEST_CASE("link COM states") {
  const RobotModel model;
  const ChainKinematics chain(model);
  const Vec2 anchor{0.5, 0.3};

  SUBCASE("static chain has zero COM rates") {
    std::mt19937_64 rng(7);
    JointState s = random_state(rng, 1.5, 0.0);
    const LinkComStates links = chain.link_com_states(s, Vec9::Zero(), anchor);
    for (int i = 0; i < 9; ++i) {
      CHECK(links.xdot[i] == 0.0);
      CHECK(links.zdot[i] == 0.0);
      CHECK(links.xddot[i] == 0.0);
      CHECK(links.zddot[i] == 0.0);
    }
  }

  SUBCASE("velocities agree with finite differences of positions") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const JointState s = random_state(rng);
      const double h = 1e-6;
      JointState sp = s, sm = s;
      sp.q += s.qdot * h;
      sm.q -= s.qdot * h;
      const auto base = chain.link_com_states(s, Vec9::Zero(), anchor);
      const auto plus = chain.link_com_states(sp, Vec9::Zero(), anchor);
      const auto minus = chain.link_com_states(sm, Vec9::Zero(), anchor);
      for (int i = 0; i < 9; ++i) {
        CHECK(base.xdot[i] == doctest::Approx((plus.x[i] - minus.x[i]) / (2 * h)).epsilon(1e-6));
        CHECK(base.zdot[i] == doctest::Approx((plus.z[i] - minus.z[i]) / (2 * h)).epsilon(1e-6));
      }
    }
  }

  SUBCASE("accelerations agree with finite differences of velocities") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      JointState s = random_state(rng);
      Vec9 qddot;
      for (int i = 0; i < 9; ++i) qddot[i] = std::sin(0.7 * i + trial);
      const double h = 1e-6;
      JointState sp = s, sm = s;
      sp.q += s.qdot * h + 0.5 * qddot * h * h;
      sp.qdot += qddot * h;
      sm.q -= s.qdot * h - 0.5 * qddot * h * h;
      sm.qdot -= qddot * h;
      const auto base = chain.link_com_states(s, qddot, anchor);
      const auto plus = chain.link_com_states(sp, Vec9::Zero(), anchor);
      const auto minus = chain.link_com_states(sm, Vec9::Zero(), anchor);
      for (int i = 0; i < 9; ++i) {
        const double ax_fd = (plus.xdot[i] - minus.xdot[i]) / (2 * h);
        const double az_fd = (plus.zdot[i] - minus.zdot[i]) / (2 * h);
        CHECK(base.xddot[i] == doctest::Approx(ax_fd).epsilon(1e-4).scale(1.0));
        CHECK(base.zddot[i] == doctest::Approx(az_fd).epsilon(1e-4).scale(1.0));
      }
    }
  }

  SUBCASE("COM sits midway between the joints of the swing shank") {
    JointState s;
    s.q.setZero();
    s.q[kStanceThigh] = M_PI / 2;  // stance leg points down from the hip
    s.q[kStanceShank] = M_PI / 2;
    s.q[kSwingThigh] = M_PI / 2;  // swing leg straight down
    s.q[kSwingShank] = M_PI / 2;
    const auto links = chain.link_com_states(s, Vec9::Zero(), anchor);
    const Vec2 hip = chain.hip_position(s.q, anchor);
    CHECK(hip.x() == doctest::Approx(anchor.x()));
    CHECK(hip.y() == doctest::Approx(anchor.y() + 0.8));
    // swing shank spans hip+(0,-0.4) to hip+(0,-0.8)
    CHECK(links.x[kSwingShank] == doctest::Approx(hip.x()));
    CHECK(links.z[kSwingShank] == doctest::Approx(hip.y() - 0.6));
  }
}

TEST_CASE("contact jacobian") {
  const RobotModel model;
  const ChainKinematics chain(model);
  const Vec2 anchor{0.2, 0.1};

  SUBCASE("zero rates map to zero point velocities") {
    std::mt19937_64 rng(10);
    JointState s = random_state(rng, 1.0, 0.0);
    const Vec12 v = chain.contact_jacobian(s.q) * s.qdot;
    CHECK(v.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("J qdot matches finite-difference point velocities") {
    std::mt19937_64 rng(11);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const JointState s = random_state(rng);
      const double h = 1e-6;
      Eigen::Matrix<double, 6, 1> xp, zp, xm, zm;
      chain.contact_points(s.q + s.qdot * h, anchor, xp, zp);
      chain.contact_points(s.q - s.qdot * h, anchor, xm, zm);
      const Vec12 v = chain.contact_jacobian(s.q) * s.qdot;
      for (int p = 0; p < kNumContacts; ++p) {
        worst = std::max(worst, std::abs(v[2 * p] - (xp[p] - xm[p]) / (2 * h)));
        worst = std::max(worst, std::abs(v[2 * p + 1] - (zp[p] - zm[p]) / (2 * h)));
      }
    }
    CHECK(worst <= 1e-6);
  }

  SUBCASE("columns off the kinematic path are zero") {
    std::mt19937_64 rng(12);
    const JointState s = random_state(rng);
    const Mat12x9 J = chain.contact_jacobian(s.q);
    // stance ankle is the anchor: whole row pair zero
    CHECK(J.row(2 * kContactStanceAnkle).cwiseAbs().maxCoeff() == 0.0);
    CHECK(J.row(2 * kContactStanceAnkle + 1).cwiseAbs().maxCoeff() == 0.0);
    // stance foot points do not depend on leg or torso joints
    for (int j : {kSwingThigh, kSwingShank, kStanceThigh, kStanceShank, kTorso,
                  kSwingSole, kSwingToe}) {
      CHECK(J(2 * kContactStanceToe, j) == 0.0);
      CHECK(J(2 * kContactStanceSole + 1, j) == 0.0);
    }
    // swing toe depends on everything except torso and stance foot
    CHECK(J(2 * kContactSwingToe, kTorso) == 0.0);
    CHECK(J(2 * kContactSwingToe, kStanceSole) == 0.0);
    CHECK(J(2 * kContactSwingToe, kStanceToe) == 0.0);
    CHECK(J.row(2 * kContactSwingToe).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("chain mirror symmetry") {
  // Swapping swing/stance blocks and mirroring x about the anchor mirrors the
  // COM positions of the corresponding links.
  const RobotModel model;
  const ChainKinematics chain(model);
  const Vec2 anchor{0, 0};
  std::mt19937_64 rng(13);
  const JointState s = random_state(rng, 1.2, 0.0);
  JointState m;
  auto mirror = [](double q) { return M_PI - q; };
  m.q[kSwingThigh] = mirror(s.q[kStanceThigh]);
  m.q[kSwingShank] = mirror(s.q[kStanceShank]);
  m.q[kStanceThigh] = mirror(s.q[kSwingThigh]);
  m.q[kStanceShank] = mirror(s.q[kSwingShank]);
  m.q[kTorso] = M_PI - s.q[kTorso];
  m.q[kSwingSole] = mirror(s.q[kStanceSole]);
  m.q[kSwingToe] = mirror(s.q[kStanceToe]);
  m.q[kStanceSole] = mirror(s.q[kSwingSole]);
  m.q[kStanceToe] = mirror(s.q[kSwingToe]);

  // the mirrored chain is anchored at the mirror image of the swing ankle
  const auto a = chain.link_com_states(s, Vec9::Zero(), anchor);
  Eigen::Matrix<double, 6, 1> px, pz;
  chain.contact_points(s.q, anchor, px, pz);
  const Vec2 anchor_b{-px[kContactSwingAnkle], pz[kContactSwingAnkle]};
  const auto b = chain.link_com_states(m, Vec9::Zero(), anchor_b);
  const Vec2 hip_a = chain.hip_position(s.q, anchor);
  const Vec2 hip_b = chain.hip_position(m.q, anchor_b);
  CHECK(hip_b.x() == doctest::Approx(-hip_a.x()).epsilon(1e-12).scale(1.0));
  CHECK(hip_b.y() == doctest::Approx(hip_a.y()));
  // each link lands on the mirror image of its role-swapped partner
  const int pairs[9] = {2, 3, 0, 1, 4, 7, 8, 5, 6};
  for (int i = 0; i < 9; ++i) {
    CHECK(b.x[pairs[i]] == doctest::Approx(-a.x[i]).epsilon(1e-9).scale(1.0));
    CHECK(b.z[pairs[i]] == doctest::Approx(a.z[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("model validation rejects bad geometry") {
  RobotModel m;
  m.lengths[0] = -0.1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  RobotModel m2;
  m2.lengths[0] = 0.41;  // breaks symmetry with l3
  CHECK_THROWS_AS(m2.validate(), std::invalid_argument);
  const RobotModel def;
  CHECK(def.total_mass() == doctest::Approx(51.7));
}
