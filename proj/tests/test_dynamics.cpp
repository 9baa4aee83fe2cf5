#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cyclogait/dynamics.hpp"
#include "test_helpers.hpp"

using namespace cyclogait;
using cyclogait::testing::random_state;

namespace {

const Vec2 kAnchor{0.3, 0.2};

ContactParams no_ground() {
  ContactParams p;
  p.ground_enabled = false;
  return p;
}

// Kinetic energy evaluated from the link COM states only; independent of the
// mass-matrix assembly path.
double kinetic_from_links(const ChainKinematics& chain, const JointState& s) {
  const LinkComStates links = chain.link_com_states(s, Vec9::Zero(), kAnchor);
  double K = 0;
  for (int i = 0; i < 9; ++i) {
    const double v2 = links.xdot[i] * links.xdot[i] + links.zdot[i] * links.zdot[i];
    K += 0.5 * chain.model().masses[i] * v2 +
         0.5 * chain.model().inertias[i] * s.qdot[i] * s.qdot[i];
  }
  return K;
}

double potential_from_links(const ChainKinematics& chain, const Vec9& q) {
  JointState s;
  s.q = q;
  const LinkComStates links = chain.link_com_states(s, Vec9::Zero(), kAnchor);
  double P = 0;
  for (int i = 0; i < 9; ++i)
    P += chain.model().masses[i] * chain.model().gravity * links.z[i];
  return P;
}

}  // namespace

TEST_CASE("mass matrix structure") {
  const RobotModel model;
  const ChainKinematics chain(model);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const JointState s = random_state(rng);
    const Mat9 M = mass_matrix(s.q, chain);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat9> eig(M);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("mass matrix equals the kinetic-energy quadratic form") {
  const RobotModel model;
  const ChainKinematics chain(model);
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const JointState s = random_state(rng);
    const double K_links = kinetic_from_links(chain, s);
    const double K_matrix = 0.5 * s.qdot.dot(mass_matrix(s.q, chain) * s.qdot);
    CHECK(K_matrix == doctest::Approx(K_links).epsilon(1e-10));
  }
}

TEST_CASE("mass matrix agrees with the Hessian of kinetic energy") {
  const RobotModel model;
  const ChainKinematics chain(model);
  std::mt19937_64 rng(23);
  const JointState s = random_state(rng);
  const double h = 1e-5;
  const Mat9 M = mass_matrix(s.q, chain);
  for (int i = 0; i < 9; ++i) {
    for (int j = i; j < 9; ++j) {
      // second difference of K in qdot around zero velocity
      JointState a = s;
      a.qdot.setZero();
      auto K = [&](double vi, double vj) {
        JointState st = a;
        st.qdot[i] += vi;
        st.qdot[j] += vj;
        return kinetic_from_links(chain, st);
      };
      const double hess =
          (K(h, h) - K(h, -h) - K(-h, h) + K(-h, -h)) / (4 * h * h);
      CHECK(hess == doctest::Approx(M(i, j)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("total mass is the Table total") {
  const RobotModel model;
  CHECK(model.total_mass() == doctest::Approx(51.7));
}

TEST_CASE("coriolis properties") {
  const RobotModel model;
  const ChainKinematics chain(model);
  std::mt19937_64 rng(24);

  SUBCASE("zero velocity gives exactly zero") {
    JointState s = random_state(rng, 1.5, 0.0);
    const Vec9 C = coriolis_vector(s.q, s.qdot, chain);
    CHECK(C.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("quadratic homogeneity in velocity") {
    for (int trial = 0; trial < 100; ++trial) {
      const JointState s = random_state(rng);
      const Vec9 c1 = coriolis_vector(s.q, s.qdot, chain);
      const Vec9 c2 = coriolis_vector(s.q, 2 * s.qdot, chain);
      CHECK((c2 - 4 * c1).cwiseAbs().maxCoeff() <=
            1e-8 * std::max(1.0, c1.cwiseAbs().maxCoeff()) * 4);
    }
  }

  SUBCASE("Mdot - 2C is skew symmetric along the flow") {
    std::uniform_real_distribution<double> uv(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
      const JointState s = random_state(rng);
      Vec9 v;
      for (int i = 0; i < 9; ++i) v[i] = uv(rng);
      const double h = 1e-6;
      const Mat9 Mp = mass_matrix(s.q + h * s.qdot, chain);
      const Mat9 Mm = mass_matrix(s.q - h * s.qdot, chain);
      const Mat9 Mdot = (Mp - Mm) / (2 * h);
      const Mat9 Cm = coriolis_matrix(s.q, s.qdot, chain);
      const double residual = v.dot((Mdot - 2 * Cm) * v);
      CHECK(std::abs(residual) <= 1e-6);
    }
  }
}

TEST_CASE("gravity vector") {
  const RobotModel model;
  const ChainKinematics chain(model);
  std::mt19937_64 rng(25);

  SUBCASE("vanishes where every COM height is stationary") {
    JointState s;
    s.q = Vec9::Constant(M_PI / 2);  // legs/feet vertical, torso upright
    const Vec9 G = gravity_vector(s.q, chain);
    CHECK(G.cwiseAbs().maxCoeff() <= 1e-9);
  }

  SUBCASE("matches the finite difference of the potential") {
    for (int trial = 0; trial < 100; ++trial) {
      const JointState s = random_state(rng);
      const Vec9 G = gravity_vector(s.q, chain);
      const double h = 1e-6;
      for (int j = 0; j < 9; ++j) {
        Vec9 qp = s.q, qm = s.q;
        qp[j] += h;
        qm[j] -= h;
        const double fd =
            (potential_from_links(chain, qp) - potential_from_links(chain, qm)) / (2 * h);
        CHECK(G[j] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
      }
    }
  }

  SUBCASE("linear in g") {
    const JointState s = random_state(rng);
    RobotModel doubled = model;
    doubled.gravity *= 2;
    const ChainKinematics chain2(doubled);
    const Vec9 g1 = gravity_vector(s.q, chain);
    const Vec9 g2 = gravity_vector(s.q, chain2);
    CHECK((g2 - 2 * g1).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("contact forces") {
  const RobotModel model;
  const ChainKinematics chain(model);

  SUBCASE("all points above ground give zero") {
    SimState s;
    s.q = Vec9::Constant(M_PI / 2);
    ContactParams p;
    p.ground = StairSpec{};
    const Vec2 anchor{0, 2.0};  // whole chain airborne
    const ContactResult r = contact_forces(s, chain, anchor, p);
    CHECK(r.forces.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.generalized.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("unit penetration produces the spring force") {
    // stance toe flat on the ground, anchor pushed 1 mm below the surface so
    // stance-foot points penetrate by exactly 1 mm at rest
    SimState s;
    s.q.setZero();
    s.q[kSwingThigh] = s.q[kSwingShank] = M_PI / 2;
    s.q[kStanceThigh] = s.q[kStanceShank] = -M_PI / 2;
    ContactParams p;
    p.ground.rise = 1.0;
    p.ground.run = 100.0;  // flat plane at z = 0 around the origin
    p.ground.n_steps = 1;
    const Vec2 anchor{1.0, -0.001};
    const ContactResult r = contact_forces(s, chain, anchor, p);
    // stance sole and toe sit at the anchor height
    CHECK(r.forces[2 * kContactStanceSole + 1] == doctest::Approx(100.0));
    CHECK(r.forces[2 * kContactStanceToe + 1] == doctest::Approx(100.0));
    // no tangential motion -> no friction
    CHECK(r.forces[2 * kContactStanceSole] == doctest::Approx(0.0));
  }

  SUBCASE("normal force never pulls") {
    std::mt19937_64 rng(26);
    ContactParams p;
    p.ground.run = 0.5588;
    p.ground.rise = 0.3576;
    for (int trial = 0; trial < 200; ++trial) {
      const JointState js = random_state(rng, 1.5, 3.0);
      SimState s;
      s.q = js.q;
      s.qdot = js.qdot;
      const ContactResult r = contact_forces(s, chain, Vec2{0.1, 0.05}, p);
      for (int pt = 0; pt < kNumContacts; ++pt) CHECK(r.forces[2 * pt + 1] >= 0.0);
    }
  }
}

TEST_CASE("tqld step") {
  const RobotModel model;
  const ChainKinematics chain(model);

  SUBCASE("gravity compensation holds a static pose") {
    SimState s;
    s.q = Vec9::Constant(M_PI / 2) + 0.2 * Vec9::Ones() * 0.3;
    s.q[kTorso] = 1.1;
    const Vec9 tau = gravity_vector(s.q, chain);
    ContactParams p = no_ground();
    p.n_substeps = 10;
    const SimState next = tqld_step(s, tau, 0.01, chain, kAnchor, p);
    CHECK((next.q - s.q).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(next.qdot.cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("free swing conserves energy") {
    SimState s;
    s.q[kStanceThigh] = -M_PI / 2 + 0.25;
    s.q[kStanceShank] = -M_PI / 2 + 0.1;
    s.q[kSwingThigh] = M_PI / 2 - 0.2;
    s.q[kSwingShank] = M_PI / 2 - 0.05;
    s.q[kTorso] = -M_PI / 2 + 0.15;  // hang the torso below the pivot
    s.q[kSwingSole] = 0.1;
    s.q[kSwingToe] = 0.1;
    s.q[kStanceSole] = -0.1;
    s.q[kStanceToe] = -0.1;
    ContactParams p = no_ground();
    p.n_substeps = 100;  // substep 1e-4 under the 0.01 grid
    const double E0 = kinetic_energy(s.q, s.qdot, chain) + potential_energy(s.q, chain, kAnchor);
    const Vec9 zero = Vec9::Zero();
    for (int k = 0; k < 100; ++k) s = tqld_step(s, zero, 0.01, chain, kAnchor, p);
    const double E1 = kinetic_energy(s.q, s.qdot, chain) + potential_energy(s.q, chain, kAnchor);
    CHECK(std::abs(E1 - E0) / std::max(std::abs(E0), 1.0) <= 1e-3);
  }

  SUBCASE("single-link pendulum reduction matches an RK4 reference") {
    RobotModel light = model;
    for (int i = 0; i < 9; ++i) {
      if (i == kStanceShank) continue;
      light.masses[i] = 1e-9;
      light.inertias[i] = light.masses[i] * light.lengths[i] * light.lengths[i] / 12.0;
    }
    const ChainKinematics chain_l(light);
    SimState s;
    s.q = Vec9::Constant(M_PI / 2);
    s.q[kStanceThigh] = -M_PI / 2;
    s.q[kStanceShank] = -M_PI / 2 + 0.3;  // release 0.3 rad off the hanging pose
    s.q[kTorso] = -M_PI / 2;

    // independent reference: physical pendulum about the anchor,
    // (m l^2 / 3) qdd = -m g (l/2) cos(q), integrated with fixed-step RK4
    const double m = light.masses[kStanceShank], l = light.lengths[kStanceShank];
    const double g = light.gravity;
    const double inertia = m * l * l / 3.0;
    auto acc = [&](double q) { return -m * g * (l / 2) * std::cos(q) / inertia; };
    double qr = s.q[kStanceShank], vr = 0.0;
    const double hr = 1e-5;
    for (int k = 0; k < 100000; ++k) {
      const double k1q = vr, k1v = acc(qr);
      const double k2q = vr + 0.5 * hr * k1v, k2v = acc(qr + 0.5 * hr * k1q);
      const double k3q = vr + 0.5 * hr * k2v, k3v = acc(qr + 0.5 * hr * k2q);
      const double k4q = vr + hr * k3v, k4v = acc(qr + hr * k3q);
      qr += hr / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
      vr += hr / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }

    ContactParams p = no_ground();
    p.n_substeps = 100;  // internal step 1e-4
    const Vec9 zero = Vec9::Zero();
    for (int k = 0; k < 100; ++k) s = tqld_step(s, zero, 0.01, chain_l, kAnchor, p);
    CHECK(std::abs(s.q[kStanceShank] - qr) <= 1e-3);
  }

  SUBCASE("deterministic across repeated calls") {
    std::mt19937_64 rng(27);
    const JointState js = random_state(rng, 0.8, 0.5);
    SimState s;
    s.q = js.q;
    s.qdot = js.qdot;
    ContactParams p;
    p.ground.run = 0.5;
    p.ground.rise = 0.3;
    const Vec2 anchor_high{0.3, 1.55};  // chain dangles just above the steps
    const Vec9 ones = Vec9::Ones();
    const SimState a = tqld_step(s, ones, 0.01, chain, anchor_high, p);
    const SimState b = tqld_step(s, ones, 0.01, chain, anchor_high, p);
    CHECK(a.q == b.q);
    CHECK(a.qdot == b.qdot);
  }

  SUBCASE("velocity guard trips on absurd torque") {
    SimState s;
    s.q = Vec9::Constant(M_PI / 2);
    ContactParams p = no_ground();
    const Vec9 big = Vec9::Constant(1e9);
    CHECK_THROWS_AS(tqld_step(s, big, 0.01, chain, kAnchor, p),
                    std::runtime_error);
  }
}

TEST_CASE("work-energy consistency under torque") {
  const RobotModel model;
  const ChainKinematics chain(model);
  SimState s;
  s.q = Vec9::Constant(M_PI / 2);
  s.q[kStanceThigh] = -M_PI / 2;
  s.q[kStanceShank] = -M_PI / 2;
  s.q[kTorso] = -M_PI / 2;
  ContactParams p = no_ground();
  p.n_substeps = 100;
  Vec9 tau = Vec9::Zero();
  for (int i = 0; i <= kTorso; ++i) tau[i] = 0.1 * std::sin(0.9 * i + 1.0);
  const double E0 = kinetic_energy(s.q, s.qdot, chain) + potential_energy(s.q, chain, kAnchor);
  double work = 0;
  for (int k = 0; k < 100; ++k) {
    const Vec9 qd_before = s.qdot;
    s = tqld_step(s, tau, 0.01, chain, kAnchor, p);
    work += tau.dot(0.5 * (qd_before + s.qdot)) * 0.01;  // trapezoidal
  }
  const double E1 = kinetic_energy(s.q, s.qdot, chain) + potential_energy(s.q, chain, kAnchor);
  CHECK(std::abs((E1 - E0) - work) / std::max(std::abs(E0), 1.0) <= 1e-3);
}
