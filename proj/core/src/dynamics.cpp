#include "cyclogait/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace cyclogait {

namespace {

struct UnitVectors {
  Vec9 wx, wz;  // d(u_j)/dq_j
  Vec9 ux, uz;
};

UnitVectors unit_vectors(const Vec9& q) {
  UnitVectors v;
  for (int j = 0; j < 9; ++j) {
    const double c = std::cos(q[j]);
    const double s = std::sin(q[j]);
    v.ux[j] = c;
    v.wx[j] = -s;
    if (j == kTorso) {
      v.uz[j] = s;
      v.wz[j] = c;
    } else {
      v.uz[j] = -s;
      v.wz[j] = -c;
    }
  }
  return v;
}

}  // namespace

// M = sum_i m_i J_i^T J_i + diag(I_i). The per-link Jacobian columns are
// c_ij w_j, so the mass sum factors into the constant Gram matrix of the
// coefficient columns times the joint direction derivatives.
Mat9 mass_matrix(const Vec9& q, const ChainKinematics& chain) {
  const UnitVectors v = unit_vectors(q);
  Mat9 M = chain.mass_gram().cwiseProduct(v.wx * v.wx.transpose() + v.wz * v.wz.transpose());
  M += chain.inertia_diag().asDiagonal();
  return M;
}

Mat9 coriolis_matrix(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain) {
  constexpr double h = 1e-6;
  std::array<Mat9, 9> dM;
  Vec9 qp = q;
  for (int l = 0; l < 9; ++l) {
    qp[l] = q[l] + h;
    const Mat9 Mp = mass_matrix(qp, chain);
    qp[l] = q[l] - h;
    const Mat9 Mm = mass_matrix(qp, chain);
    qp[l] = q[l];
    dM[l] = (Mp - Mm) / (2 * h);
  }
  Mat9 C;
  for (int k = 0; k < 9; ++k) {
    for (int j = 0; j < 9; ++j) {
      double s = 0;
      for (int i = 0; i < 9; ++i)
        s += (dM[i](k, j) + dM[j](k, i) - dM[k](i, j)) * qdot[i];
      C(k, j) = 0.5 * s;
    }
  }
  return C;
}

Vec9 coriolis_vector(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain) {
  return coriolis_matrix(q, qdot, chain) * qdot;
}

Vec9 gravity_vector(const Vec9& q, const ChainKinematics& chain) {
  const UnitVectors v = unit_vectors(q);
  return chain.model().gravity * chain.mass_coeff().cwiseProduct(v.wz);
}

DynamicsTerms dynamics_terms(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain) {
  DynamicsTerms t;
  t.mass = mass_matrix(q, chain);
  t.coriolis = coriolis_vector(q, qdot, chain);
  t.gravity = gravity_vector(q, chain);
  return t;
}

ContactResult contact_forces(const SimState& state, const ChainKinematics& chain,
                             const Vec2& stance_anchor, const ContactParams& params) {
  params.validate();
  ContactResult out;
  Eigen::Matrix<double, 6, 1> px, pz;
  chain.contact_points(state.q, stance_anchor, px, pz);
  const Mat12x9 J = chain.contact_jacobian(state.q);
  const Vec12 vel = J * state.qdot;
  for (int p = 0; p < kNumContacts; ++p) {
    const double pen = pz[p] - params.ground_height(px[p]);
    if (pen > 0) continue;
    const double fn = std::max(0.0, -params.k_s * pen - params.k_d * vel[2 * p + 1]);
    const double fx = -params.mu * fn * std::tanh(vel[2 * p] / params.smoothing_eps);
    out.forces[2 * p] = fx;
    out.forces[2 * p + 1] = fn;
  }
  out.generalized = J.transpose() * out.forces;
  return out;
}

ForwardDynamicsResult forward_dynamics(const SimState& state, const Vec9& tau,
                                       const ChainKinematics& chain,
                                       const Vec2& stance_anchor,
                                       const ContactParams& params) {
  ForwardDynamicsResult out;
  out.contact = contact_forces(state, chain, stance_anchor, params);
  const Mat9 M = mass_matrix(state.q, chain);
  const Vec9 C = coriolis_vector(state.q, state.qdot, chain);
  const Vec9 G = gravity_vector(state.q, chain);
  out.qddot = Eigen::LDLT<Mat9>(M).solve(tau + out.contact.generalized - C - G);
  return out;
}

SimState tqld_step(const SimState& state, const std::function<Vec9(const SimState&)>& tau_fn,
                   double dt, const ChainKinematics& chain, const Vec2& stance_anchor,
                   const ContactParams& params, double joint_damping) {
  if (!(dt > 0)) throw std::invalid_argument("tqld_step: dt must be > 0");
  params.validate();
  SimState s = state;
  const double h = dt / params.n_substeps;
  for (int sub = 0; sub < params.n_substeps; ++sub) {
    const Mat9 M = mass_matrix(s.q, chain);
    const Vec9 C = coriolis_vector(s.q, s.qdot, chain);
    const Vec9 G = gravity_vector(s.q, chain);

    Eigen::Matrix<double, 6, 1> px, pz;
    chain.contact_points(s.q, stance_anchor, px, pz);
    const Mat12x9 J = chain.contact_jacobian(s.q);
    const Vec12 vel = J * s.qdot;
    Vec12 F = Vec12::Zero();
    Mat9 damping = Mat9::Zero();
    if (joint_damping > 0) damping.diagonal().array() += joint_damping;
    for (int p = 0; p < kNumContacts; ++p) {
      const double pen = pz[p] - params.ground_height(px[p]);
      if (pen > 0) continue;
      const double fn = std::max(0.0, -params.k_s * pen - params.k_d * vel[2 * p + 1]);
      F[2 * p + 1] = fn;
      F[2 * p] = -params.mu * fn * std::tanh(vel[2 * p] / params.smoothing_eps);
      if (fn > 0) {
        // implicit handling of the contact damper along the normal
        const auto Jz = J.row(2 * p + 1);
        damping.noalias() += params.k_d * (Jz.transpose() * Jz);
      }
    }
    const Vec9 B = J.transpose() * F;
    const Vec9 tau = tau_fn(s);

    const Mat9 lhs = M + h * damping;
    Eigen::LDLT<Mat9> ldlt(lhs);
    const Vec9 qddot = ldlt.solve(tau + B - C - G);
    if (!qddot.allFinite() || ldlt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Mat9> eig(M);
      std::ostringstream msg;
      msg << "tqld_step: mass matrix solve failed (eigenvalue range ["
          << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "])";
      throw std::runtime_error(msg.str());
    }
    const Vec9 qdot_next = s.qdot + qddot * h;
    s.q += s.qdot * h + 0.5 * qddot * h * h;
    s.qdot = qdot_next;
    s.qddot = qddot;
    s.t += h;
    if (s.qdot.cwiseAbs().maxCoeff() > kVelocityBlowupLimit) {
      std::ostringstream msg;
      msg << "tqld_step: velocity blow-up guard tripped at t=" << s.t
          << " (|qdot|_inf = " << s.qdot.cwiseAbs().maxCoeff() << ")";
      throw std::runtime_error(msg.str());
    }
  }
  return s;
}

SimState tqld_step(const SimState& state, const Vec9& tau, double dt,
                   const ChainKinematics& chain, const Vec2& stance_anchor,
                   const ContactParams& params) {
  return tqld_step(
      state, [&tau](const SimState&) { return tau; }, dt, chain, stance_anchor, params, 0.0);
}

double kinetic_energy(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain) {
  return 0.5 * qdot.dot(mass_matrix(q, chain) * qdot);
}

double potential_energy(const Vec9& q, const ChainKinematics& chain, const Vec2& stance_anchor) {
  JointState s;
  s.q = q;
  const LinkComStates links = chain.link_com_states(s, Vec9::Zero(), stance_anchor);
  double P = 0;
  for (int i = 0; i < 9; ++i) P += chain.model().masses[i] * chain.model().gravity * links.z[i];
  return P;
}

Vec2 pivot_reaction(const SimState& state, const ChainKinematics& chain,
                    const Vec2& stance_anchor, const ContactResult& contact) {
  JointState js;
  js.q = state.q;
  js.qdot = state.qdot;
  const LinkComStates links = chain.link_com_states(js, state.qddot, stance_anchor);
  const double g = chain.model().gravity;
  Vec2 R{0, 0};
  for (int i = 0; i < 9; ++i) {
    const double m = chain.model().masses[i];
    R.x() += m * links.xddot[i];
    R.y() += m * (links.zddot[i] + g);
  }
  for (int p = 0; p < kNumContacts; ++p) {
    R.x() -= contact.forces[2 * p];
    R.y() -= contact.forces[2 * p + 1];
  }
  return R;
}

}  // namespace cyclogait
