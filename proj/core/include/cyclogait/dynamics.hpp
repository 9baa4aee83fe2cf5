#pragma once

#include <functional>

#include "cyclogait/gait_planner.hpp"
#include "cyclogait/robot_model.hpp"

namespace cyclogait {

struct DynamicsTerms {
  Mat9 mass;        // M(q), symmetric positive definite
  Vec9 coriolis;    // C(q, qdot), quadratic in qdot
  Vec9 gravity;     // G(q) = dP/dq
};

struct ContactParams {
  double k_s = 1e5;          // spring [N/m]
  double k_d = 1e3;          // damper [N s/m]
  double mu = 0.8;           // friction coefficient
  double smoothing_eps = 1e-3;  // tangential velocity scale for tanh smoothing
  double active_threshold = 0.1;  // [N] normal force making a point "active"
  StairSpec ground;
  bool ground_enabled = true;
  int n_substeps = 10;

  void validate() const {
    if (!(k_s > 0) || k_d < 0 || mu < 0 || !(smoothing_eps > 0))
      throw std::invalid_argument("ContactParams: need k_s > 0, k_d >= 0, mu >= 0, eps > 0");
    if (n_substeps < 1) throw std::invalid_argument("ContactParams: n_substeps must be >= 1");
  }
  double ground_height(double x) const {
    return ground_enabled ? ground.height_at(x) : -1e9;
  }
};

struct SimState {
  Vec9 q = Vec9::Zero();
  Vec9 qdot = Vec9::Zero();
  Vec9 qddot = Vec9::Zero();  // acceleration of the last step taken
  double t = 0;
};

inline constexpr double kVelocityBlowupLimit = 100.0;  // [rad/s]

Mat9 mass_matrix(const Vec9& q, const ChainKinematics& chain);

// Christoffel-form Coriolis matrix from central finite differences of M
// (step 1e-6); coriolis_vector is its product with qdot.
Mat9 coriolis_matrix(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain);
Vec9 coriolis_vector(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain);

Vec9 gravity_vector(const Vec9& q, const ChainKinematics& chain);

DynamicsTerms dynamics_terms(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain);

struct ContactResult {
  Vec12 forces = Vec12::Zero();     // (Fx, Fn) per contact point
  Vec9 generalized = Vec9::Zero();  // B = J^T F
};

// Virtual spring-damper ground reaction at the 6 contact points. Normal force
// is clamped to be non-adhesive; friction uses tanh-smoothed Coulomb.
ContactResult contact_forces(const SimState& state, const ChainKinematics& chain,
                             const Vec2& stance_anchor, const ContactParams& params);

struct ForwardDynamicsResult {
  Vec9 qddot;
  ContactResult contact;
};

// Instantaneous qddot = M^-1 (tau + B - C - G) with the contact forces used.
ForwardDynamicsResult forward_dynamics(const SimState& state, const Vec9& tau,
                                       const ChainKinematics& chain,
                                       const Vec2& stance_anchor,
                                       const ContactParams& params);

// One reporting-grid step of the temporally quantized dynamics, subdivided
// into params.n_substeps internal updates:
//   qddot = M^-1 (tau + B - C - G)
//   qdot' = qdot + qddot h,  q' = q + qdot h + qddot h^2 / 2
// Velocity-proportional contact damping is folded into the solve implicitly;
// with k_d = 1e3 on the 0.15 kg toe the explicit form is unstable at any
// practical substep. `tau_fn` is re-evaluated each substep (pass a constant
// for the plain zero-order-hold contract); `joint_damping` adds an implicit
// diagonal for controller derivative gain.
SimState tqld_step(const SimState& state, const std::function<Vec9(const SimState&)>& tau_fn,
                   double dt, const ChainKinematics& chain, const Vec2& stance_anchor,
                   const ContactParams& params, double joint_damping = 0.0);

SimState tqld_step(const SimState& state, const Vec9& tau, double dt,
                   const ChainKinematics& chain, const Vec2& stance_anchor,
                   const ContactParams& params);

double kinetic_energy(const Vec9& q, const Vec9& qdot, const ChainKinematics& chain);
double potential_energy(const Vec9& q, const ChainKinematics& chain, const Vec2& stance_anchor);

// Reaction force carried by the stance-ankle pivot: total mass-acceleration
// minus gravity and the applied contact forces.
Vec2 pivot_reaction(const SimState& state, const ChainKinematics& chain,
                    const Vec2& stance_anchor, const ContactResult& contact);

}  // namespace cyclogait
