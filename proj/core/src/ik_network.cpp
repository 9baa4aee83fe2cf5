#include "cyclogait/ik_network.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace cyclogait {

namespace {

constexpr double kCmPerMeter = 100.0;

struct LossEval {
  double loss;  // squared centimeters
  Eigen::Vector2d grad_theta;
};

// Loss and its gradient w.r.t. the two output angles, centimeter coordinates.
LossEval eval_loss(const Eigen::Vector2d& theta, const Eigen::Vector2d& target_rel_m,
                   double l1, double l2) {
  const double s1 = std::sin(theta[0]), c1 = std::cos(theta[0]);
  const double s12 = std::sin(theta[0] + theta[1]), c12 = std::cos(theta[0] + theta[1]);
  const double l1cm = l1 * kCmPerMeter, l2cm = l2 * kCmPerMeter;
  const double fx = l1cm * c1 + l2cm * c12;
  const double fz = -(l1cm * s1 + l2cm * s12);
  const double rx = target_rel_m.x() * kCmPerMeter - fx;
  const double rz = target_rel_m.y() * kCmPerMeter - fz;
  LossEval ev;
  ev.loss = rx * rx + rz * rz;
  // d(fx)/d(theta), d(fz)/d(theta)
  const Eigen::Vector2d dfx{-(l1cm * s1 + l2cm * s12), -l2cm * s12};
  const Eigen::Vector2d dfz{-(l1cm * c1 + l2cm * c12), -l2cm * c12};
  ev.grad_theta = -2.0 * rx * dfx - 2.0 * rz * dfz;
  return ev;
}

}  // namespace

NetworkWeights NetworkWeights::random_init(std::mt19937_64& rng,
                                           const Eigen::Vector2d& branch_guess) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  NetworkWeights w;
  for (int i = 0; i < 10; ++i) {
    w.w_in(i, 0) = u(rng);
    w.w_in(i, 1) = u(rng);
    w.b_in(i) = u(rng);
  }
  for (int j = 0; j < 10; ++j) {
    w.w_out(0, j) = u(rng);
    w.w_out(1, j) = u(rng);
  }
  w.b_out[0] = u(rng) + branch_guess[0];
  w.b_out[1] = u(rng) + branch_guess[1];
  return w;
}

Eigen::Vector2d NetworkWeights::forward(const Eigen::Vector2d& input) const {
  const Eigen::Matrix<double, 10, 1> act = w_in * input + b_in;
  const Eigen::Matrix<double, 10, 1> hidden =
      (1.0 + (-act.array()).exp()).inverse().matrix();
  return w_out * hidden + b_out;
}

TrainResult train_pose(NetworkWeights& w, const Vec2& hip, const Vec2& target_ankle,
                       double l1, double l2, const IkHyper& hyper) {
  hyper.validate();
  if (!(l1 > 0 && l2 > 0)) throw std::invalid_argument("train_pose: lengths must be > 0");
  const Vec2 rel = target_ankle - hip;
  const Eigen::Vector2d input = rel / (l1 + l2);  // keeps the sigmoid inputs tame

  double alpha = hyper.learning_rate;
  int halvings = 0;
  TrainResult res;

  for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    const Eigen::Matrix<double, 10, 1> act = w.w_in * input + w.b_in;
    const Eigen::Matrix<double, 10, 1> hidden =
        (1.0 + (-act.array()).exp()).inverse().matrix();
    const Eigen::Vector2d theta = w.w_out * hidden + w.b_out;
    const LossEval ev = eval_loss(theta, rel, l1, l2);

    res.theta1 = theta[0];
    res.theta2 = theta[1];
    res.epochs = epoch;
    res.final_error = ev.loss / (kCmPerMeter * kCmPerMeter);
    res.lr_halvings = halvings;
    if (ev.loss < hyper.error_threshold) {
      res.converged = true;
      return res;
    }

    // Backprop through the linear head and the sigmoid layer.
    const Eigen::Matrix<double, 2, 10> g_w_out = ev.grad_theta * hidden.transpose();
    const Eigen::Matrix<double, 10, 1> d_hidden =
        (w.w_out.transpose() * ev.grad_theta).cwiseProduct(
            hidden.cwiseProduct(Eigen::Matrix<double, 10, 1>::Ones() - hidden));
    const Eigen::Matrix<double, 10, 2> g_w_in = d_hidden * input.transpose();

    NetworkWeights trial = w;
    trial.w_out -= alpha * g_w_out;
    trial.b_out -= alpha * ev.grad_theta;
    trial.w_in -= alpha * g_w_in;
    trial.b_in -= alpha * d_hidden;

    const Eigen::Vector2d theta_trial = trial.forward(input);
    const double loss_trial = eval_loss(theta_trial, rel, l1, l2).loss;
    if (loss_trial > ev.loss) {
      // keep the descent monotone: reject the step and halve the rate
      alpha *= 0.5;
      ++halvings;
      continue;
    }
    w = trial;
    // let the rate creep back after accepted steps so one bad region does not
    // throttle the rest of the pose
    alpha = std::min(alpha * 1.25, hyper.learning_rate);
  }

  res.epochs = hyper.max_epochs;
  std::ostringstream msg;
  msg << "train_pose: no convergence after " << hyper.max_epochs
      << " epochs, loss " << res.final_error << " m^2";
  throw IkNonConvergence(msg.str(), res);
}

JointTrajectory solve_gait(const CartesianGait& gait, const RobotModel& model,
                           const IkHyper& hyper, double torso_pitch, std::uint64_t seed) {
  if (gait.size() == 0) throw std::invalid_argument("solve_gait: empty gait");
  const double l1 = model.lengths[0], l2 = model.lengths[1];

  std::mt19937_64 rng(seed);
  NetworkWeights swing_net = NetworkWeights::random_init(rng);
  NetworkWeights stance_net = NetworkWeights::random_init(rng);

  JointTrajectory traj;
  traj.dt = gait.dt;
  const std::size_t n = gait.size();
  traj.t = gait.t;
  traj.q_des.resize(n);
  traj.qdot_des.resize(n);
  traj.epochs.resize(n);
  traj.error.resize(n);
  traj.solve_ms.resize(n);

  auto solve_leg = [&](NetworkWeights& net, const Vec2& hip, const Vec2& target,
                       std::size_t sample) -> TrainResult {
    try {
      return train_pose(net, hip, target, l1, l2, hyper);
    } catch (const IkNonConvergence& e) {
      std::ostringstream msg;
      msg << "solve_gait: pose " << sample << " did not converge ("
          << e.what() << ")";
      throw IkNonConvergence(msg.str(), e.best());
    }
  };

  for (std::size_t k = 0; k < n; ++k) {
    const auto start = std::chrono::steady_clock::now();
    TrainResult sw = solve_leg(swing_net, gait.hip[k], gait.ankle[k], k);
    if (k == 0 && std::sin(sw.theta2) < 0) {
      // first pose landed on the knee-back branch: re-seed and retry
      for (int attempt = 0; attempt < 8 && std::sin(sw.theta2) < 0; ++attempt) {
        swing_net = NetworkWeights::random_init(rng);
        sw = solve_leg(swing_net, gait.hip[k], gait.ankle[k], k);
      }
      if (std::sin(sw.theta2) < 0)
        throw std::runtime_error("solve_gait: could not seed the knee-forward branch (swing)");
    }
    TrainResult st = solve_leg(stance_net, gait.hip[k], gait.stance_anchor, k);
    if (k == 0 && std::sin(st.theta2) < 0) {
      for (int attempt = 0; attempt < 8 && std::sin(st.theta2) < 0; ++attempt) {
        stance_net = NetworkWeights::random_init(rng);
        st = solve_leg(stance_net, gait.hip[k], gait.stance_anchor, k);
      }
      if (std::sin(st.theta2) < 0)
        throw std::runtime_error("solve_gait: could not seed the knee-forward branch (stance)");
    }
    const auto stop = std::chrono::steady_clock::now();

    Vec9& q = traj.q_des[k];
    q[kSwingThigh] = sw.theta1;
    q[kSwingShank] = sw.theta1 + sw.theta2;  // absolute shank pitch
    q[kStanceThigh] = st.theta1;
    q[kStanceShank] = st.theta1 + st.theta2;
    q[kTorso] = torso_pitch;
    q[kSwingSole] = gait.sole_angle[k];
    q[kSwingToe] = gait.toe_angle[k];
    q[kStanceSole] = 0.0;
    q[kStanceToe] = 0.0;

    traj.epochs[k] = sw.epochs + st.epochs;
    traj.error[k] = std::max(sw.final_error, st.final_error);
    traj.solve_ms[k] =
        std::chrono::duration<double, std::milli>(stop - start).count();

    if (k > 0) {
      const double dq = (traj.q_des[k] - traj.q_des[k - 1]).cwiseAbs().maxCoeff();
      if (dq > 0.2) {
        std::ostringstream msg;
        msg << "solve_gait: IK branch jump at sample " << k << " (|dq|_inf = " << dq << ")";
        throw std::runtime_error(msg.str());
      }
    }
  }

  // Desired rates by finite differences, one-sided at the ends.
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0)
      traj.qdot_des[k] = (traj.q_des[1] - traj.q_des[0]) / gait.dt;
    else if (k + 1 == n)
      traj.qdot_des[k] = (traj.q_des[n - 1] - traj.q_des[n - 2]) / gait.dt;
    else
      traj.qdot_des[k] = (traj.q_des[k + 1] - traj.q_des[k - 1]) / (2 * gait.dt);
  }
  return traj;
}

}  // namespace cyclogait
