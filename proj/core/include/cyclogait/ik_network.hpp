#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cyclogait/gait_planner.hpp"
#include "cyclogait/robot_model.hpp"

namespace cyclogait {

// 2-10-2 feed-forward network; sigmoid hidden layer, linear output.
struct NetworkWeights {
  Eigen::Matrix<double, 10, 2> w_in;
  Eigen::Matrix<double, 10, 1> b_in;
  Eigen::Matrix<double, 2, 10> w_out;
  Eigen::Vector2d b_out;

  // Uniform [-0.5, 0.5] init; the output bias is shifted by a joint-space
  // guess that selects the knee-forward elbow branch.
  static NetworkWeights random_init(std::mt19937_64& rng,
                                    const Eigen::Vector2d& branch_guess = {1.0, 1.0});

  Eigen::Vector2d forward(const Eigen::Vector2d& input) const;
};

struct IkHyper {
  double learning_rate = 1e-4;
  int max_epochs = 5000;
  // Loss threshold in the network's native squared-centimeter units. The
  // training loss is evaluated on centimeter coordinates: with the printed
  // learning rate the meter-scale loss surface is so shallow that gradient
  // descent cannot reach any useful tolerance inside the epoch budget.
  double error_threshold = 1e-6;

  void validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("IkHyper: learning_rate must be > 0");
    if (!(error_threshold > 0)) throw std::invalid_argument("IkHyper: error_threshold must be > 0");
    if (max_epochs < 1) throw std::invalid_argument("IkHyper: max_epochs must be >= 1");
  }
};

struct TrainResult {
  double theta1 = 0, theta2 = 0;  // leg angles per the FK map; theta2 is relative to the thigh
  int epochs = 0;
  double final_error = 0;  // squared position error [m^2]
  int lr_halvings = 0;
  bool converged = false;
};

class IkNonConvergence : public std::runtime_error {
 public:
  IkNonConvergence(const std::string& what, TrainResult best)
      : std::runtime_error(what), best_(best) {}
  const TrainResult& best() const { return best_; }

 private:
  TrainResult best_;
};

// One unsupervised pose solve: gradient descent on the squared distance
// between the target ankle and the ankle reconstructed through the leg FK.
// Weights are updated in place so the next pose warm-starts. Throws
// IkNonConvergence when the epoch budget is exhausted above threshold.
TrainResult train_pose(NetworkWeights& weights, const Vec2& hip, const Vec2& target_ankle,
                       double l1, double l2, const IkHyper& hyper);

struct JointTrajectory {
  std::vector<double> t;
  std::vector<Vec9> q_des;
  std::vector<Vec9> qdot_des;
  std::vector<int> epochs;        // per pose (swing + stance solves)
  std::vector<double> error;      // max of the two per-pose losses [m^2]
  std::vector<double> solve_ms;   // wall clock per pose
  double dt = 0.01;
  std::size_t size() const { return t.size(); }
};

// Solve the whole gait: per-sample swing and stance leg UIKNN with warm
// start, constant torso pitch, planned foot angles, finite-difference rates.
JointTrajectory solve_gait(const CartesianGait& gait, const RobotModel& model,
                           const IkHyper& hyper, double torso_pitch, std::uint64_t seed);

}  // namespace cyclogait
