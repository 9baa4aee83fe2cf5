#include "cyclogait/control.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <thread>

#include "cyclogait/rng.hpp"

namespace cyclogait {

Vec9 pd_torque(const ControllerGains& gains, const Vec9& q_des, const Vec9& q,
               const Vec9& qdot_des, const Vec9& qdot) {
  return gains.kp * (q_des - q) + gains.kd * (qdot_des - qdot);
}

RolloutResult rollout(const ControllerGains& gains, const JointTrajectory& traj,
                      const SimState& initial, const ChainKinematics& chain,
                      const Vec2& stance_anchor, const ContactParams& contact,
                      const RolloutOptions& options) {
  const std::size_t n = traj.size();
  if (n == 0) throw std::invalid_argument("rollout: empty trajectory");

  RolloutResult res;
  res.t.reserve(n);
  SimState s = initial;
  const auto& masses = chain.model().masses;
  const double g = chain.model().gravity;
  double min_margin = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < n; ++k) {
    Vec9 q_des = traj.q_des[k];
    Vec9 qdot_des = traj.qdot_des[k];
    q_des[kTorso] = gains.q5_torso;  // the torso reference is the tuned constant
    qdot_des[kTorso] = 0.0;
    const double dist = options.disturbance.torque_at(s.t);

    const Vec9 tau = pd_torque(gains, q_des, s.q, qdot_des, s.qdot) + Vec9::Constant(dist);
    const ForwardDynamicsResult fd = forward_dynamics(s, tau, chain, stance_anchor, contact);

    res.t.push_back(s.t);
    res.q.push_back(s.q);
    res.qdot.push_back(s.qdot);
    res.qddot.push_back(fd.qddot);
    res.tau.push_back(tau);
    res.contact_force.push_back(fd.contact.forces);

    // stability bookkeeping at this sample
    ZmpRecord rec;
    rec.t = s.t;
    {
      JointState js;
      js.q = s.q;
      js.qdot = s.qdot;
      const LinkComStates links = chain.link_com_states(js, fd.qddot, stance_anchor);
      SimState zs = s;
      zs.qddot = fd.qddot;
      std::vector<ActiveContact> active;
      Eigen::Matrix<double, 6, 1> px, pz;
      chain.contact_points(s.q, stance_anchor, px, pz);
      for (int p = 0; p < kNumContacts; ++p)
        active.push_back({px[p], fd.contact.forces[2 * p + 1]});
      const Vec2 pivot = pivot_reaction(zs, chain, stance_anchor, fd.contact);
      if (pivot.y() > contact.active_threshold)
        active.push_back({stance_anchor.x(), pivot.y()});
      try {
        const SupportInterval iv = support_polygon(active, contact.active_threshold);
        rec.x_zmp = zmp_actual(links, masses, g, options.k_slope, options.zmp_k_term);
        rec.x_min = iv.x_min;
        rec.x_max = iv.x_max;
        rec.margin = stability_margin(rec.x_zmp, iv);
        rec.supported = true;
      } catch (const std::runtime_error&) {
        rec.supported = false;  // airborne or free-fall sample: skipped
      }
    }
    res.zmp.push_back(rec);
    if (rec.supported) {
      ++res.supported_samples;
      min_margin = std::min(min_margin, rec.margin);
      const bool ssp = k < options.phase.size() && options.phase[k] != GaitPhase::kDsp;
      if (ssp) {
        ++res.ssp_supported_samples;
        if (rec.margin >= 0) ++res.ssp_margin_ok;
      }
      if (rec.margin < 0) {
        ++res.zmp_violations;
        res.penalty_cost += options.zmp_penalty_weight;
      }
    }

    const Vec9 e = q_des - s.q;
    const Vec9 edot = qdot_des - s.qdot;
    const double power = tau.cwiseProduct(s.qdot).cwiseAbs().sum();
    res.tracking_cost += e.cwiseAbs().sum() + edot.cwiseAbs().sum();
    res.power_cost += power;
    res.energy += power;
    res.peak_torque = std::max(res.peak_torque, tau.cwiseAbs().maxCoeff());
    res.max_qddot = std::max(res.max_qddot, fd.qddot.cwiseAbs().maxCoeff());

    if (k + 1 < n) {
      auto tau_fn = [&](const SimState& sub) -> Vec9 {
        return pd_torque(gains, q_des, sub.q, qdot_des, sub.qdot) + Vec9::Constant(dist);
      };
      try {
        s = tqld_step(s, tau_fn, traj.dt, chain, stance_anchor, contact, gains.kd);
      } catch (const std::runtime_error& err) {
        res.feasible = false;
        res.failure = err.what();
        break;
      }
    }
  }

  res.energy_joules = res.energy * traj.dt;
  res.min_margin = std::isfinite(min_margin) ? min_margin : 0.0;
  res.max_jerk = max_fd_jerk(res.q, traj.dt);
  res.cost = res.feasible
                 ? res.tracking_cost + res.power_cost + res.penalty_cost
                 : std::numeric_limits<double>::infinity();
  return res;
}

// --- continuous-domain ant colony ---------------------------------------------

namespace {

struct Candidate {
  std::array<double, 3> x{};
  double cost = std::numeric_limits<double>::infinity();
};

ControllerGains to_gains(const std::array<double, 3>& x) {
  return ControllerGains{x[0], x[1], x[2]};
}

void evaluate_batch(std::vector<Candidate>& batch,
                    const std::function<double(const ControllerGains&)>& cost_fn,
                    bool parallel) {
  unsigned workers = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(batch.size()));
  if (workers <= 1) {
    for (auto& c : batch) c.cost = cost_fn(to_gains(c.x));
    return;
  }
  std::vector<std::future<void>> futures;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (std::size_t i = next.fetch_add(1); i < batch.size(); i = next.fetch_add(1))
        batch[i].cost = cost_fn(to_gains(batch[i].x));
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace

AcoResult aco_tune(const AcoConfig& config,
                   const std::function<double(const ControllerGains&)>& cost_fn,
                   bool parallel) {
  config.validate();
  constexpr int kDims = 3;
  const double xi = 1.0 - config.evaporation;  // kernel width multiplier
  constexpr double kRankLocality = 0.3;        // rank-weight spread over the archive

  std::array<double, 3> mid{};
  for (int d = 0; d < kDims; ++d) mid[d] = 0.5 * (config.bounds[d][0] + config.bounds[d][1]);
  AcoResult res;
  const double mid_cost = cost_fn(to_gains(mid));
  ++res.evaluations;
  if (!std::isfinite(mid_cost))
    throw std::runtime_error("aco_tune: bound midpoint has infinite cost; bounds look infeasible");

  const int K = config.archive_size;
  std::vector<Candidate> archive(K);
  archive[0].x = mid;
  archive[0].cost = mid_cost;
  for (int k = 1; k < K; ++k) {
    auto rng = make_rng(config.seed, 0, static_cast<std::uint64_t>(k));
    for (int d = 0; d < kDims; ++d) {
      std::uniform_real_distribution<double> u(config.bounds[d][0], config.bounds[d][1]);
      archive[k].x[d] = u(rng);
    }
  }
  {
    std::vector<Candidate> init(archive.begin() + 1, archive.end());
    evaluate_batch(init, cost_fn, parallel);
    res.evaluations += static_cast<int>(init.size());
    std::copy(init.begin(), init.end(), archive.begin() + 1);
  }
  std::stable_sort(archive.begin(), archive.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });

  // rank selection weights
  std::vector<double> weights(K);
  double wsum = 0;
  for (int j = 0; j < K; ++j) {
    const double z = static_cast<double>(j) / (kRankLocality * K);
    weights[j] = std::exp(-0.5 * z * z);
    wsum += weights[j];
  }
  for (auto& w : weights) w /= wsum;

  bool any_finite = std::isfinite(archive[0].cost);
  for (int iter = 1; iter <= config.n_iterations; ++iter) {
    std::vector<Candidate> ants(config.n_ants);
    for (int a = 0; a < config.n_ants; ++a) {
      auto rng = make_rng(config.seed, static_cast<std::uint64_t>(iter),
                          static_cast<std::uint64_t>(a));
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      double pick = u01(rng);
      int guide = 0;
      for (int j = 0; j < K; ++j) {
        pick -= weights[j];
        if (pick <= 0) {
          guide = j;
          break;
        }
        guide = j;
      }
      for (int d = 0; d < kDims; ++d) {
        double spread = 0;
        for (int l = 0; l < K; ++l) spread += std::abs(archive[l].x[d] - archive[guide].x[d]);
        const double sigma = xi * spread / (K - 1);
        std::normal_distribution<double> nd(archive[guide].x[d], std::max(sigma, 1e-300));
        ants[a].x[d] = std::clamp(nd(rng), config.bounds[d][0], config.bounds[d][1]);
      }
    }
    evaluate_batch(ants, cost_fn, parallel);
    res.evaluations += config.n_ants;

    double mean = 0;
    int finite = 0;
    for (const auto& c : ants) {
      if (std::isfinite(c.cost)) {
        mean += c.cost;
        ++finite;
        any_finite = true;
      }
    }
    res.mean_cost_curve.push_back(finite > 0 ? mean / finite
                                             : std::numeric_limits<double>::infinity());

    archive.insert(archive.end(), ants.begin(), ants.end());
    std::stable_sort(archive.begin(), archive.end(),
                     [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
    archive.resize(K);
    res.best_cost_curve.push_back(archive[0].cost);
  }
  if (!any_finite)
    throw std::runtime_error("aco_tune: every candidate in every iteration was infeasible");

  res.best = to_gains(archive[0].x);
  res.best_cost = archive[0].cost;
  return res;
}

}  // namespace cyclogait
