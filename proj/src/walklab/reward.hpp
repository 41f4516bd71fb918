// Copyright 2026 The Walklab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The three-term walking reward: a capped velocity reward minus an effort
// cost (cubic activity, excitation smoothness, active-muscle count) minus a
// pain cost (joint-limit torques, ground-reaction-force excess). Each step's
// reward is kept as a decomposed breakdown so the activity term can be
// re-weighted later when transitions are sampled from the replay buffer.

#ifndef WALKLAB_REWARD_HPP_
#define WALKLAB_REWARD_HPP_

#include <Eigen/Core>

namespace walklab {

struct RewardWeights {
  double w1 = 0.097;  // excitation smoothness
  double w2 = 1.579;  // active-muscle count (above activity_threshold)
  double w3 = 0.131;  // joint-limit torque
  double w4 = 0.073;  // GRF excess above grf_threshold body weights
  double v_target = 1.2;            // m/s
  double grf_threshold = 1.2;       // body weights
  double activity_threshold = 0.15; // activation fraction
};

// Per-step reward components. effort_activity is stored unweighted so the
// effort weight alpha can be applied at sampling time; the other cost terms
// are stored with their fixed weights already applied.
struct RewardBreakdown {
  double r_vel = 0.0;
  double effort_activity = 0.0;  // mean over muscles of a^3, no alpha
  double effort_smooth = 0.0;    // w1 * sum((u - u_prev)^2)
  double effort_nactive = 0.0;   // w2 * (active count / muscle count)
  double pain_limits = 0.0;      // w3 * sum(|tau_lim|)
  double pain_grf = 0.0;         // w4 * sum(max(0, grf/BW - threshold))
};

// exp(-(v - v_target)^2) below the target, 1 at and above it.
double velocity_reward(double v, double v_target);

// Muscles with activation strictly above the threshold.
int count_active(const Eigen::VectorXd& a, double threshold);

// cost = alpha*mean(a^3) + w1*sum((u-u_prev)^2) + w2*(n_active/n).
// The breakdown's effort components are filled in (activity unweighted by
// alpha). Throws std::invalid_argument on a length mismatch.
double effort_cost(const Eigen::VectorXd& a, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& u_prev, double alpha,
                   const RewardWeights& w, RewardBreakdown* breakdown);

// cost = w3*sum(|tau_lim|) + w4*sum(max(0, grf_j/body_weight - threshold)).
// Fills the breakdown's pain components.
double pain_cost(const Eigen::VectorXd& limit_torques,
                 const Eigen::VectorXd& grfs, double body_weight,
                 const RewardWeights& w, RewardBreakdown* breakdown);

// r = r_vel - (alpha*effort_activity + effort_smooth + effort_nactive)
//           - (pain_limits + pain_grf).
// Recomposition from a stored breakdown is bit-identical to computing the
// reward fresh at the same alpha.
double total_reward(const RewardBreakdown& b, double alpha);

// Running task: velocity itself, minus a self-collision penalty in body
// weights. No effort term and no cap.
double running_reward(double v, double self_collision_force,
                      double body_weight, double w_collision);

}  // namespace walklab

#endif  // WALKLAB_REWARD_HPP_
