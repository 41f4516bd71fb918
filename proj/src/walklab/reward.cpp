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

#include "walklab/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace walklab {

double velocity_reward(double v, double v_target) {
  if (v >= v_target) return 1.0;
  const double d = v - v_target;
  return std::exp(-d * d);
}

int count_active(const Eigen::VectorXd& a, double threshold) {
  int n = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > threshold) ++n;
  }
  return n;
}

double effort_cost(const Eigen::VectorXd& a, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& u_prev, double alpha,
                   const RewardWeights& w, RewardBreakdown* breakdown) {
  if (a.size() == 0 || a.size() != u.size() || u.size() != u_prev.size()) {
    throw std::invalid_argument("effort_cost: vector length mismatch");
  }
  const double activity = a.array().cube().mean();
  const double smooth = w.w1 * (u - u_prev).squaredNorm();
  const double nactive =
      w.w2 * (static_cast<double>(count_active(a, w.activity_threshold)) /
              static_cast<double>(a.size()));
  if (breakdown != nullptr) {
    breakdown->effort_activity = activity;
    breakdown->effort_smooth = smooth;
    breakdown->effort_nactive = nactive;
  }
  return alpha * activity + smooth + nactive;
}

double pain_cost(const Eigen::VectorXd& limit_torques,
                 const Eigen::VectorXd& grfs, double body_weight,
                 const RewardWeights& w, RewardBreakdown* breakdown) {
  if (body_weight <= 0.0) {
    throw std::invalid_argument("pain_cost: body_weight must be positive");
  }
  const double limits = w.w3 * limit_torques.array().abs().sum();
  double grf_excess = 0.0;
  for (Eigen::Index i = 0; i < grfs.size(); ++i) {
    grf_excess += std::max(0.0, grfs[i] / body_weight - w.grf_threshold);
  }
  const double grf = w.w4 * grf_excess;
  if (breakdown != nullptr) {
    breakdown->pain_limits = limits;
    breakdown->pain_grf = grf;
  }
  return limits + grf;
}

double total_reward(const RewardBreakdown& b, double alpha) {
  return b.r_vel -
         (alpha * b.effort_activity + b.effort_smooth + b.effort_nactive) -
         (b.pain_limits + b.pain_grf);
}

double running_reward(double v, double self_collision_force,
                      double body_weight, double w_collision) {
  return v - w_collision * (self_collision_force / body_weight);
}

}  // namespace walklab
