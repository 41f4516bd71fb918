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

#include "walklab/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "walklab/common.hpp"

namespace walklab {

Env::Env(const ModelSpec& model, Terrain terrain, EnvConfig cfg)
    : model_(&model),
      cfg_(cfg),
      sim_(model, std::move(terrain),
           SimOptions{.start_x = cfg.start_x}) {
  if (cfg_.substeps <= 0 || cfg_.control_dt <= 0.0 || cfg_.horizon <= 0) {
    throw std::invalid_argument("Env: bad timing configuration");
  }
  jx_ = model.joint_index("pelvis_x");
  jy_ = model.joint_index("pelvis_y");
  jrot_ = model.joint_index("pelvis_rot");
  for (const char* name : {"hip_l", "knee_l", "ankle_l", "hip_r", "knee_r",
                           "ankle_r"}) {
    const int j = model.joint_index(name);
    if (j < 0) {
      throw std::invalid_argument(std::string("Env: model lacks joint ") +
                                  name);
    }
    leg_joints_.push_back(j);
  }
  if (jx_ < 0 || jy_ < 0 || jrot_ < 0) {
    throw std::invalid_argument("Env: model lacks pelvis joints");
  }
  standing_height_ = sim_.standing_pelvis_height();
  const int n_m = act_dim();
  obs_dim_ = 2 + static_cast<int>(leg_joints_.size()) + 3 +
             static_cast<int>(leg_joints_.size()) + n_m + model.n_feet + n_m;
  u_prev_ = Eigen::VectorXd::Zero(n_m);
  state_ = sim_.make_state();
  last_obs_ = Eigen::VectorXf::Zero(obs_dim_);
}

void Env::build_obs(const StepReport& report, Eigen::VectorXf* obs) const {
  obs->resize(obs_dim_);
  int k = 0;
  const Eigen::VectorXd& q = state_.q;
  const Eigen::VectorXd& qd = state_.qdot;
  (*obs)[k++] = static_cast<float>(q[jy_]);
  (*obs)[k++] = static_cast<float>(q[jrot_]);
  for (const int j : leg_joints_) (*obs)[k++] = static_cast<float>(q[j]);
  const double vs = cfg_.qdot_obs_scale;
  (*obs)[k++] = static_cast<float>(vs * qd[jx_]);
  (*obs)[k++] = static_cast<float>(vs * qd[jy_]);
  (*obs)[k++] = static_cast<float>(vs * qd[jrot_]);
  for (const int j : leg_joints_) (*obs)[k++] = static_cast<float>(vs * qd[j]);
  for (Eigen::Index m = 0; m < state_.a.size(); ++m) {
    (*obs)[k++] = static_cast<float>(state_.a[m]);
  }
  const double flag_level = cfg_.contact_flag_bw * model_->body_weight();
  for (Eigen::Index f = 0; f < report.grf.size(); ++f) {
    (*obs)[k++] = (report.grf[f] > flag_level) ? 1.0f : 0.0f;
  }
  for (Eigen::Index m = 0; m < u_prev_.size(); ++m) {
    (*obs)[k++] = static_cast<float>(u_prev_[m]);
  }
}

void Env::observe(Eigen::VectorXf* obs) const { build_obs(report_, obs); }

bool Env::fallen() const {
  const double ground = sim_.terrain().height(state_.q[jx_]);
  return (state_.q[jy_] - ground) < cfg_.fall_fraction * standing_height_;
}

void Env::reset(std::uint64_t seed, Eigen::VectorXf* obs) {
  state_ = sim_.reset(seed);
  u_prev_.setZero();
  steps_ = 0;
  sim_.report_at(state_, &report_);
  build_obs(report_, obs);
  last_obs_ = *obs;
}

void Env::step(const Eigen::VectorXd& action, Eigen::VectorXf* next_obs,
               EnvStep* out) {
  Eigen::VectorXd u = action.cwiseMax(0.0).cwiseMin(cfg_.u_max);
  const double dt = cfg_.control_dt / cfg_.substeps;
  const int n_feet = model_->n_feet;
  Eigen::VectorXd grf_sum = Eigen::VectorXd::Zero(n_feet);
  Eigen::VectorXd limit_sum = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(model_->limited_joints().size()));
  double vx_sum = 0.0;
  double coll_sum = 0.0;
  bool diverged = false;
  int done_substeps = 0;
  for (int s = 0; s < cfg_.substeps; ++s) {
    try {
      sim_.step(&state_, u, dt, &report_);
    } catch (const DivergenceError&) {
      diverged = true;
      break;
    }
    ++done_substeps;
    grf_sum += report_.grf;
    limit_sum += report_.joint_limit_torques;
    vx_sum += report_.com_vx;
    coll_sum += report_.self_collision_force;
  }
  const double denom = std::max(1, done_substeps);
  out->grf_mean = grf_sum / denom;
  out->com_vx_mean = vx_sum / denom;
  out->self_collision_mean = coll_sum / denom;
  out->last_report = report_;
  out->diverged = diverged;

  RewardBreakdown b;
  if (cfg_.running_task) {
    b.r_vel = running_reward(out->com_vx_mean, out->self_collision_mean,
                             model_->body_weight(), cfg_.w_collision);
  } else {
    b.r_vel = velocity_reward(out->com_vx_mean, cfg_.weights.v_target);
    effort_cost(state_.a, u, u_prev_, /*alpha=*/0.0, cfg_.weights, &b);
    pain_cost(limit_sum / denom, out->grf_mean, model_->body_weight(),
              cfg_.weights, &b);
  }
  out->breakdown = b;
  out->task_reward = b.r_vel;

  ++steps_;
  out->done = diverged || fallen();
  out->truncated = !out->done && steps_ >= cfg_.horizon;
  u_prev_ = u;

  if (diverged) {
    // The state may hold the pre-throw values; keep the last good picture.
    *next_obs = last_obs_;
  } else {
    build_obs(report_, next_obs);
    last_obs_ = *next_obs;
  }
}

}  // namespace walklab
