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

// Control-rate environment around the simulator. One env step holds the
// excitation vector for a fixed number of physics substeps, aggregates the
// force reports over that window (time means), and produces the decomposed
// reward plus a proprioceptive observation: pelvis height and pitch, leg
// joint angles and scaled velocities, activations, foot contact flags, and
// the previous action. World x position and the terrain shape are withheld
// from the policy on purpose.

#ifndef WALKLAB_ENV_HPP_
#define WALKLAB_ENV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "walklab/reward.hpp"
#include "walklab/sim.hpp"

namespace walklab {

struct EnvConfig {
  double control_dt = 0.01;  // s; physics dt = control_dt / substeps
  int substeps = 100;
  int horizon = 1000;              // control steps per episode
  double u_max = 0.5;              // excitation clip ceiling
  RewardWeights weights;
  bool running_task = false;       // velocity-itself reward, no effort/pain
  double w_collision = 0.0;        // body-weight-scaled self-collision cost
  double fall_fraction = 0.7;      // of standing pelvis height
  double contact_flag_bw = 0.05;   // GRF flag threshold in body weights
  double qdot_obs_scale = 0.1;
  double start_x = 0.0;
};

// Outcome of one control step. The scalar reward is deliberately absent:
// callers recompose it from the breakdown at their current effort weight.
struct EnvStep {
  RewardBreakdown breakdown;
  double task_reward = 0.0;   // r_vel term, summed into the episode return
  bool done = false;          // fall or divergence: value bootstrap stops
  bool truncated = false;     // horizon reached
  bool diverged = false;
  // Time means over the control window.
  Eigen::VectorXd grf_mean;
  double com_vx_mean = 0.0;
  double self_collision_mean = 0.0;
  StepReport last_report;     // forces at the final substep state
};

class Env {
 public:
  Env(const ModelSpec& model, Terrain terrain, EnvConfig cfg);

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return static_cast<int>(model_->muscles.size()); }
  const EnvConfig& config() const { return cfg_; }
  const ModelSpec& model() const { return *model_; }
  const SimState& state() const { return state_; }
  double standing_height() const { return standing_height_; }
  int steps_taken() const { return steps_; }
  const Eigen::VectorXd& prev_action() const { return u_prev_; }
  int joint_x() const { return jx_; }
  int joint_y() const { return jy_; }
  int joint_rot() const { return jrot_; }
  // hip_l knee_l ankle_l hip_r knee_r ankle_r
  const std::vector<int>& leg_joints() const { return leg_joints_; }

  // Starts an episode; the observation is written to obs (size obs_dim).
  void reset(std::uint64_t seed, Eigen::VectorXf* obs);

  // Applies a clipped excitation vector for one control window. action must
  // already be within [0, u_max]; values outside are clipped defensively.
  void step(const Eigen::VectorXd& action, Eigen::VectorXf* next_obs,
            EnvStep* out);

  // Observation of the current state (used by loggers and tests).
  void observe(Eigen::VectorXf* obs) const;

 private:
  void build_obs(const StepReport& report, Eigen::VectorXf* obs) const;
  bool fallen() const;

  const ModelSpec* model_;
  EnvConfig cfg_;
  Sim sim_;
  SimState state_;
  StepReport report_;  // report at the current state
  Eigen::VectorXd u_prev_;
  int steps_ = 0;
  double standing_height_ = 0.0;
  int obs_dim_ = 0;
  // Joint index table resolved from conventional names.
  int jx_, jy_, jrot_;
  std::vector<int> leg_joints_;  // hip_l knee_l ankle_l hip_r knee_r ankle_r
  Eigen::VectorXf last_obs_;     // kept finite even if the sim diverges
};

}  // namespace walklab

#endif  // WALKLAB_ENV_HPP_
