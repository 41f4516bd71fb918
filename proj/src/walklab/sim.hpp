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

// The musculoskeletal simulator: one fixed-dt step advances activation
// dynamics, evaluates muscle and joint-limit torques and contact forces at
// the current state, integrates the rigid-body dynamics semi-implicitly
// (velocity first, then position with the new velocity), and reports the
// force situation at the state just reached. Any non-finite or out-of-bound
// state raises DivergenceError instead of letting NaNs spread.

#ifndef WALKLAB_SIM_HPP_
#define WALKLAB_SIM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "walklab/dynamics.hpp"
#include "walklab/model.hpp"
#include "walklab/rng.hpp"
#include "walklab/terrain.hpp"

namespace walklab {

struct SimState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::VectorXd a;  // muscle activations
  double t = 0.0;
};

struct StepReport {
  Eigen::VectorXd grf;                  // vertical force per foot, N
  Eigen::VectorXd joint_limit_torques;  // magnitudes, one per limited joint
  double com_vx = 0.0;
  double self_collision_force = 0.0;
  Eigen::Vector2d com{0.0, 0.0};
  Eigen::Vector2d com_vel{0.0, 0.0};
  int fiber_clamps = 0;  // muscles that hit the fiber-length floor
};

struct SimOptions {
  double q_bound = 1e3;
  double qdot_bound = 1e5;
  // Initial-state randomization.
  double joint_jitter = 0.05;  // rad
  double qdot_jitter = 0.05;
  double swing_hip = 0.6;        // rad, flexion of the lifted leg
  double swing_knee = -0.9;      // rad
  double swing_clearance = 0.055;  // m, required lift of the swing foot
  double stance_gap = 0.001;       // m, initial stance-foot clearance
  double start_x = 0.0;            // m, initial pelvis_x
};

class Sim {
 public:
  Sim(const ModelSpec& model, Terrain terrain, SimOptions options = {});

  const ModelSpec& model() const { return *model_; }
  const Terrain& terrain() const { return terrain_; }
  Dynamics& dynamics() { return dynamics_; }

  // Zero state (all coordinates, velocities, activations zero, t = 0).
  SimState make_state() const;

  // Standing pelvis height with all joint angles zero: the pelvis_y value
  // that rests the feet exactly on flat ground.
  double standing_pelvis_height() const;

  // Randomized start: small pose and velocity noise, one randomly chosen
  // leg lifted clear of the ground, stance foot just touching.
  SimState reset(std::uint64_t seed) const;

  // One physics step of size dt under excitations u (componentwise [0,1]).
  // Throws DivergenceError when the new state leaves the configured bounds.
  void step(SimState* state, const Eigen::VectorXd& u, double dt,
            StepReport* report);

  // Spring-damper torque outside the limit range, zero inside. Damping is
  // clamped so it never flips the sign of the restoring torque.
  static double joint_limit_torque(double angle, double angular_velocity,
                                   const JointLimit& limit);

  // Force report at a given state without advancing it.
  void report_at(const SimState& state, StepReport* report);

 private:
  void contact_pass(const std::vector<LinkFrame>& frames,
                    ExternalForces* ext, ContactReport* contacts);
  void limit_pass(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                  Eigen::VectorXd* tau, Eigen::VectorXd* magnitudes) const;
  void check_divergence(const SimState& state) const;

  const ModelSpec* model_;
  Terrain terrain_;
  SimOptions options_;
  Dynamics dynamics_;
  std::vector<int> limited_;
  // Scratch.
  std::vector<LinkFrame> frames_;
  std::vector<SphereState> sphere_states_;
  std::vector<Eigen::Vector2d> sphere_forces_;
  ExternalForces ext_;
  Eigen::VectorXd tau_;
};

}  // namespace walklab

#endif  // WALKLAB_SIM_HPP_
