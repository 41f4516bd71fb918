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

#include "walklab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "walklab/common.hpp"
#include "walklab/contact.hpp"
#include "walklab/muscle.hpp"

namespace walklab {

Sim::Sim(const ModelSpec& model, Terrain terrain, SimOptions options)
    : model_(&model),
      terrain_(std::move(terrain)),
      options_(options),
      dynamics_(model),
      limited_(model.limited_joints()) {
  tau_ = Eigen::VectorXd::Zero(model.dof());
}

SimState Sim::make_state() const {
  SimState s;
  s.q = Eigen::VectorXd::Zero(model_->dof());
  s.qdot = Eigen::VectorXd::Zero(model_->dof());
  s.a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model_->muscles.size()));
  s.t = 0.0;
  return s;
}

double Sim::standing_pelvis_height() const {
  std::vector<LinkFrame> frames;
  dynamics_.kinematics(Eigen::VectorXd::Zero(model_->dof()),
                       Eigen::VectorXd::Zero(model_->dof()), &frames);
  double min_clear = std::numeric_limits<double>::infinity();
  for (const ContactSphere& sp : model_->spheres) {
    if (sp.foot < 0) continue;
    Eigen::Vector2d pos, vel;
    Dynamics::point_state(frames[static_cast<std::size_t>(sp.link)],
                          sp.offset, &pos, &vel);
    min_clear = std::min(min_clear, pos.y() - sp.radius);
  }
  return -min_clear;
}

SimState Sim::reset(std::uint64_t seed) const {
  Rng rng(seed);
  SimState s = make_state();
  const int jx = model_->joint_index("pelvis_x");
  const int jy = model_->joint_index("pelvis_y");
  if (jx < 0 || jy < 0) {
    throw std::runtime_error("reset: model lacks pelvis_x/pelvis_y joints");
  }
  for (int j = 0; j < model_->dof(); ++j) {
    if (model_->joints[static_cast<std::size_t>(j)].type ==
        JointType::kRevolute) {
      s.q[j] = rng.uniform(-options_.joint_jitter, options_.joint_jitter);
    }
    s.qdot[j] = rng.uniform(-options_.qdot_jitter, options_.qdot_jitter);
  }
  const bool left = rng.coin();
  const std::string side = left ? "_l" : "_r";
  const int swing_slot = left ? 0 : 1;
  const int hip = model_->joint_index("hip" + side);
  const int knee = model_->joint_index("knee" + side);
  if (hip < 0 || knee < 0) {
    throw std::runtime_error("reset: model lacks hip/knee joints for " + side);
  }
  s.q[hip] += options_.swing_hip;
  s.q[knee] += options_.swing_knee;
  s.q[jx] = options_.start_x;

  const double knee_floor =
      model_->joints[static_cast<std::size_t>(knee)].limit.present
          ? model_->joints[static_cast<std::size_t>(knee)].limit.lower + 0.05
          : -1.8;
  std::vector<LinkFrame> frames;
  for (int iter = 0; iter < 64; ++iter) {
    dynamics_.kinematics(s.q, Eigen::VectorXd::Zero(model_->dof()), &frames);
    double stance_clear = std::numeric_limits<double>::infinity();
    double swing_clear = std::numeric_limits<double>::infinity();
    for (const ContactSphere& sp : model_->spheres) {
      if (sp.foot < 0) continue;
      Eigen::Vector2d pos, vel;
      Dynamics::point_state(frames[static_cast<std::size_t>(sp.link)],
                            sp.offset, &pos, &vel);
      const double clear = pos.y() - sp.radius - terrain_.height(pos.x());
      if (sp.foot == swing_slot) {
        swing_clear = std::min(swing_clear, clear);
      } else {
        stance_clear = std::min(stance_clear, clear);
      }
    }
    const double shift = stance_clear - options_.stance_gap;
    s.q[jy] -= shift;
    if (swing_clear - shift >= options_.swing_clearance) break;
    if (s.q[knee] - 0.1 >= knee_floor) {
      s.q[knee] -= 0.1;
    } else {
      s.q[hip] += 0.1;
    }
  }
  return s;
}

double Sim::joint_limit_torque(double angle, double angular_velocity,
                               const JointLimit& limit) {
  if (!limit.present) return 0.0;
  if (angle > limit.upper) {
    const double raw = -limit.stiffness * (angle - limit.upper) -
                       limit.damping * angular_velocity;
    return std::min(0.0, raw);
  }
  if (angle < limit.lower) {
    const double raw = limit.stiffness * (limit.lower - angle) -
                       limit.damping * angular_velocity;
    return std::max(0.0, raw);
  }
  return 0.0;
}

void Sim::limit_pass(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                     Eigen::VectorXd* tau,
                     Eigen::VectorXd* magnitudes) const {
  for (std::size_t k = 0; k < limited_.size(); ++k) {
    const int j = limited_[k];
    const double tl = joint_limit_torque(
        q[j], qdot[j], model_->joints[static_cast<std::size_t>(j)].limit);
    if (tau != nullptr) (*tau)[j] += tl;
    if (magnitudes != nullptr) {
      (*magnitudes)[static_cast<Eigen::Index>(k)] = std::abs(tl);
    }
  }
}

void Sim::contact_pass(const std::vector<LinkFrame>& frames,
                       ExternalForces* ext, ContactReport* contacts) {
  sphere_states_.resize(model_->spheres.size());
  for (std::size_t i = 0; i < model_->spheres.size(); ++i) {
    const ContactSphere& sp = model_->spheres[i];
    Dynamics::point_state(frames[static_cast<std::size_t>(sp.link)], sp.offset,
                          &sphere_states_[i].center,
                          &sphere_states_[i].velocity);
  }
  resolve_contacts(model_->spheres, sphere_states_, terrain_, model_->contact,
                   model_->n_feet, &sphere_forces_, contacts);
  if (ext != nullptr) {
    ext->clear();
    for (std::size_t i = 0; i < model_->spheres.size(); ++i) {
      if (sphere_forces_[i].squaredNorm() > 0.0) {
        ext->add(model_->spheres[i].link, sphere_forces_[i],
                 sphere_states_[i].center);
      }
    }
  }
}

void Sim::check_divergence(const SimState& state) const {
  if (!state.q.allFinite() || !state.qdot.allFinite() ||
      !state.a.allFinite()) {
    throw DivergenceError("simulation produced a non-finite state at t = " +
                          std::to_string(state.t));
  }
  if (state.q.cwiseAbs().maxCoeff() > options_.q_bound ||
      state.qdot.cwiseAbs().maxCoeff() > options_.qdot_bound) {
    throw DivergenceError("simulation state out of bounds at t = " +
                          std::to_string(state.t));
  }
}

void Sim::step(SimState* state, const Eigen::VectorXd& u, double dt,
               StepReport* report) {
  const Eigen::Index n_muscles =
      static_cast<Eigen::Index>(model_->muscles.size());
  if (u.size() != n_muscles) {
    throw std::invalid_argument("step: excitation size mismatch");
  }
  for (Eigen::Index m = 0; m < n_muscles; ++m) {
    const MuscleParams& p = model_->muscles[static_cast<std::size_t>(m)];
    state->a[m] = activation_step(state->a[m], u[m], dt, p.tau_act,
                                  p.tau_deact);
  }
  tau_.setZero();
  for (Eigen::Index m = 0; m < n_muscles; ++m) {
    const MuscleParams& p = model_->muscles[static_cast<std::size_t>(m)];
    const MuscleSignals sig = muscle_force(p, state->a[m], state->q,
                                           state->qdot);
    add_joint_torques(p, sig.force, &tau_);
  }
  limit_pass(state->q, state->qdot, &tau_, nullptr);
  dynamics_.kinematics(state->q, state->qdot, &frames_);
  ContactReport contacts;
  contact_pass(frames_, &ext_, &contacts);
  const Eigen::VectorXd qddot =
      dynamics_.forward_dynamics(state->q, state->qdot, tau_, ext_);
  state->qdot += dt * qddot;
  state->q += dt * state->qdot;
  state->t += dt;
  check_divergence(*state);
  if (report != nullptr) report_at(*state, report);
}

void Sim::report_at(const SimState& state, StepReport* report) {
  dynamics_.kinematics(state.q, state.qdot, &frames_);
  ContactReport contacts;
  contact_pass(frames_, nullptr, &contacts);
  report->grf = contacts.grf;
  report->self_collision_force = contacts.self_collision;
  report->joint_limit_torques =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(limited_.size()));
  limit_pass(state.q, state.qdot, nullptr, &report->joint_limit_torques);
  Eigen::Vector2d com = Eigen::Vector2d::Zero();
  Eigen::Vector2d com_v = Eigen::Vector2d::Zero();
  double mass = 0.0;
  for (std::size_t i = 0; i < model_->links.size(); ++i) {
    com += model_->links[i].mass * frames_[i].com;
    com_v += model_->links[i].mass * frames_[i].v_com;
    mass += model_->links[i].mass;
  }
  report->com = com / mass;
  report->com_vel = com_v / mass;
  report->com_vx = report->com_vel.x();
  report->fiber_clamps = 0;
  for (std::size_t m = 0; m < model_->muscles.size(); ++m) {
    const MuscleSignals sig =
        muscle_force(model_->muscles[m], state.a[static_cast<Eigen::Index>(m)],
                     state.q, state.qdot);
    if (sig.fiber_clamped) ++report->fiber_clamps;
  }
}

}  // namespace walklab
