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

// Reduced-coordinate dynamics of the planar link tree. Equations of motion
// are assembled by recursive Newton-Euler sweeps in world coordinates: the
// bias vector is the inverse dynamics of zero acceleration, the mass matrix
// is built column by column from unit accelerations, and forward dynamics
// solves M·qddot = tau - bias. Links are ordered parent-before-child, one
// degree of freedom each, so both sweeps are single passes.

#ifndef WALKLAB_DYNAMICS_HPP_
#define WALKLAB_DYNAMICS_HPP_

#include <vector>

#include <Eigen/Core>

#include "walklab/model.hpp"

namespace walklab {

inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

inline Eigen::Vector2d perp(const Eigen::Vector2d& v) {
  return {-v.y(), v.x()};
}

// World-frame state of one link computed by a kinematics sweep.
struct LinkFrame {
  double angle = 0.0;
  double omega = 0.0;
  double alpha = 0.0;
  Eigen::Vector2d origin{0.0, 0.0};  // joint point, the body-frame origin
  Eigen::Vector2d v{0.0, 0.0};       // velocity of the origin
  Eigen::Vector2d a{0.0, 0.0};       // acceleration of the origin
  Eigen::Vector2d com{0.0, 0.0};
  Eigen::Vector2d v_com{0.0, 0.0};
  Eigen::Vector2d a_com{0.0, 0.0};
  Eigen::Vector2d axis_w{0.0, 0.0};  // prismatic axis in world coordinates
};

// World-frame point forces applied to links (contact, perturbations).
struct ExternalForces {
  struct Wrench {
    int link = -1;
    Eigen::Vector2d force{0.0, 0.0};
    Eigen::Vector2d point{0.0, 0.0};  // world application point
  };
  std::vector<Wrench> wrenches;
  void clear() { wrenches.clear(); }
  void add(int link, const Eigen::Vector2d& force,
           const Eigen::Vector2d& point) {
    wrenches.push_back({link, force, point});
  }
};

// Owns per-model workspace; one instance per rollout (methods reuse internal
// scratch buffers and are not safe to share across threads).
class Dynamics {
 public:
  explicit Dynamics(const ModelSpec& model);

  int dof() const { return dof_; }

  // Position/velocity sweep (accelerations left zero).
  void kinematics(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                  std::vector<LinkFrame>* frames) const;

  // World position and velocity of a body-fixed point.
  static void point_state(const LinkFrame& f, const Eigen::Vector2d& local,
                          Eigen::Vector2d* pos, Eigen::Vector2d* vel);

  // Generalized forces required to produce qddot at (q, qdot) under gravity
  // (optional) and external wrenches. Bias = inverse_dynamics with zero
  // qddot.
  Eigen::VectorXd inverse_dynamics(const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qdot,
                                   const Eigen::VectorXd& qddot,
                                   bool gravity_on,
                                   const ExternalForces& ext);

  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& q);

  // qddot from applied generalized forces; solves the assembled system with
  // a dense LDLT factorization.
  Eigen::VectorXd forward_dynamics(const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qdot,
                                   const Eigen::VectorXd& tau,
                                   const ExternalForces& ext,
                                   bool gravity_on = true);

  // Diagnostics over a kinematics sweep.
  double total_energy(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                      bool include_gravity = true) const;
  Eigen::Vector2d linear_momentum(const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qdot) const;
  Eigen::Vector2d com_position(const Eigen::VectorXd& q) const;
  Eigen::Vector2d com_velocity(const Eigen::VectorXd& q,
                               const Eigen::VectorXd& qdot) const;

 private:
  // Full sweep including accelerations for the given qddot.
  void sweep(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
             const Eigen::VectorXd& qddot, std::vector<LinkFrame>* frames) const;

  const ModelSpec* model_;
  int dof_;
  // Scratch for the Newton-Euler sweeps.
  std::vector<LinkFrame> frames_;
  std::vector<Eigen::Vector2d> f_acc_;
  std::vector<double> n_acc_;
  std::vector<Eigen::Vector2d> ext_force_;
  std::vector<double> ext_torque_;
};

}  // namespace walklab

#endif  // WALKLAB_DYNAMICS_HPP_
