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

// Hill-type muscle with first-order activation dynamics, active
// force-length and force-velocity scaling, a passive parallel element, and
// a rigid tendon. Muscle paths are affine in joint angles: constant moment
// arms, so musculotendon length is a reference length minus arm-weighted
// angle excursions, and a muscle spans a joint per attachment entry.

#ifndef WALKLAB_MUSCLE_HPP_
#define WALKLAB_MUSCLE_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

namespace walklab {

struct MuscleAttachment {
  int joint = -1;      // index into the model's joint vector
  double arm = 0.0;    // moment arm, metres; positive shortens with +angle
  double q_ref = 0.0;  // joint angle at which l_ref was measured
};

struct MuscleParams {
  std::string name;
  double f_max = 0.0;         // maximum isometric force, N
  double l_opt = 0.0;         // optimal fiber length, m
  double tendon_slack = 0.0;  // rigid tendon length, m
  double v_max = 10.0;        // max shortening speed, optimal lengths / s
  double tau_act = 0.01;      // activation time constant, s
  double tau_deact = 0.04;    // deactivation time constant, s
  double l_ref = 0.0;         // musculotendon length at the reference pose
  std::vector<MuscleAttachment> attachments;
};

// Intermediate quantities from one force evaluation.
struct MuscleSignals {
  double l_mt = 0.0;    // musculotendon length
  double v_mt = 0.0;    // musculotendon lengthening rate
  double l_norm = 0.0;  // fiber length / l_opt
  double v_norm = 0.0;  // fiber velocity / (v_max * l_opt), lengthening > 0
  double f_l = 0.0;
  double f_v = 0.0;
  double f_p = 0.0;
  double force = 0.0;        // total tension, N, never negative
  bool fiber_clamped = false;  // fiber length hit the positivity floor
};

// Exact exponential step of da/dt = (u - a) / tau, with the faster time
// constant when excitation exceeds activation. Result stays in [0, 1] for
// inputs in [0, 1].
double activation_step(double a, double u, double dt, double tau_act,
                       double tau_deact);

// Gaussian active force-length curve, peak 1 at l_norm = 1, width 0.45.
double force_length(double l_norm);

// Force-velocity curve over normalized fiber velocity (lengthening
// positive). Hyperbolic drop to 0 at v_norm = -1 (max shortening), 1 at
// rest, saturating toward 1.5 when stretched fast.
double force_velocity(double v_norm);

// Parallel elastic element: zero at or below optimal length, exponential in
// strain, reaching 1 at 60% strain.
double passive_force(double l_norm);

// Path kinematics under constant moment arms.
double musculotendon_length(const MuscleParams& p, const Eigen::VectorXd& q);
double musculotendon_velocity(const MuscleParams& p,
                              const Eigen::VectorXd& qdot);

// Full tension evaluation at activation a and pose (q, qdot):
// force = f_max * (a * f_l * f_v + f_p), clamped at zero from below.
MuscleSignals muscle_force(const MuscleParams& p, double a,
                           const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qdot);

// Adds this muscle's joint torques (arm * force per attachment) into tau.
void add_joint_torques(const MuscleParams& p, double force,
                       Eigen::VectorXd* tau);

}  // namespace walklab

#endif  // WALKLAB_MUSCLE_HPP_
