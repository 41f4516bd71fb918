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

#include "walklab/muscle.hpp"

#include <algorithm>
#include <cmath>

namespace walklab {
namespace {

constexpr double kForceLengthWidth = 0.45;
constexpr double kPassiveStrainAtOne = 0.6;
constexpr double kPassiveExponent = 4.0;
constexpr double kMinFiberLength = 1e-4;  // m

}  // namespace

double activation_step(double a, double u, double dt, double tau_act,
                       double tau_deact) {
  const double tau = (u > a) ? tau_act : tau_deact;
  const double next = a + (u - a) * (1.0 - std::exp(-dt / tau));
  return std::clamp(next, 0.0, 1.0);
}

double force_length(double l_norm) {
  const double d = (l_norm - 1.0) / kForceLengthWidth;
  return std::exp(-d * d);
}

double force_velocity(double v_norm) {
  // s is the shortening rate: positive when the fiber shortens.
  const double s = -v_norm;
  if (s >= 0.0) {
    return std::max(0.0, (1.0 - s) / (1.0 + 4.0 * s));
  }
  const double w = -s;  // lengthening rate
  return 1.5 - 0.5 / (1.0 + 10.0 * w);
}

double passive_force(double l_norm) {
  if (l_norm <= 1.0) return 0.0;
  const double strain = (l_norm - 1.0) / kPassiveStrainAtOne;
  return (std::exp(kPassiveExponent * strain) - 1.0) /
         (std::exp(kPassiveExponent) - 1.0);
}

double musculotendon_length(const MuscleParams& p, const Eigen::VectorXd& q) {
  double l = p.l_ref;
  for (const MuscleAttachment& at : p.attachments) {
    l -= at.arm * (q[at.joint] - at.q_ref);
  }
  return l;
}

double musculotendon_velocity(const MuscleParams& p,
                              const Eigen::VectorXd& qdot) {
  double v = 0.0;
  for (const MuscleAttachment& at : p.attachments) {
    v -= at.arm * qdot[at.joint];
  }
  return v;
}

MuscleSignals muscle_force(const MuscleParams& p, double a,
                           const Eigen::VectorXd& q,
                           const Eigen::VectorXd& qdot) {
  MuscleSignals s;
  s.l_mt = musculotendon_length(p, q);
  s.v_mt = musculotendon_velocity(p, qdot);
  // Rigid tendon: the fiber absorbs all length change.
  double l_fiber = s.l_mt - p.tendon_slack;
  if (l_fiber < kMinFiberLength) {
    l_fiber = kMinFiberLength;
    s.fiber_clamped = true;
  }
  s.l_norm = l_fiber / p.l_opt;
  s.v_norm = s.v_mt / (p.v_max * p.l_opt);
  s.f_l = force_length(s.l_norm);
  s.f_v = force_velocity(s.v_norm);
  s.f_p = passive_force(s.l_norm);
  s.force = std::max(0.0, p.f_max * (a * s.f_l * s.f_v + s.f_p));
  return s;
}

void add_joint_torques(const MuscleParams& p, double force,
                       Eigen::VectorXd* tau) {
  for (const MuscleAttachment& at : p.attachments) {
    (*tau)[at.joint] += at.arm * force;
  }
}

}  // namespace walklab
