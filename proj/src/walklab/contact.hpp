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

// Compliant sphere contact. Normal force follows the Hunt-Crossley law
// (Hertz stiffness with penetration-rate damping); tangential force is a
// regularized static/dynamic/viscous friction curve, smooth in slip speed.
// Sphere-vs-sphere contact between the two legs is evaluated and reported
// but not fed back into the dynamics: a planar model must let its legs
// pass through each other to swing, so leg overlap only costs reward.

#ifndef WALKLAB_CONTACT_HPP_
#define WALKLAB_CONTACT_HPP_

#include <vector>

#include <Eigen/Core>

#include "walklab/terrain.hpp"

namespace walklab {

struct ContactSphere {
  int link = -1;                            // body the sphere rides on
  Eigen::Vector2d offset{0.0, 0.0};         // center in the body frame
  double radius = 0.0;
  int foot = -1;           // GRF aggregation slot, -1 for non-foot spheres
  int collide_group = -1;  // leg id for self-collision pairs, -1 = skip
};

struct ContactParams {
  double stiffness = 2e6;   // N / m^exponent
  double exponent = 1.5;    // Hertz exponent
  double damping = 1.0;     // s/m, penetration-rate factor
  double mu_static = 0.9;
  double mu_dynamic = 0.8;
  double mu_viscous = 0.5;  // N·s/m
  double v_ref = 0.05;      // m/s, slip speed scale of the friction curve
};

// World-frame kinematic state of one sphere center.
struct SphereState {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d velocity{0.0, 0.0};
};

struct ContactReport {
  // Per-foot vertical ground reaction force, N, clamped at zero.
  Eigen::VectorXd grf;
  // Sum of sphere-sphere normal force magnitudes between the legs, N.
  double self_collision = 0.0;
};

// k·δ^n·(1 + c·δ̇), zero when δ ≤ 0 and clamped so rebound damping never
// turns the contact adhesive.
double normal_force(double penetration, double penetration_rate,
                    const ContactParams& p);

// Magnitude of the tangential force at slip speed |v_t| under load `normal`.
// Zero at zero load or zero slip; peaks near mu_static·normal at slip speeds
// around v_ref, relaxes to mu_dynamic·normal, plus a viscous mu_viscous·|v_t|
// term. The returned value is non-negative; callers apply it against the
// slip direction.
double friction_force(double normal, double tangential_velocity,
                      const ContactParams& p);

// Evaluates every sphere against the terrain and every cross-leg sphere pair
// against each other. world[i] must be the current state of spheres[i].
// Writes the world-frame force acting on each sphere (zero when separated)
// and fills the report with n_feet GRF slots.
void resolve_contacts(const std::vector<ContactSphere>& spheres,
                      const std::vector<SphereState>& world,
                      const Terrain& terrain, const ContactParams& params,
                      int n_feet, std::vector<Eigen::Vector2d>* forces,
                      ContactReport* report);

}  // namespace walklab

#endif  // WALKLAB_CONTACT_HPP_
