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

#include "walklab/contact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace walklab {

double normal_force(double penetration, double penetration_rate,
                    const ContactParams& p) {
  if (penetration <= 0.0) return 0.0;
  const double f = p.stiffness * std::pow(penetration, p.exponent) *
                   (1.0 + p.damping * penetration_rate);
  return std::max(0.0, f);
}

double friction_force(double normal, double tangential_velocity,
                      const ContactParams& p) {
  if (normal <= 0.0) return 0.0;
  const double vt = std::abs(tangential_velocity);
  if (vt == 0.0) return 0.0;
  const double s = vt / p.v_ref;
  // Dynamic plateau plus a static overshoot bump that peaks at s = 1 and
  // dies off at speed; stays below mu_static everywhere.
  const double mu = p.mu_dynamic * std::tanh(s) +
                    (p.mu_static - p.mu_dynamic) * s *
                        std::exp(0.5 * (1.0 - s * s));
  return mu * normal + p.mu_viscous * vt;
}

namespace {

// Contact of one sphere against the local terrain plane under its center.
Eigen::Vector2d sphere_terrain_force(const ContactSphere& sphere,
                                     const SphereState& st,
                                     const Terrain& terrain,
                                     const ContactParams& params) {
  double surface_y = 0.0;
  Eigen::Vector2d n;
  terrain.height_and_normal(st.center.x(), &surface_y, &n);
  const Eigen::Vector2d p0(st.center.x(), surface_y);
  const double dist = n.dot(st.center - p0);
  const double penetration = sphere.radius - dist;
  if (penetration <= 0.0) return Eigen::Vector2d::Zero();
  const double pen_rate = -n.dot(st.velocity);
  const double fn = normal_force(penetration, pen_rate, params);
  const Eigen::Vector2d t(n.y(), -n.x());
  const double vt = t.dot(st.velocity);
  const double ft = friction_force(fn, vt, params);
  const double dir = (vt > 0.0) ? -1.0 : 1.0;
  return fn * n + dir * ft * t;
}

}  // namespace

void resolve_contacts(const std::vector<ContactSphere>& spheres,
                      const std::vector<SphereState>& world,
                      const Terrain& terrain, const ContactParams& params,
                      int n_feet, std::vector<Eigen::Vector2d>* forces,
                      ContactReport* report) {
  if (spheres.size() != world.size()) {
    throw std::invalid_argument("resolve_contacts: sphere/state mismatch");
  }
  forces->assign(spheres.size(), Eigen::Vector2d::Zero());
  report->grf = Eigen::VectorXd::Zero(n_feet);
  report->self_collision = 0.0;

  for (std::size_t i = 0; i < spheres.size(); ++i) {
    const Eigen::Vector2d f =
        sphere_terrain_force(spheres[i], world[i], terrain, params);
    (*forces)[i] += f;
    if (spheres[i].foot >= 0 && spheres[i].foot < n_feet) {
      report->grf[spheres[i].foot] += f.y();
    }
  }
  for (int j = 0; j < n_feet; ++j) {
    report->grf[j] = std::max(0.0, report->grf[j]);
  }

  // Cross-leg sphere pairs: Hunt-Crossley along the center line, reported
  // only. Walking rewards ignore it; the running reward charges for it.
  for (std::size_t i = 0; i < spheres.size(); ++i) {
    if (spheres[i].collide_group < 0) continue;
    for (std::size_t j = i + 1; j < spheres.size(); ++j) {
      if (spheres[j].collide_group < 0 ||
          spheres[j].collide_group == spheres[i].collide_group) {
        continue;
      }
      const Eigen::Vector2d d = world[j].center - world[i].center;
      const double dist = d.norm();
      const double penetration = spheres[i].radius + spheres[j].radius - dist;
      if (penetration <= 0.0 || dist <= 1e-12) continue;
      const Eigen::Vector2d u = d / dist;
      const double pen_rate =
          -u.dot(world[j].velocity - world[i].velocity);
      report->self_collision += normal_force(penetration, pen_rate, params);
    }
  }
}

}  // namespace walklab
