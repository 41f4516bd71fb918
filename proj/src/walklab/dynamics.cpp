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

#include "walklab/dynamics.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace walklab {

Dynamics::Dynamics(const ModelSpec& model)
    : model_(&model), dof_(model.dof()) {
  frames_.resize(model.links.size());
  f_acc_.resize(model.links.size());
  n_acc_.resize(model.links.size());
  ext_force_.resize(model.links.size());
  ext_torque_.resize(model.links.size());
}

void Dynamics::sweep(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                     const Eigen::VectorXd& qddot,
                     std::vector<LinkFrame>* frames) const {
  const std::size_t n = model_->links.size();
  frames->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Joint& joint = model_->joints[i];
    LinkFrame& f = (*frames)[i];
    LinkFrame parent;  // world frame: identity, at rest
    if (joint.parent_link >= 0) {
      parent = (*frames)[static_cast<std::size_t>(joint.parent_link)];
    }
    const double cp = std::cos(parent.angle);
    const double sp = std::sin(parent.angle);
    const Eigen::Vector2d anchor_w(
        cp * joint.anchor.x() - sp * joint.anchor.y(),
        sp * joint.anchor.x() + cp * joint.anchor.y());
    const Eigen::Vector2d o = parent.origin + anchor_w;
    const Eigen::Vector2d r = o - parent.origin;
    // Rigid transport of the anchor point on the parent.
    const Eigen::Vector2d v_anchor = parent.v + parent.omega * perp(r);
    const Eigen::Vector2d a_anchor = parent.a + parent.alpha * perp(r) -
                                     parent.omega * parent.omega * r;
    if (joint.type == JointType::kRevolute) {
      f.angle = parent.angle + q[static_cast<Eigen::Index>(i)];
      f.origin = o;
      f.omega = parent.omega + qdot[static_cast<Eigen::Index>(i)];
      f.alpha = parent.alpha + qddot[static_cast<Eigen::Index>(i)];
      f.v = v_anchor;
      f.a = a_anchor;
      f.axis_w = {0.0, 0.0};
    } else {
      const Eigen::Vector2d axis_local =
          (joint.type == JointType::kPrismaticX) ? Eigen::Vector2d(1.0, 0.0)
                                                 : Eigen::Vector2d(0.0, 1.0);
      const Eigen::Vector2d axis_w(
          cp * axis_local.x() - sp * axis_local.y(),
          sp * axis_local.x() + cp * axis_local.y());
      const double qi = q[static_cast<Eigen::Index>(i)];
      const double qdi = qdot[static_cast<Eigen::Index>(i)];
      const double qddi = qddot[static_cast<Eigen::Index>(i)];
      f.angle = parent.angle;
      f.omega = parent.omega;
      f.alpha = parent.alpha;
      f.origin = o + qi * axis_w;
      const Eigen::Vector2d rr = f.origin - parent.origin;
      f.v = parent.v + parent.omega * perp(rr) + qdi * axis_w;
      f.a = parent.a + parent.alpha * perp(rr) -
            parent.omega * parent.omega * rr +
            2.0 * parent.omega * qdi * perp(axis_w) + qddi * axis_w;
      f.axis_w = axis_w;
    }
    const double ci = std::cos(f.angle);
    const double si = std::sin(f.angle);
    const Link& link = model_->links[i];
    const Eigen::Vector2d com_w(ci * link.com.x() - si * link.com.y(),
                                si * link.com.x() + ci * link.com.y());
    f.com = f.origin + com_w;
    f.v_com = f.v + f.omega * perp(com_w);
    f.a_com = f.a + f.alpha * perp(com_w) - f.omega * f.omega * com_w;
  }
}

void Dynamics::kinematics(const Eigen::VectorXd& q,
                          const Eigen::VectorXd& qdot,
                          std::vector<LinkFrame>* frames) const {
  sweep(q, qdot, Eigen::VectorXd::Zero(dof_), frames);
}

void Dynamics::point_state(const LinkFrame& f, const Eigen::Vector2d& local,
                           Eigen::Vector2d* pos, Eigen::Vector2d* vel) {
  const double c = std::cos(f.angle);
  const double s = std::sin(f.angle);
  const Eigen::Vector2d r(c * local.x() - s * local.y(),
                          s * local.x() + c * local.y());
  *pos = f.origin + r;
  *vel = f.v + f.omega * perp(r);
}

Eigen::VectorXd Dynamics::inverse_dynamics(const Eigen::VectorXd& q,
                                           const Eigen::VectorXd& qdot,
                                           const Eigen::VectorXd& qddot,
                                           bool gravity_on,
                                           const ExternalForces& ext) {
  sweep(q, qdot, qddot, &frames_);
  const std::size_t n = model_->links.size();
  for (std::size_t i = 0; i < n; ++i) {
    f_acc_[i].setZero();
    n_acc_[i] = 0.0;
    ext_force_[i].setZero();
    ext_torque_[i] = 0.0;
  }
  for (const ExternalForces::Wrench& w : ext.wrenches) {
    const std::size_t i = static_cast<std::size_t>(w.link);
    ext_force_[i] += w.force;
    ext_torque_[i] += cross2(w.point - frames_[i].com, w.force);
  }
  const Eigen::Vector2d g =
      gravity_on ? Eigen::Vector2d(0.0, -model_->gravity)
                 : Eigen::Vector2d(0.0, 0.0);
  Eigen::VectorXd tau(dof_);
  for (std::size_t ii = n; ii-- > 0;) {
    const Link& link = model_->links[ii];
    const LinkFrame& f = frames_[ii];
    // Joint reaction on this link from its parent.
    const Eigen::Vector2d fi =
        link.mass * f.a_com - link.mass * g - ext_force_[ii] + f_acc_[ii];
    const double ni = link.inertia * f.alpha - cross2(f.origin - f.com, fi) -
                      ext_torque_[ii] + n_acc_[ii];
    const Joint& joint = model_->joints[ii];
    tau[static_cast<Eigen::Index>(ii)] =
        (joint.type == JointType::kRevolute) ? ni : f.axis_w.dot(fi);
    if (joint.parent_link >= 0) {
      const std::size_t p = static_cast<std::size_t>(joint.parent_link);
      f_acc_[p] += fi;
      n_acc_[p] += ni + cross2(f.origin - frames_[p].com, fi);
    }
  }
  return tau;
}

Eigen::MatrixXd Dynamics::mass_matrix(const Eigen::VectorXd& q) {
  Eigen::MatrixXd m(dof_, dof_);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dof_);
  const ExternalForces none;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(dof_);
  for (int j = 0; j < dof_; ++j) {
    unit[j] = 1.0;
    m.col(j) = inverse_dynamics(q, zero, unit, /*gravity_on=*/false, none);
    unit[j] = 0.0;
  }
  return m;
}

Eigen::VectorXd Dynamics::forward_dynamics(const Eigen::VectorXd& q,
                                           const Eigen::VectorXd& qdot,
                                           const Eigen::VectorXd& tau,
                                           const ExternalForces& ext,
                                           bool gravity_on) {
  const Eigen::VectorXd bias = inverse_dynamics(
      q, qdot, Eigen::VectorXd::Zero(dof_), gravity_on, ext);
  const Eigen::MatrixXd m = mass_matrix(q);
  return m.ldlt().solve(tau - bias);
}

double Dynamics::total_energy(const Eigen::VectorXd& q,
                              const Eigen::VectorXd& qdot,
                              bool include_gravity) const {
  std::vector<LinkFrame> frames;
  kinematics(q, qdot, &frames);
  double e = 0.0;
  for (std::size_t i = 0; i < model_->links.size(); ++i) {
    const Link& link = model_->links[i];
    const LinkFrame& f = frames[i];
    e += 0.5 * link.mass * f.v_com.squaredNorm() +
         0.5 * link.inertia * f.omega * f.omega;
    if (include_gravity) e += link.mass * model_->gravity * f.com.y();
  }
  return e;
}

Eigen::Vector2d Dynamics::linear_momentum(const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& qdot) const {
  std::vector<LinkFrame> frames;
  kinematics(q, qdot, &frames);
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < model_->links.size(); ++i) {
    p += model_->links[i].mass * frames[i].v_com;
  }
  return p;
}

Eigen::Vector2d Dynamics::com_position(const Eigen::VectorXd& q) const {
  std::vector<LinkFrame> frames;
  kinematics(q, Eigen::VectorXd::Zero(dof_), &frames);
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  double mass = 0.0;
  for (std::size_t i = 0; i < model_->links.size(); ++i) {
    c += model_->links[i].mass * frames[i].com;
    mass += model_->links[i].mass;
  }
  return c / mass;
}

Eigen::Vector2d Dynamics::com_velocity(const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& qdot) const {
  std::vector<LinkFrame> frames;
  kinematics(q, qdot, &frames);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  double mass = 0.0;
  for (std::size_t i = 0; i < model_->links.size(); ++i) {
    v += model_->links[i].mass * frames[i].v_com;
    mass += model_->links[i].mass;
  }
  return v / mass;
}

}  // namespace walklab
