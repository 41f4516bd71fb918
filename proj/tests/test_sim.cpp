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

#include <cmath>

#include <doctest/doctest.h>

#include "helpers.hpp"
#include "walklab/common.hpp"
#include "walklab/model.hpp"

namespace walklab {
namespace {

using testing::biped;
using testing::double_pendulum_text;
using testing::puck_text;

TEST_SUITE("sim") {

TEST_CASE("passive double pendulum conserves energy to under one percent") {
  ModelSpec m = load_model(double_pendulum_text());
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.q << 1.8, 0.6;  // lifted well away from rest so |E| is O(10 J)

  const double e0 = sim.dynamics().total_energy(s.q, s.qdot, true);
  REQUIRE(std::abs(e0) > 1.0);

  const double dt = 1e-4;
  Eigen::VectorXd u(0);
  StepReport report;
  for (int i = 0; i < 100000; ++i) sim.step(&s, u, dt, &report);

  const double e1 = sim.dynamics().total_energy(s.q, s.qdot, true);
  CHECK(std::abs(e1 - e0) < 0.01 * std::abs(e0));
  CHECK(s.t == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("airborne biped conserves linear momentum without gravity") {
  ModelSpec m = biped();
  m.gravity = 1e-300;  // parser forbids zero; dynamics treats this as none
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.q(1) = 5.0;  // far above the ground, no contact possible
  s.q(3) = 0.4;
  s.q(4) = -0.7;
  s.q(6) = -0.2;
  s.qdot(0) = 0.8;
  s.qdot(2) = 1.5;
  s.qdot(5) = -2.0;

  Eigen::Vector2d p0 = sim.dynamics().linear_momentum(s.q, s.qdot);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(18);
  StepReport report;
  for (int i = 0; i < 10000; ++i) sim.step(&s, u, 1e-4, &report);
  Eigen::Vector2d p1 = sim.dynamics().linear_momentum(s.q, s.qdot);

  CHECK((p1 - p0).norm() < 1e-8 * (1.0 + p0.norm()));
  CHECK(report.grf.isZero());
}

TEST_CASE("dropped puck settles with its weight on the ground") {
  ModelSpec m = load_model(puck_text());
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.q(1) = 0.12;  // sphere radius 0.1: 2 cm free fall

  Eigen::VectorXd u(0);
  StepReport report;
  const double dt = 1e-4;
  double grf_acc = 0.0;
  int grf_n = 0;
  for (int i = 0; i < 20000; ++i) {  // 2 s
    sim.step(&s, u, dt, &report);
    if (s.t > 1.0) {
      grf_acc += report.grf.sum();
      grf_n++;
    }
  }
  const double weight = 10.0 * 9.81;
  CHECK(grf_acc / grf_n == doctest::Approx(weight).epsilon(0.01));
  // At rest the instantaneous force matches too.
  CHECK(report.grf(0) == doctest::Approx(weight).epsilon(0.01));
  CHECK(std::abs(s.qdot(1)) < 1e-4);
}

TEST_CASE("standing biped carries body weight within one percent") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.q(1) = sim.standing_pelvis_height();

  Eigen::VectorXd u = Eigen::VectorXd::Zero(18);
  StepReport report;
  const double dt = 1e-4;
  double grf_acc = 0.0;
  int grf_n = 0;
  for (int i = 0; i < 10000; ++i) {  // 1 s
    sim.step(&s, u, dt, &report);
    if (s.t > 0.5) {
      grf_acc += report.grf.sum();
      grf_n++;
    }
  }
  CHECK(grf_acc / grf_n == doctest::Approx(m.body_weight()).epsilon(0.01));
  REQUIRE(report.grf.size() == 2);
  CHECK(report.grf(0) > 0.0);
  CHECK(report.grf(1) > 0.0);
}

TEST_CASE("standing height rests the foot spheres on flat ground") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  // Sphere centers at standing height: pelvis_y + (-0.07 - 0.424 - 0.435
  // - 0.055) = sphere offset y; bottom touches y = 0 exactly.
  double h = sim.standing_pelvis_height();
  CHECK(h == doctest::Approx(0.07 + 0.424 + 0.435 + 0.055 + 0.030)
                 .epsilon(1e-12));
}

TEST_CASE("joint limit torque is a one-sided spring-damper") {
  JointLimit lim;
  lim.present = true;
  lim.lower = -0.5;
  lim.upper = 0.4;
  lim.stiffness = 50.0;
  lim.damping = 2.0;

  CHECK(Sim::joint_limit_torque(0.0, 0.0, lim) == 0.0);
  CHECK(Sim::joint_limit_torque(0.39, 5.0, lim) == 0.0);  // inside: free
  // 0.1 rad beyond the upper limit pushes back with k * excess.
  CHECK(Sim::joint_limit_torque(0.5, 0.0, lim) ==
        doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(Sim::joint_limit_torque(-0.6, 0.0, lim) ==
        doctest::Approx(5.0).epsilon(1e-12));
  // Damping deepens the push while still moving outward.
  CHECK(Sim::joint_limit_torque(0.5, 1.0, lim) < -5.0);
  // Damping never flips the restoring sign on the way back in.
  CHECK(Sim::joint_limit_torque(0.5, -100.0, lim) <= 0.0);
  CHECK(Sim::joint_limit_torque(-0.6, 100.0, lim) >= 0.0);
}

TEST_CASE("limit torques enter the report for limited joints only") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.q(1) = 5.0;           // airborne, contact out of the picture
  s.q(4) = 1.0;           // knee_l far beyond its 0.035 rad upper limit
  Eigen::VectorXd u = Eigen::VectorXd::Zero(18);
  StepReport report;
  sim.report_at(s, &report);
  REQUIRE(report.joint_limit_torques.size() == 6);
  // Order follows the model's limited-joint list: hip_l knee_l ankle_l ...
  CHECK(report.joint_limit_torques(1) > 0.0);  // magnitudes
  CHECK(report.joint_limit_torques(0) == 0.0);
  CHECK(report.joint_limit_torques(3) == 0.0);
}

TEST_CASE("excitations drive activations toward themselves") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.q(1) = 5.0;
  Eigen::VectorXd u = Eigen::VectorXd::Constant(18, 0.7);
  StepReport report;
  for (int i = 0; i < 2000; ++i) sim.step(&s, u, 1e-4, &report);  // 0.2 s
  for (int i = 0; i < 18; ++i) {
    REQUIRE(s.a(i) == doctest::Approx(0.7).epsilon(1e-6));
  }
}

TEST_CASE("reset produces a seeded stance-and-swing pose") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  SimState a = sim.reset(42);
  SimState b = sim.reset(42);
  SimState c = sim.reset(43);

  CHECK((a.q - b.q).norm() == 0.0);
  CHECK((a.qdot - b.qdot).norm() == 0.0);
  CHECK((a.q - c.q).norm() > 0.0);
  CHECK(a.a.isZero());
  CHECK(a.t == 0.0);

  // One leg is swung forward, exactly one.
  double hip_l = a.q(3), hip_r = a.q(6);
  bool left_swings = hip_l > 0.3;
  bool right_swings = hip_r > 0.3;
  CHECK(left_swings != right_swings);

  // The swing foot clears the ground; the stance foot nearly touches.
  StepReport report;
  sim.report_at(a, &report);
  CHECK(report.grf.isZero());  // nothing penetrates at the start
}

TEST_CASE("reset keeps the swing foot clear across seeds") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  Dynamics dyn(m);
  std::vector<LinkFrame> frames;
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    SimState s = sim.reset(seed);
    dyn.kinematics(s.q, s.qdot, &frames);
    double lowest[2] = {1e9, 1e9};
    for (const auto& sp : m.spheres) {
      Eigen::Vector2d c, v;
      Dynamics::point_state(frames[sp.link], sp.offset, &c, &v);
      lowest[sp.foot] = std::min(lowest[sp.foot], c.y() - sp.radius);
    }
    bool left_swings = s.q(3) > 0.3;
    int swing = left_swings ? 0 : 1;
    int stance = 1 - swing;
    REQUIRE(lowest[swing] >= 0.05);          // clearance floor
    REQUIRE(lowest[stance] >= 0.0);          // never starts in contact
    REQUIRE(lowest[stance] <= 0.02);         // but close to touching
  }
}

TEST_CASE("divergence raises instead of spreading NaNs") {
  ModelSpec m = load_model(double_pendulum_text());
  Sim sim(m, Terrain::flat());
  SimState s = sim.make_state();
  s.qdot << 1e6, -1e6;  // far beyond the qdot bound after one step
  Eigen::VectorXd u(0);
  StepReport report;
  CHECK_THROWS_AS(
      {
        for (int i = 0; i < 1000; ++i) sim.step(&s, u, 1e-2, &report);
      },
      DivergenceError);
}

TEST_CASE("report_at matches the report of a zero-length horizon") {
  const ModelSpec& m = biped();
  Sim sim(m, Terrain::flat());
  SimState s = sim.reset(7);
  StepReport r1, r2;
  sim.report_at(s, &r1);
  sim.report_at(s, &r2);  // no hidden state: identical twice
  CHECK((r1.grf - r2.grf).norm() == 0.0);
  CHECK((r1.com - r2.com).norm() == 0.0);
  CHECK(r1.com_vx == r2.com_vx);
}

}  // TEST_SUITE

}  // namespace
}  // namespace walklab
