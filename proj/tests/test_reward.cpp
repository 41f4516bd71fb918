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

#include "walklab/reward.hpp"

#include <cmath>

#include <doctest/doctest.h>

#include "walklab/rng.hpp"

namespace walklab {
namespace {

TEST_SUITE("reward") {

TEST_CASE("velocity reward is a gaussian below target and capped above") {
  CHECK(velocity_reward(0.2, 1.2) == doctest::Approx(std::exp(-1.0))
                                         .epsilon(1e-14));
  CHECK(velocity_reward(1.2, 1.2) == 1.0);
  CHECK(velocity_reward(2.0, 1.2) == 1.0);
  CHECK(velocity_reward(5.0, 1.2) == 1.0);
  CHECK(velocity_reward(-1.0, 1.2) ==
        doctest::Approx(std::exp(-2.2 * 2.2)).epsilon(1e-14));
  // Monotone approach from below.
  double prev = 0.0;
  for (double v = -1.0; v < 1.2; v += 0.05) {
    double r = velocity_reward(v, 1.2);
    REQUIRE(r >= prev);
    REQUIRE(r <= 1.0);
    prev = r;
  }
}

TEST_CASE("active muscle count is strictly above the threshold") {
  Eigen::VectorXd a(3);
  a << 0.2, 0.1, 0.16;
  CHECK(count_active(a, 0.15) == 2);
  Eigen::VectorXd boundary(1);
  boundary << 0.15;
  CHECK(count_active(boundary, 0.15) == 0);
  CHECK(count_active(Eigen::VectorXd::Zero(5), 0.15) == 0);
  CHECK(count_active(Eigen::VectorXd::Ones(5), 0.15) == 5);
}

TEST_CASE("cubic activity of a uniform half activation is 0.125") {
  RewardWeights w;
  RewardBreakdown b;
  Eigen::VectorXd a = Eigen::VectorXd::Constant(18, 0.5);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(18);
  effort_cost(a, u, u, 0.0, w, &b);
  CHECK(b.effort_activity == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("effort cost decomposes into activity, smoothness and count") {
  RewardWeights w;
  RewardBreakdown b;
  Eigen::VectorXd a(2), u(2), up(2);
  a << 0.5, 0.5;
  u << 0.3, 0.4;
  up << 0.1, 0.1;
  const double alpha = 0.1;
  double cost = effort_cost(a, u, up, alpha, w, &b);
  CHECK(b.effort_activity == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(b.effort_smooth ==
        doctest::Approx(0.097 * (0.04 + 0.09)).epsilon(1e-12));
  CHECK(b.effort_nactive == doctest::Approx(1.579 * 1.0).epsilon(1e-15));
  CHECK(cost == doctest::Approx(alpha * b.effort_activity + b.effort_smooth +
                                b.effort_nactive)
                    .epsilon(1e-15));
}

TEST_CASE("effort cost rejects mismatched vector lengths") {
  RewardWeights w;
  RewardBreakdown b;
  Eigen::VectorXd a(3), u(2);
  a.setZero();
  u.setZero();
  CHECK_THROWS_AS(effort_cost(a, u, u, 0.0, w, &b), std::invalid_argument);
}

TEST_CASE("pain cost charges limit torque sums and GRF excess") {
  RewardWeights w;
  RewardBreakdown b;
  Eigen::VectorXd tau(2);
  tau << 1.0, 2.0;
  const double bw = 736.0;
  Eigen::VectorXd grf(2);
  grf << 1.5 * bw, 0.0;
  double cost = pain_cost(tau, grf, bw, w, &b);
  CHECK(b.pain_limits == doctest::Approx(0.131 * 3.0).epsilon(1e-12));
  CHECK(b.pain_grf == doctest::Approx(0.073 * 0.3).epsilon(1e-9));
  CHECK(cost == doctest::Approx(b.pain_limits + b.pain_grf).epsilon(1e-15));
}

TEST_CASE("GRF below the threshold causes no pain") {
  RewardWeights w;
  RewardBreakdown b;
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd grf(2);
  grf << 500.0, 200.0;  // about 0.95 BW total, each below 1.2 BW
  double cost = pain_cost(tau, grf, 736.0, w, &b);
  CHECK(cost == 0.0);
  CHECK(b.pain_grf == 0.0);
  // Negative torques count by magnitude.
  tau << -2.0, 0.5;
  pain_cost(tau, grf, 736.0, w, &b);
  CHECK(b.pain_limits == doctest::Approx(0.131 * 2.5).epsilon(1e-12));
}

TEST_CASE("total reward recomposition matches its parts") {
  RewardBreakdown b;
  b.r_vel = 0.8;
  b.effort_activity = 0.125;
  b.effort_smooth = 0.01;
  b.effort_nactive = 0.3;
  b.pain_limits = 0.05;
  b.pain_grf = 0.02;
  double alpha = 0.37;
  double expected =
      0.8 - (alpha * 0.125 + 0.01 + 0.3) - (0.05 + 0.02);
  CHECK(total_reward(b, alpha) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(total_reward(b, 0.0) >
        total_reward(b, 1.0));  // alpha only ever subtracts
}

TEST_CASE("total reward never exceeds one") {
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    RewardBreakdown b;
    b.r_vel = velocity_reward(rng.uniform(-3.0, 5.0), 1.2);
    b.effort_activity = rng.uniform();
    b.effort_smooth = rng.uniform(0.0, 2.0);
    b.effort_nactive = rng.uniform(0.0, 2.0);
    b.pain_limits = rng.uniform(0.0, 10.0);
    b.pain_grf = rng.uniform(0.0, 3.0);
    REQUIRE(total_reward(b, rng.uniform()) <= 1.0);
  }
}

TEST_CASE("running reward is velocity minus scaled self-collision") {
  const double bw = 736.0;
  CHECK(running_reward(3.0, 0.5 * bw, bw, 1.0) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK(running_reward(3.0, 0.5 * bw, bw, 0.0) == 3.0);
  CHECK(running_reward(-1.0, 0.0, bw, 1.0) == -1.0);  // uncapped, can be < 0
  CHECK(running_reward(10.0, 0.0, bw, 1.0) == 10.0);  // uncapped above
}

}  // TEST_SUITE

}  // namespace
}  // namespace walklab
