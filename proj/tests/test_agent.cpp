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

#include "walklab/agent.hpp"

#include <cmath>
#include <vector>

#include <doctest/doctest.h>

#include "helpers.hpp"
#include "walklab/terrain.hpp"

namespace walklab {
namespace {

using testing::biped;

LearnerConfig tiny_learner() {
  LearnerConfig cfg;
  cfg.hidden_size = 16;
  cfg.hidden_layers = 1;
  cfg.batch_size = 16;
  cfg.buffer_capacity = 4096;
  return cfg;
}

EnvConfig quick_env() {
  EnvConfig cfg;
  cfg.substeps = 10;
  cfg.horizon = 40;
  return cfg;
}

TEST_SUITE("agent") {

TEST_CASE("actions stay inside the excitation range") {
  Rng rng(3);
  Agent agent(6, 4, 0.5, tiny_learner(), &rng);
  Rng draws(4);
  Eigen::VectorXf obs(6);
  for (int trial = 0; trial < 50; ++trial) {
    for (int i = 0; i < 6; ++i) {
      obs(i) = static_cast<float>(draws.uniform(-2.0, 2.0));
    }
    Eigen::VectorXd u = agent.act(obs);
    REQUIRE(u.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(u(i) >= 0.0);
      CHECK(u(i) <= 0.5);
    }
  }
  // Saturating noise pins the action to the clip bounds exactly.
  const Eigen::VectorXd big = Eigen::VectorXd::Constant(4, 10.0);
  const Eigen::VectorXd low = Eigen::VectorXd::Constant(4, -10.0);
  CHECK((agent.act(obs, &big).array() == 0.5).all());
  CHECK((agent.act(obs, &low).array() == 0.0).all());
}

TEST_CASE("the policy is a pure function of the observation") {
  Rng rng(5);
  Agent agent(6, 4, 0.5, tiny_learner(), &rng);
  Eigen::VectorXf obs = Eigen::VectorXf::LinSpaced(6, -1.0f, 1.0f);
  const Eigen::VectorXd a = agent.act(obs);
  const Eigen::VectorXd b = agent.act(obs);
  CHECK((a - b).norm() == 0.0);
  // Moderate noise shifts the pre-clip action additively.
  const Eigen::VectorXd n = Eigen::VectorXd::Constant(4, 0.01);
  const Eigen::VectorXd shifted = agent.act(obs, &n);
  for (int i = 0; i < 4; ++i) {
    const double expect = std::min(0.5, std::max(0.0, a(i) + 0.01));
    CHECK(shifted(i) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("one noise step from rest has the exact-discretization variance") {
  const int n = 200000;
  OuNoise ou;
  ou.reset(n);
  REQUIRE(ou.x.size() == n);
  REQUIRE(ou.x.norm() == 0.0);
  Rng rng(9);
  const double dt = 0.05, sigma = 0.1, tau = 0.1;
  ou.advance(dt, sigma, tau, &rng);
  const double mean = ou.x.mean();
  const double var = ou.x.squaredNorm() / n - mean * mean;
  // Starting at zero the one-step variance is sigma^2 (1 - exp(-2 dt/tau)).
  // An Euler step would give sigma^2 * 2 dt/tau = 0.01 instead, 58% higher.
  const double expect = sigma * sigma * (1.0 - std::exp(-2.0 * dt / tau));
  CHECK(std::abs(mean) < 1.5e-3);
  CHECK(var == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("the noise process is stationary and decorrelates at rate 1/tau") {
  const int dim = 8, steps = 50000, burn = 5000;
  const double dt = 0.01, sigma = 0.1, tau = 0.1;
  OuNoise ou;
  ou.reset(dim);
  Rng rng(12);
  double sum = 0.0, sum2 = 0.0, cross = 0.0;
  long n = 0;
  Eigen::VectorXd prev = ou.x;
  for (int k = 0; k < steps; ++k) {
    prev = ou.x;
    ou.advance(dt, sigma, tau, &rng);
    if (k >= burn) {
      sum += ou.x.sum();
      sum2 += ou.x.squaredNorm();
      cross += ou.x.dot(prev);
      n += dim;
    }
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double rho = (cross / n - mean * mean) / var;
  CHECK(std::abs(mean) < 0.005);
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
  CHECK(rho == doctest::Approx(std::exp(-dt / tau)).epsilon(0.012));
}

TEST_CASE("the critic regresses terminal transitions to their reward") {
  Rng rng(17);
  const int od = 5, ad = 2;
  LearnerConfig cfg = tiny_learner();
  cfg.lr_critic = 1e-2f;
  Agent agent(od, ad, 1.0, cfg, &rng);
  ReplayBuffer buf(128, od, ad);
  RewardBreakdown constant_one;
  constant_one.r_vel = 1.0;  // every other component zero: total is 1.0
  Rng fill(4);
  Eigen::VectorXf first_obs, first_act;
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXf obs(od), act(ad), next(od);
    for (int k = 0; k < od; ++k) obs(k) = static_cast<float>(fill.uniform());
    for (int k = 0; k < ad; ++k) act(k) = static_cast<float>(fill.uniform());
    for (int k = 0; k < od; ++k) next(k) = static_cast<float>(fill.uniform());
    if (i == 0) {
      first_obs = obs;
      first_act = act;
    }
    // done: the target is the reward itself, no bootstrap term.
    buf.add(obs, act, constant_one, next, true, i);
  }
  TrainStepMetrics last{};
  for (int it = 0; it < 400; ++it) {
    last = agent.train_step(buf, 0.7, &rng);
    REQUIRE(std::isfinite(last.critic_loss));
    REQUIRE(std::isfinite(last.actor_loss));
  }
  CHECK(last.critic_loss < 0.01);
  Eigen::MatrixXf sa(od + ad, 1);
  sa.col(0) << first_obs, first_act;
  const Eigen::MatrixXf& q = agent.critic1().forward(sa);
  CHECK(q(0, 0) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("evaluation is seed-deterministic and records one trace each") {
  Env env(biped(), Terrain::flat(), quick_env());
  Rng rng(21);
  Agent agent(env.obs_dim(), env.act_dim(), 0.5, tiny_learner(), &rng);
  std::vector<EpisodeTrace> t1, t2;
  const EvalStats s1 = evaluate(&env, &agent, 2, 100, 0.25, &t1);
  const EvalStats s2 = evaluate(&env, &agent, 2, 100, 0.25, &t2);
  CHECK(s1.episodes == 2);
  CHECK(s1.falls == s2.falls);
  CHECK(s1.mean_vx == s2.mean_vx);
  CHECK(s1.mean_distance == s2.mean_distance);
  CHECK(s1.mean_task_return == s2.mean_task_return);
  CHECK(s1.mean_total_return == s2.mean_total_return);
  CHECK(s1.mean_effort == s2.mean_effort);
  CHECK(std::isnan(s1.exp_match));
  REQUIRE(t1.size() == 2);
  REQUIRE(t2.size() == 2);
  for (int e = 0; e < 2; ++e) {
    const EpisodeTrace& a = t1[static_cast<std::size_t>(e)];
    const EpisodeTrace& b = t2[static_cast<std::size_t>(e)];
    REQUIRE(a.t.size() > 0);
    REQUIRE(a.t.size() == b.t.size());
    CHECK(a.q.size() == a.t.size());
    CHECK(a.qdot.size() == a.t.size());
    CHECK(a.a.size() == a.t.size());
    CHECK(a.u.size() == a.t.size());
    CHECK(a.grf.size() == a.t.size());
    CHECK(a.com_vx.size() == a.t.size());
    CHECK(a.com_x.size() == a.t.size());
    CHECK((a.q.back() - b.q.back()).norm() == 0.0);
    CHECK((a.u.back() - b.u.back()).norm() == 0.0);
    for (const Eigen::VectorXd& u : a.u) {
      CHECK(u.minCoeff() >= 0.0);
      CHECK(u.maxCoeff() <= 0.5);
    }
    for (const Eigen::VectorXd& g : a.grf) REQUIRE(g.size() == 2);
  }
  // The two episodes use distinct reset seeds.
  CHECK((t1[0].q.front() - t1[1].q.front()).norm() > 0.0);
}

TEST_CASE("a trace converts to a rollout on the gait-analysis axes") {
  Env env(biped(), Terrain::flat(), quick_env());
  Rng rng(23);
  Agent agent(env.obs_dim(), env.act_dim(), 0.5, tiny_learner(), &rng);
  std::vector<EpisodeTrace> traces;
  evaluate(&env, &agent, 1, 7, 0.0, &traces);
  REQUIRE(traces.size() == 1);
  const EpisodeTrace& trace = traces[0];
  const Rollout r = trace_to_rollout(trace, env);
  r.validate();
  const std::size_t n = trace.t.size();
  CHECK(r.dt == env.config().control_dt);
  CHECK(r.body_weight == doctest::Approx(biped().body_weight()).epsilon(1e-12));
  CHECK(r.samples() == n);
  const std::vector<int>& leg = env.leg_joints();
  for (std::size_t i = 0; i < n; i += 7) {
    CHECK(r.hip[0][i] == trace.q[i](leg[0]));
    CHECK(r.knee[0][i] == trace.q[i](leg[1]));
    CHECK(r.ankle[0][i] == trace.q[i](leg[2]));
    CHECK(r.hip[1][i] == trace.q[i](leg[3]));
    CHECK(r.grf[0][i] == trace.grf[i](0));
    CHECK(r.grf[1][i] == trace.grf[i](1));
    CHECK(r.com_x[i] == trace.com_x[i]);
    CHECK((r.activations.col(static_cast<Eigen::Index>(i)) - trace.a[i])
              .norm() == 0.0);
  }
}

TEST_CASE("the trainer emits one row per episode and counts env steps") {
  LearnerConfig lc = tiny_learner();
  lc.n_parallel = 1;
  lc.steps_before_batches = 1 << 30;  // no gradient updates in this test
  TrainerOptions opt;
  opt.seed = 5;
  opt.max_episodes = 3;
  Trainer trainer(biped(), Terrain::flat(), quick_env(), lc, AdaptConfig{},
                  opt);
  std::vector<EpisodeRow> rows;
  std::vector<StepLogRow> steps;
  const TrainResult res = trainer.run(
      [&rows](const EpisodeRow& r) { rows.push_back(r); },
      [&steps](const StepLogRow& s) { steps.push_back(s); });
  CHECK(res.episodes == 3);
  REQUIRE(rows.size() == 3);
  CHECK(res.eval_success == false);
  std::int64_t step_sum = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].episode == static_cast<std::int64_t>(i));
    CHECK(rows[i].steps >= 1);
    CHECK(rows[i].steps <= 40);
    CHECK(rows[i].task_return > 0.0);  // the velocity term is positive
    CHECK(std::isfinite(rows[i].total_return));
    CHECK(rows[i].alpha == 0.0);  // returns stay far below the gate
    CHECK(rows[i].r_mean > 0.0);
    step_sum += rows[i].steps;
  }
  CHECK(res.env_steps == step_sum);
  CHECK(static_cast<std::int64_t>(steps.size()) == step_sum);
  int ends = 0;
  for (const StepLogRow& s : steps) {
    CHECK(s.alpha == 0.0);
    if (s.done || s.truncated) ++ends;
  }
  CHECK(ends == 3);
  CHECK(trainer.env_steps() == res.env_steps);
  CHECK(trainer.episodes() == 3);
  CHECK(trainer.next_episode_id() == 3);
}

}  // TEST_SUITE

}  // namespace
}  // namespace walklab
