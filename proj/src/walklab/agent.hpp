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

// Off-policy actor-critic learner and the training loop around it. The
// reference algorithm is deterministic-policy-gradient with twin critics,
// target networks, and target-action smoothing; exploration adds
// Ornstein-Uhlenbeck noise per muscle before clipping to the excitation
// range. Rewards enter training only through replay relabeling at the
// current effort weight, which itself is adapted once per episode from the
// episode's task return.

#ifndef WALKLAB_AGENT_HPP_
#define WALKLAB_AGENT_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "walklab/adapt.hpp"
#include "walklab/env.hpp"
#include "walklab/gait.hpp"
#include "walklab/nets.hpp"
#include "walklab/replay.hpp"
#include "walklab/rng.hpp"

namespace walklab {

struct LearnerConfig {
  int hidden_size = 256;
  int hidden_layers = 2;
  float lr_actor = 3e-4f;
  float lr_critic = 3e-4f;
  float gamma = 0.99f;
  float target_tau = 0.005f;
  int batch_size = 256;
  std::int64_t steps_before_batches = 200000;
  int steps_between_batches = 1000;
  int number_of_batches = 30;
  int n_parallel = 20;
  std::size_t buffer_capacity = 1000000;
  double ou_sigma = 0.1;       // excitation units
  double ou_tau = 0.1;         // s, noise correlation time
  float smooth_sigma = 0.1f;   // target smoothing noise, fraction of u_max
  float smooth_clip = 0.25f;   // clip of that noise, fraction of u_max
};

// Ornstein-Uhlenbeck state, advanced with the exact discretization so the
// process statistics do not depend on the control rate.
struct OuNoise {
  Eigen::VectorXd x;
  void reset(int dim) { x = Eigen::VectorXd::Zero(dim); }
  void advance(double dt, double sigma, double tau_c, Rng* rng);
};

struct TrainStepMetrics {
  float critic_loss = 0.0f;
  float actor_loss = 0.0f;
};

class Agent {
 public:
  Agent(int obs_dim, int act_dim, double u_max, const LearnerConfig& cfg,
        Rng* rng);

  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }
  double u_max() const { return u_max_; }
  const LearnerConfig& config() const { return cfg_; }

  // Policy action clipped to [0, u_max]. When noise is non-null its value
  // (already advanced by the caller) is added before clipping.
  Eigen::VectorXd act(const Eigen::VectorXf& obs,
                      const Eigen::VectorXd* noise = nullptr);

  // One critic update (clipped double-Q target with smoothed target
  // actions) and one actor update, then soft target updates. Throws on a
  // non-finite loss.
  TrainStepMetrics train_step(const ReplayBuffer& buffer, double alpha,
                              Rng* rng);

  // Checkpoint access.
  Mlp& actor() { return actor_; }
  Mlp& actor_target() { return actor_target_; }
  Mlp& critic1() { return q1_; }
  Mlp& critic2() { return q2_; }
  Mlp& critic1_target() { return q1t_; }
  Mlp& critic2_target() { return q2t_; }
  Adam& actor_opt() { return opt_actor_; }
  Adam& critic1_opt() { return opt_q1_; }
  Adam& critic2_opt() { return opt_q2_; }

 private:
  int obs_dim_, act_dim_;
  double u_max_;
  LearnerConfig cfg_;
  Mlp actor_, actor_target_;
  Mlp q1_, q2_, q1t_, q2t_;
  Adam opt_actor_, opt_q1_, opt_q2_;
  // Batch scratch.
  ReplayBatch batch_;
  Eigen::MatrixXf sa_, sa_next_, noise_mat_;
  Eigen::VectorXf target_;
};

// One line of the training metrics log.
struct EpisodeRow {
  std::int64_t episode = 0;
  int steps = 0;
  double task_return = 0.0;
  double total_return = 0.0;
  double mean_effort = 0.0;  // episode mean of mean(a^3)
  double alpha = 0.0;
  double r_mean = 0.0;
  double exp_match = std::numeric_limits<double>::quiet_NaN();
};

// Per-control-step trace of an episode, enough to run gait analysis and to
// replay what the policy did. Sample i describes the state after step i+1.
struct EpisodeTrace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> qdot;
  std::vector<Eigen::VectorXd> a;
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> grf;   // per-foot time means per step
  std::vector<double> com_vx;
  std::vector<double> com_x;
};

// Gait-analysis view of a trace, using the env's joint table and the
// model's weight. dt is the control period.
Rollout trace_to_rollout(const EpisodeTrace& trace, const Env& env);

struct EvalStats {
  int episodes = 0;
  int falls = 0;
  double mean_vx = 0.0;          // time-mean forward COM velocity
  double mean_distance = 0.0;    // COM x travelled per episode
  double mean_task_return = 0.0;
  double mean_total_return = 0.0;
  double mean_effort = 0.0;
  double exp_match = std::numeric_limits<double>::quiet_NaN();
};

// Runs noise-free episodes with seeds seed_base, seed_base+1, ... When
// traces is non-null one trace per episode is appended. exp_match is left
// NaN; callers with a reference band fill it from the traces.
EvalStats evaluate(Env* env, Agent* agent, int episodes,
                   std::uint64_t seed_base, double alpha,
                   std::vector<EpisodeTrace>* traces = nullptr);

struct TrainerOptions {
  std::uint64_t seed = 1;
  std::int64_t max_env_steps = 2000000;  // 0 = unlimited
  std::int64_t max_episodes = 0;         // 0 = unlimited
  double max_wall_seconds = 0.0;         // 0 = unlimited
  // Periodic evaluation; 0 disables it (and with it early stopping).
  std::int64_t eval_every_episodes = 0;
  int eval_episodes = 3;
  // Early stop once an evaluation has no falls and mean vx >= this.
  double stop_eval_vx = 0.0;  // 0 disables
  std::int64_t checkpoint_every_episodes = 0;  // 0 = off
  std::string checkpoint_dir;
  bool final_checkpoint_with_buffer = false;
  // Reference gait bands for the exp_match metrics column (may be empty).
  std::string gait_reference_path;
  // Hash of the config document this run came from, stamped into emitted
  // files. Rides along in checkpoints so resumed runs keep their provenance.
  std::uint64_t config_hash = 0;
};

struct TrainResult {
  std::int64_t episodes = 0;
  std::int64_t env_steps = 0;
  bool eval_success = false;
  EvalStats last_eval;
  double wall_seconds = 0.0;
};

// Per-environment-step log record (reward components as stored, without
// the effort weight applied; alpha rides along separately).
struct StepLogRow {
  std::int64_t episode_id = 0;
  int step = 0;
  RewardBreakdown breakdown;
  double alpha = 0.0;
  bool done = false;
  bool truncated = false;
};

class Trainer {
 public:
  Trainer(ModelSpec model, Terrain terrain, EnvConfig env_cfg,
          LearnerConfig learner_cfg, AdaptConfig adapt_cfg,
          TrainerOptions options);

  // Runs until a stop condition; emits one EpisodeRow per finished episode
  // via row_sink and, when step_sink is set, one StepLogRow per env step.
  // Either sink may be null.
  TrainResult run(const std::function<void(const EpisodeRow&)>& row_sink,
                  const std::function<void(const StepLogRow&)>& step_sink =
                      nullptr);

  // Checkpoint access.
  const ModelSpec& model() const { return *model_; }
  const Terrain& terrain() const { return terrain_; }
  const EnvConfig& env_config() const { return env_cfg_; }
  const LearnerConfig& learner_config() const { return learner_cfg_; }
  const AdaptConfig& adapt_config() const { return adapt_cfg_; }
  const TrainerOptions& options() const { return options_; }
  Agent& agent() { return *agent_; }
  ReplayBuffer& buffer() { return *buffer_; }
  AdaptState& adapt_state() { return adapt_; }
  Rng& rng() { return rng_; }
  std::int64_t env_steps() const { return env_steps_; }
  std::int64_t episodes() const { return episodes_; }
  std::int64_t next_episode_id() const { return next_episode_id_; }
  void restore_counters(std::int64_t env_steps, std::int64_t episodes,
                        std::int64_t next_episode_id) {
    env_steps_ = env_steps;
    episodes_ = episodes;
    next_episode_id_ = next_episode_id;
  }

 private:
  struct EnvSlot {
    std::unique_ptr<Env> env;
    Eigen::VectorXf obs;
    OuNoise ou;
    bool needs_reset = true;
    std::int64_t episode_id = 0;
    // Episode accumulators.
    double task_return = 0.0;
    double total_return = 0.0;
    double effort_sum = 0.0;
    int steps = 0;
  };

  EpisodeRow finish_episode(EnvSlot* slot);
  void maybe_train();

  std::unique_ptr<ModelSpec> model_;
  Terrain terrain_;
  EnvConfig env_cfg_;
  LearnerConfig learner_cfg_;
  AdaptConfig adapt_cfg_;
  TrainerOptions options_;
  Rng rng_;
  std::unique_ptr<Agent> agent_;
  std::unique_ptr<ReplayBuffer> buffer_;
  AdaptState adapt_;
  std::vector<EnvSlot> slots_;
  std::int64_t env_steps_ = 0;
  std::int64_t episodes_ = 0;
  std::int64_t next_episode_id_ = 0;
  std::unique_ptr<ReferenceBand> reference_;
};

}  // namespace walklab

#endif  // WALKLAB_AGENT_HPP_
