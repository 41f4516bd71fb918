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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "walklab/checkpoint.hpp"
#include "walklab/common.hpp"

namespace walklab {
namespace {

std::vector<int> mlp_sizes(int in, int out, const LearnerConfig& cfg) {
  std::vector<int> sizes;
  sizes.push_back(in);
  for (int i = 0; i < cfg.hidden_layers; ++i) sizes.push_back(cfg.hidden_size);
  sizes.push_back(out);
  return sizes;
}

}  // namespace

void OuNoise::advance(double dt, double sigma, double tau_c, Rng* rng) {
  const double decay = std::exp(-dt / tau_c);
  const double scale = sigma * std::sqrt(1.0 - decay * decay);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = x[i] * decay + scale * rng->normal();
  }
}

Agent::Agent(int obs_dim, int act_dim, double u_max, const LearnerConfig& cfg,
             Rng* rng)
    : obs_dim_(obs_dim),
      act_dim_(act_dim),
      u_max_(u_max),
      cfg_(cfg),
      actor_(mlp_sizes(obs_dim, act_dim, cfg), OutputActivation::kSigmoid),
      actor_target_(mlp_sizes(obs_dim, act_dim, cfg),
                    OutputActivation::kSigmoid),
      q1_(mlp_sizes(obs_dim + act_dim, 1, cfg), OutputActivation::kLinear),
      q2_(mlp_sizes(obs_dim + act_dim, 1, cfg), OutputActivation::kLinear),
      q1t_(mlp_sizes(obs_dim + act_dim, 1, cfg), OutputActivation::kLinear),
      q2t_(mlp_sizes(obs_dim + act_dim, 1, cfg), OutputActivation::kLinear),
      opt_actor_(actor_, cfg.lr_actor),
      opt_q1_(q1_, cfg.lr_critic),
      opt_q2_(q2_, cfg.lr_critic) {
  if (obs_dim <= 0 || act_dim <= 0) {
    throw std::invalid_argument("agent dimensions must be positive");
  }
  if (u_max <= 0.0) throw std::invalid_argument("u_max must be positive");
  actor_.init(rng);
  q1_.init(rng);
  q2_.init(rng);
  copy_params(actor_, &actor_target_);
  copy_params(q1_, &q1t_);
  copy_params(q2_, &q2t_);
}

Eigen::VectorXd Agent::act(const Eigen::VectorXf& obs,
                           const Eigen::VectorXd* noise) {
  if (obs.size() != obs_dim_) {
    throw std::invalid_argument("observation size mismatch");
  }
  const Eigen::MatrixXf& out = actor_.forward(obs);
  Eigen::VectorXd u = out.col(0).cast<double>() * u_max_;
  if (noise != nullptr) u += *noise;
  return u.cwiseMax(0.0).cwiseMin(u_max_);
}

TrainStepMetrics Agent::train_step(const ReplayBuffer& buffer, double alpha,
                                   Rng* rng) {
  const int batch = cfg_.batch_size;
  buffer.sample(batch, alpha, rng, &batch_);
  const float u_max = static_cast<float>(u_max_);

  // Clipped double-Q target with smoothed target-policy actions.
  const Eigen::MatrixXf& pi_next = actor_target_.forward(batch_.next_obs);
  noise_mat_.resize(act_dim_, batch);
  const float noise_sigma = cfg_.smooth_sigma * u_max;
  const float noise_clip = cfg_.smooth_clip * u_max;
  for (int j = 0; j < batch; ++j) {
    for (int i = 0; i < act_dim_; ++i) {
      noise_mat_(i, j) =
          std::clamp(noise_sigma * static_cast<float>(rng->normal()),
                     -noise_clip, noise_clip);
    }
  }
  sa_next_.resize(obs_dim_ + act_dim_, batch);
  sa_next_.topRows(obs_dim_) = batch_.next_obs;
  sa_next_.bottomRows(act_dim_) =
      (pi_next * u_max + noise_mat_).cwiseMax(0.0f).cwiseMin(u_max);

  const Eigen::MatrixXf& q1_next = q1t_.forward(sa_next_);
  const Eigen::MatrixXf& q2_next = q2t_.forward(sa_next_);
  target_.resize(batch);
  for (int j = 0; j < batch; ++j) {
    const float q_min = std::min(q1_next(0, j), q2_next(0, j));
    target_[j] = static_cast<float>(batch_.reward[j]) +
                 cfg_.gamma * batch_.not_done[j] * q_min;
  }

  sa_.resize(obs_dim_ + act_dim_, batch);
  sa_.topRows(obs_dim_) = batch_.obs;
  sa_.bottomRows(act_dim_) = batch_.action;

  TrainStepMetrics metrics;
  Eigen::MatrixXf dy(1, batch);
  {
    const Eigen::MatrixXf& q = q1_.forward(sa_);
    const Eigen::RowVectorXf diff = q.row(0) - target_.transpose();
    metrics.critic_loss += 0.5f * diff.squaredNorm() / batch;
    dy = diff * (2.0f / batch);
    q1_.zero_grad();
    q1_.backward(dy);
    opt_q1_.step(&q1_);
  }
  {
    const Eigen::MatrixXf& q = q2_.forward(sa_);
    const Eigen::RowVectorXf diff = q.row(0) - target_.transpose();
    metrics.critic_loss += 0.5f * diff.squaredNorm() / batch;
    dy = diff * (2.0f / batch);
    q2_.zero_grad();
    q2_.backward(dy);
    opt_q2_.step(&q2_);
  }

  // Deterministic policy gradient through the first critic.
  const Eigen::MatrixXf& pi = actor_.forward(batch_.obs);
  sa_.bottomRows(act_dim_) = pi * u_max;
  const Eigen::MatrixXf& q_pi = q1_.forward(sa_);
  metrics.actor_loss = -q_pi.row(0).mean();
  dy.setConstant(-1.0f / batch);
  Eigen::MatrixXf d_sa;
  q1_.zero_grad();
  q1_.backward(dy, &d_sa);
  const Eigen::MatrixXf d_pi = d_sa.bottomRows(act_dim_) * u_max;
  actor_.zero_grad();
  actor_.backward(d_pi);
  opt_actor_.step(&actor_);

  soft_update(q1_, cfg_.target_tau, &q1t_);
  soft_update(q2_, cfg_.target_tau, &q2t_);
  soft_update(actor_, cfg_.target_tau, &actor_target_);

  if (!std::isfinite(metrics.critic_loss) ||
      !std::isfinite(metrics.actor_loss)) {
    throw DivergenceError("training loss is not finite");
  }
  return metrics;
}

Rollout trace_to_rollout(const EpisodeTrace& trace, const Env& env) {
  Rollout rollout;
  rollout.dt = env.config().control_dt;
  rollout.body_weight = env.model().body_weight();
  const std::vector<int>& leg = env.leg_joints();
  const std::size_t n = trace.t.size();
  for (int side = 0; side < 2; ++side) {
    rollout.hip[side].resize(n);
    rollout.knee[side].resize(n);
    rollout.ankle[side].resize(n);
    rollout.grf[side].resize(n);
  }
  rollout.activations.resize(env.act_dim(), static_cast<Eigen::Index>(n));
  rollout.com_x = trace.com_x;
  rollout.com_vx = trace.com_vx;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& q = trace.q[i];
    rollout.hip[0][i] = q[leg[0]];
    rollout.knee[0][i] = q[leg[1]];
    rollout.ankle[0][i] = q[leg[2]];
    rollout.hip[1][i] = q[leg[3]];
    rollout.knee[1][i] = q[leg[4]];
    rollout.ankle[1][i] = q[leg[5]];
    rollout.grf[0][i] = trace.grf[i][0];
    rollout.grf[1][i] = trace.grf[i].size() > 1 ? trace.grf[i][1] : 0.0;
    rollout.activations.col(static_cast<Eigen::Index>(i)) = trace.a[i];
  }
  return rollout;
}

EvalStats evaluate(Env* env, Agent* agent, int episodes,
                   std::uint64_t seed_base, double alpha,
                   std::vector<EpisodeTrace>* traces) {
  if (episodes <= 0) throw std::invalid_argument("episodes must be positive");
  EvalStats stats;
  stats.episodes = episodes;
  for (int ep = 0; ep < episodes; ++ep) {
    Eigen::VectorXf obs(env->obs_dim());
    env->reset(seed_base + static_cast<std::uint64_t>(ep), &obs);
    EpisodeTrace trace;
    double task = 0.0, total = 0.0, effort = 0.0, vx = 0.0;
    int steps = 0;
    bool fell = false;
    while (true) {
      const Eigen::VectorXd u = agent->act(obs);
      EnvStep out;
      env->step(u, &obs, &out);
      ++steps;
      task += out.task_reward;
      total += total_reward(out.breakdown, alpha);
      effort += out.breakdown.effort_activity;
      vx += out.com_vx_mean;
      trace.t.push_back(env->config().control_dt * steps);
      trace.q.push_back(env->state().q);
      trace.qdot.push_back(env->state().qdot);
      trace.a.push_back(env->state().a);
      trace.u.push_back(u);
      trace.grf.push_back(out.grf_mean);
      trace.com_vx.push_back(out.com_vx_mean);
      trace.com_x.push_back(out.last_report.com[0]);
      if (out.done || out.truncated) {
        fell = out.done;
        break;
      }
    }
    if (fell) ++stats.falls;
    stats.mean_task_return += task;
    stats.mean_total_return += total;
    stats.mean_effort += effort / std::max(1, steps);
    stats.mean_vx += vx / std::max(1, steps);
    stats.mean_distance +=
        trace.com_x.empty() ? 0.0 : trace.com_x.back() - trace.com_x.front();
    if (traces != nullptr) traces->push_back(std::move(trace));
  }
  stats.mean_task_return /= episodes;
  stats.mean_total_return /= episodes;
  stats.mean_effort /= episodes;
  stats.mean_vx /= episodes;
  stats.mean_distance /= episodes;
  return stats;
}

Trainer::Trainer(ModelSpec model, Terrain terrain, EnvConfig env_cfg,
                 LearnerConfig learner_cfg, AdaptConfig adapt_cfg,
                 TrainerOptions options)
    : model_(std::make_unique<ModelSpec>(std::move(model))),
      terrain_(std::move(terrain)),
      env_cfg_(env_cfg),
      learner_cfg_(learner_cfg),
      adapt_cfg_(adapt_cfg),
      options_(std::move(options)),
      rng_(options_.seed),
      adapt_(AdaptState::initial(adapt_cfg)) {
  const int n_slots = std::max(1, learner_cfg_.n_parallel);
  slots_ = std::vector<EnvSlot>(static_cast<std::size_t>(n_slots));
  for (EnvSlot& slot : slots_) {
    slot.env = std::make_unique<Env>(*model_, terrain_, env_cfg_);
    slot.obs.resize(slot.env->obs_dim());
  }
  const int obs_dim = slots_.front().env->obs_dim();
  const int act_dim = slots_.front().env->act_dim();
  agent_ = std::make_unique<Agent>(obs_dim, act_dim, env_cfg_.u_max,
                                   learner_cfg_, &rng_);
  buffer_ = std::make_unique<ReplayBuffer>(learner_cfg_.buffer_capacity,
                                           obs_dim, act_dim);
  if (!options_.gait_reference_path.empty()) {
    reference_ = std::make_unique<ReferenceBand>(
        load_reference_band(options_.gait_reference_path));
  }
}

EpisodeRow Trainer::finish_episode(EnvSlot* slot) {
  adapt_update(adapt_cfg_, slot->task_return, &adapt_);
  ++episodes_;
  EpisodeRow row;
  row.episode = slot->episode_id;  // matches the step log's episode column
  row.steps = slot->steps;
  row.task_return = slot->task_return;
  row.total_return = slot->total_return;
  row.mean_effort = slot->steps > 0 ? slot->effort_sum / slot->steps : 0.0;
  row.alpha = adapt_.alpha;
  row.r_mean = adapt_.r_mean;
  slot->needs_reset = true;
  return row;
}

void Trainer::maybe_train() {
  if (learner_cfg_.steps_between_batches <= 0) return;
  if (env_steps_ < learner_cfg_.steps_before_batches) return;
  if (env_steps_ % learner_cfg_.steps_between_batches != 0) return;
  if (buffer_->size() < static_cast<std::size_t>(learner_cfg_.batch_size)) {
    return;
  }
  for (int k = 0; k < learner_cfg_.number_of_batches; ++k) {
    agent_->train_step(*buffer_, adapt_.alpha, &rng_);
  }
}

TrainResult Trainer::run(
    const std::function<void(const EpisodeRow&)>& row_sink,
    const std::function<void(const StepLogRow&)>& step_sink) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };
  TrainResult result;
  std::unique_ptr<Env> eval_env;
  Eigen::VectorXf next_obs(agent_->obs_dim());
  bool stop = false;
  while (!stop) {
    for (EnvSlot& slot : slots_) {
      if (slot.needs_reset) {
        slot.env->reset(rng_.next_u64(), &slot.obs);
        slot.ou.reset(agent_->act_dim());
        slot.episode_id = next_episode_id_++;
        slot.task_return = 0.0;
        slot.total_return = 0.0;
        slot.effort_sum = 0.0;
        slot.steps = 0;
        slot.needs_reset = false;
      }
      slot.ou.advance(env_cfg_.control_dt, learner_cfg_.ou_sigma,
                      learner_cfg_.ou_tau, &rng_);
      const Eigen::VectorXd u = agent_->act(slot.obs, &slot.ou.x);
      EnvStep out;
      slot.env->step(u, &next_obs, &out);
      ++env_steps_;
      buffer_->add(slot.obs, u.cast<float>(), out.breakdown, next_obs,
                   out.done, slot.episode_id);
      slot.obs.swap(next_obs);
      slot.task_return += out.task_reward;
      slot.total_return += total_reward(out.breakdown, adapt_.alpha);
      slot.effort_sum += out.breakdown.effort_activity;
      ++slot.steps;
      if (step_sink) {
        StepLogRow log;
        log.episode_id = slot.episode_id;
        log.step = slot.steps;
        log.breakdown = out.breakdown;
        log.alpha = adapt_.alpha;
        log.done = out.done;
        log.truncated = out.truncated;
        step_sink(log);
      }

      const bool episode_ended = out.done || out.truncated;
      if (episode_ended) {
        EpisodeRow row = finish_episode(&slot);
        if (options_.eval_every_episodes > 0 &&
            episodes_ % options_.eval_every_episodes == 0) {
          if (!eval_env) {
            eval_env = std::make_unique<Env>(*model_, terrain_, env_cfg_);
          }
          std::vector<EpisodeTrace> traces;
          EvalStats stats = evaluate(
              eval_env.get(), agent_.get(), options_.eval_episodes,
              options_.seed * 0x10001ull + static_cast<std::uint64_t>(episodes_),
              adapt_.alpha, reference_ ? &traces : nullptr);
          if (reference_) {
            std::vector<GaitCycle> cycles;
            for (const EpisodeTrace& trace : traces) {
              const Rollout rollout = trace_to_rollout(trace, *eval_env);
              auto more = collect_cycles(rollout, reference_->points);
              for (GaitCycle& c : more) cycles.push_back(std::move(c));
            }
            const MatchReport report =
                analyze_cycles(cycles, reference_.get());
            stats.exp_match = report.aggregate;
            row.exp_match = report.aggregate;
          }
          result.last_eval = stats;
          if (options_.stop_eval_vx > 0.0 && stats.falls == 0 &&
              stats.mean_vx >= options_.stop_eval_vx) {
            result.eval_success = true;
            stop = true;
          }
        }
        if (row_sink) row_sink(row);
      }

      maybe_train();

      if (episode_ended) {
        if (options_.checkpoint_every_episodes > 0 &&
            !options_.checkpoint_dir.empty() &&
            episodes_ % options_.checkpoint_every_episodes == 0) {
          save_checkpoint(options_.checkpoint_dir + "/checkpoint_" +
                              std::to_string(episodes_) + ".bin",
                          *this, false);
        }
        if (options_.max_episodes > 0 && episodes_ >= options_.max_episodes) {
          stop = true;
        }
      }
      if (options_.max_env_steps > 0 && env_steps_ >= options_.max_env_steps) {
        stop = true;
      }
      if (options_.max_wall_seconds > 0.0 &&
          elapsed() >= options_.max_wall_seconds) {
        stop = true;
      }
      if (stop) break;
    }
  }
  if (!options_.checkpoint_dir.empty()) {
    save_checkpoint(options_.checkpoint_dir + "/checkpoint_final.bin", *this,
                    options_.final_checkpoint_with_buffer);
  }
  result.episodes = episodes_;
  result.env_steps = env_steps_;
  result.wall_seconds = elapsed();
  return result;
}

}  // namespace walklab
