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

// Uniform-replay ring buffer. Transitions never carry a scalar reward;
// they carry the reward breakdown, and the scalar is recomposed with the
// caller's current effort weight every time a batch is drawn. That keeps
// old experience consistent with the present reward definition as the
// effort weight drifts during training.

#ifndef WALKLAB_REPLAY_HPP_
#define WALKLAB_REPLAY_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "walklab/reward.hpp"
#include "walklab/rng.hpp"

namespace walklab {

// One sampled minibatch. Observation-like matrices are (dim, batch) with one
// column per transition; rewards are recomposed doubles.
struct ReplayBatch {
  Eigen::MatrixXf obs;
  Eigen::MatrixXf action;
  Eigen::MatrixXf next_obs;
  Eigen::VectorXd reward;
  Eigen::VectorXf not_done;  // 0 where the episode terminated, else 1
};

class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim);

  void add(const Eigen::Ref<const Eigen::VectorXf>& obs,
           const Eigen::Ref<const Eigen::VectorXf>& action,
           const RewardBreakdown& reward,
           const Eigen::Ref<const Eigen::VectorXf>& next_obs, bool done,
           std::int64_t episode_id);

  // Uniform with replacement over the current contents. Requires size() > 0.
  std::size_t sample_index(Rng* rng) const;

  // Draws batch_size transitions and recomposes each reward at alpha.
  void sample(int batch_size, double alpha, Rng* rng, ReplayBatch* out) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }

  const RewardBreakdown& breakdown_at(std::size_t i) const {
    return breakdowns_[i];
  }
  std::int64_t episode_id_at(std::size_t i) const { return episode_ids_[i]; }

  // Raw storage access for checkpointing. head is the next write slot.
  std::size_t head() const { return head_; }
  const std::vector<float>& obs_data() const { return obs_data_; }
  const std::vector<float>& action_data() const { return action_data_; }
  const std::vector<float>& next_obs_data() const { return next_obs_data_; }
  const std::vector<RewardBreakdown>& breakdowns() const {
    return breakdowns_;
  }
  const std::vector<std::uint8_t>& dones() const { return dones_; }
  const std::vector<std::int64_t>& episode_ids() const { return episode_ids_; }
  void restore_raw(std::size_t head, std::size_t size,
                   std::vector<float> obs_data, std::vector<float> action_data,
                   std::vector<float> next_obs_data,
                   std::vector<RewardBreakdown> breakdowns,
                   std::vector<std::uint8_t> dones,
                   std::vector<std::int64_t> episode_ids);

 private:
  std::size_t capacity_;
  int obs_dim_;
  int act_dim_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::vector<float> obs_data_;       // capacity * obs_dim
  std::vector<float> action_data_;    // capacity * act_dim
  std::vector<float> next_obs_data_;  // capacity * obs_dim
  std::vector<RewardBreakdown> breakdowns_;
  std::vector<std::uint8_t> dones_;
  std::vector<std::int64_t> episode_ids_;
};

}  // namespace walklab

#endif  // WALKLAB_REPLAY_HPP_
