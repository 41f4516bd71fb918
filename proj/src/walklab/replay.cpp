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

#include "walklab/replay.hpp"

#include <cstring>
#include <stdexcept>

namespace walklab {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity == 0 || obs_dim <= 0 || act_dim <= 0) {
    throw std::invalid_argument("ReplayBuffer: bad dimensions");
  }
  obs_data_.resize(capacity * static_cast<std::size_t>(obs_dim));
  action_data_.resize(capacity * static_cast<std::size_t>(act_dim));
  next_obs_data_.resize(capacity * static_cast<std::size_t>(obs_dim));
  breakdowns_.resize(capacity);
  dones_.resize(capacity, 0);
  episode_ids_.resize(capacity, 0);
}

void ReplayBuffer::add(const Eigen::Ref<const Eigen::VectorXf>& obs,
                       const Eigen::Ref<const Eigen::VectorXf>& action,
                       const RewardBreakdown& reward,
                       const Eigen::Ref<const Eigen::VectorXf>& next_obs,
                       bool done, std::int64_t episode_id) {
  if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_ ||
      action.size() != act_dim_) {
    throw std::invalid_argument("ReplayBuffer::add: dimension mismatch");
  }
  const std::size_t od = static_cast<std::size_t>(obs_dim_);
  const std::size_t ad = static_cast<std::size_t>(act_dim_);
  std::memcpy(&obs_data_[head_ * od], obs.data(), od * sizeof(float));
  std::memcpy(&action_data_[head_ * ad], action.data(), ad * sizeof(float));
  std::memcpy(&next_obs_data_[head_ * od], next_obs.data(),
              od * sizeof(float));
  breakdowns_[head_] = reward;
  dones_[head_] = done ? 1 : 0;
  episode_ids_[head_] = episode_id;
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

std::size_t ReplayBuffer::sample_index(Rng* rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer: sample from empty");
  return static_cast<std::size_t>(rng->below(size_));
}

void ReplayBuffer::sample(int batch_size, double alpha, Rng* rng,
                          ReplayBatch* out) const {
  out->obs.resize(obs_dim_, batch_size);
  out->action.resize(act_dim_, batch_size);
  out->next_obs.resize(obs_dim_, batch_size);
  out->reward.resize(batch_size);
  out->not_done.resize(batch_size);
  const std::size_t od = static_cast<std::size_t>(obs_dim_);
  const std::size_t ad = static_cast<std::size_t>(act_dim_);
  for (int b = 0; b < batch_size; ++b) {
    const std::size_t i = sample_index(rng);
    std::memcpy(out->obs.col(b).data(), &obs_data_[i * od],
                od * sizeof(float));
    std::memcpy(out->action.col(b).data(), &action_data_[i * ad],
                ad * sizeof(float));
    std::memcpy(out->next_obs.col(b).data(), &next_obs_data_[i * od],
                od * sizeof(float));
    out->reward[b] = total_reward(breakdowns_[i], alpha);
    out->not_done[b] = dones_[i] ? 0.0f : 1.0f;
  }
}

void ReplayBuffer::restore_raw(std::size_t head, std::size_t size,
                               std::vector<float> obs_data,
                               std::vector<float> action_data,
                               std::vector<float> next_obs_data,
                               std::vector<RewardBreakdown> breakdowns,
                               std::vector<std::uint8_t> dones,
                               std::vector<std::int64_t> episode_ids) {
  const std::size_t od = static_cast<std::size_t>(obs_dim_);
  const std::size_t ad = static_cast<std::size_t>(act_dim_);
  if (head >= capacity_ || size > capacity_ ||
      obs_data.size() != capacity_ * od ||
      action_data.size() != capacity_ * ad ||
      next_obs_data.size() != capacity_ * od ||
      breakdowns.size() != capacity_ || dones.size() != capacity_ ||
      episode_ids.size() != capacity_) {
    throw std::invalid_argument("ReplayBuffer::restore_raw: shape mismatch");
  }
  head_ = head;
  size_ = size;
  obs_data_ = std::move(obs_data);
  action_data_ = std::move(action_data);
  next_obs_data_ = std::move(next_obs_data);
  breakdowns_ = std::move(breakdowns);
  dones_ = std::move(dones);
  episode_ids_ = std::move(episode_ids);
}

}  // namespace walklab
