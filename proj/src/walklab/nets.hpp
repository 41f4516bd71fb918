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

// Minimal dense networks for the actor-critic: single-precision multilayer
// perceptrons with ReLU hidden layers, explicit backward passes, and an
// Adam optimizer. Batches are column-major (one sample per column). All
// arithmetic is single-threaded and allocation patterns are fixed after the
// first pass, so runs are bit-reproducible.

#ifndef WALKLAB_NETS_HPP_
#define WALKLAB_NETS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "walklab/rng.hpp"

namespace walklab {

enum class OutputActivation { kLinear, kSigmoid };

class Mlp {
 public:
  // sizes = {in, hidden..., out}; at least one hidden layer.
  Mlp(std::vector<int> sizes, OutputActivation out_act);

  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }
  int n_layers() const { return static_cast<int>(weights_.size()); }

  // He-normal hidden layers, small-uniform output layer, zero biases.
  void init(Rng* rng);

  // x is (in_dim, batch). Returns (out_dim, batch); caches activations for
  // a following backward().
  const Eigen::MatrixXf& forward(const Eigen::MatrixXf& x);

  // dy is dLoss/dOutput for the cached forward. Accumulates parameter
  // gradients; optionally returns dLoss/dInput.
  void backward(const Eigen::MatrixXf& dy, Eigen::MatrixXf* dx = nullptr);

  void zero_grad();

  // Parameter and gradient access, layer by layer.
  Eigen::MatrixXf& weight(int l) { return weights_[static_cast<std::size_t>(l)]; }
  Eigen::VectorXf& bias(int l) { return biases_[static_cast<std::size_t>(l)]; }
  const Eigen::MatrixXf& weight(int l) const {
    return weights_[static_cast<std::size_t>(l)];
  }
  const Eigen::VectorXf& bias(int l) const {
    return biases_[static_cast<std::size_t>(l)];
  }
  const Eigen::MatrixXf& weight_grad(int l) const {
    return grad_w_[static_cast<std::size_t>(l)];
  }
  const Eigen::VectorXf& bias_grad(int l) const {
    return grad_b_[static_cast<std::size_t>(l)];
  }

  // Flat parameter serialization, layer-major (W row-major flattening is
  // Eigen's storage order, column-major; documented for the checkpoint).
  std::size_t param_count() const;
  void flatten(std::vector<float>* out) const;
  void unflatten(const std::vector<float>& in);

  const std::vector<int>& sizes() const { return sizes_; }
  OutputActivation output_activation() const { return out_act_; }

 private:
  std::vector<int> sizes_;
  OutputActivation out_act_;
  std::vector<Eigen::MatrixXf> weights_;
  std::vector<Eigen::VectorXf> biases_;
  std::vector<Eigen::MatrixXf> grad_w_;
  std::vector<Eigen::VectorXf> grad_b_;
  // Forward caches: inputs to each layer and the final output.
  std::vector<Eigen::MatrixXf> acts_;
  Eigen::MatrixXf out_;
  std::vector<Eigen::MatrixXf> dz_;  // backward scratch
};

// Adam with bias correction; moments keyed to the net it was built for.
class Adam {
 public:
  Adam(const Mlp& net, float lr, float beta1 = 0.9f, float beta2 = 0.999f,
       float eps = 1e-8f);

  void step(Mlp* net);
  float lr() const { return lr_; }

  // Serialization of moments and the step counter.
  std::size_t moment_count() const;
  void flatten(std::vector<float>* out) const;
  void unflatten(const std::vector<float>& in);
  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }

 private:
  float lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Eigen::MatrixXf> m_w_, v_w_;
  std::vector<Eigen::VectorXf> m_b_, v_b_;
};

// dst := tau * src + (1 - tau) * dst, layerwise. Shapes must match.
void soft_update(const Mlp& src, float tau, Mlp* dst);

// dst := src (hard copy of parameters only).
void copy_params(const Mlp& src, Mlp* dst);

}  // namespace walklab

#endif  // WALKLAB_NETS_HPP_
