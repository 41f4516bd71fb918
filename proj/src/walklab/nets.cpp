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

#include "walklab/nets.hpp"

#include <cmath>
#include <stdexcept>

namespace walklab {

Mlp::Mlp(std::vector<int> sizes, OutputActivation out_act)
    : sizes_(std::move(sizes)), out_act_(out_act) {
  if (sizes_.size() < 3) {
    throw std::invalid_argument("Mlp: need at least one hidden layer");
  }
  const std::size_t n = sizes_.size() - 1;
  weights_.resize(n);
  biases_.resize(n);
  grad_w_.resize(n);
  grad_b_.resize(n);
  acts_.resize(n);
  dz_.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    weights_[l] = Eigen::MatrixXf::Zero(sizes_[l + 1], sizes_[l]);
    biases_[l] = Eigen::VectorXf::Zero(sizes_[l + 1]);
    grad_w_[l] = Eigen::MatrixXf::Zero(sizes_[l + 1], sizes_[l]);
    grad_b_[l] = Eigen::VectorXf::Zero(sizes_[l + 1]);
  }
}

void Mlp::init(Rng* rng) {
  const std::size_t n = weights_.size();
  for (std::size_t l = 0; l < n; ++l) {
    Eigen::MatrixXf& w = weights_[l];
    if (l + 1 < n) {
      const float scale =
          std::sqrt(2.0f / static_cast<float>(w.cols()));
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          w(i, j) = scale * static_cast<float>(rng->normal());
        }
      }
    } else {
      // Small output layer keeps initial actions near the sigmoid midpoint
      // and initial values near zero.
      const float bound = 3e-3f;
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          w(i, j) = static_cast<float>(rng->uniform(-bound, bound));
        }
      }
    }
    biases_[l].setZero();
  }
}

const Eigen::MatrixXf& Mlp::forward(const Eigen::MatrixXf& x) {
  if (x.rows() != sizes_.front()) {
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  }
  const std::size_t n = weights_.size();
  acts_[0] = x;
  for (std::size_t l = 0; l < n; ++l) {
    Eigen::MatrixXf z =
        (weights_[l] * acts_[l]).colwise() + biases_[l];
    if (l + 1 < n) {
      acts_[l + 1] = z.cwiseMax(0.0f);
    } else {
      if (out_act_ == OutputActivation::kSigmoid) {
        out_ = ((-z.array()).exp() + 1.0f).inverse().matrix();
      } else {
        out_ = std::move(z);
      }
    }
  }
  return out_;
}

void Mlp::backward(const Eigen::MatrixXf& dy, Eigen::MatrixXf* dx) {
  const std::size_t n = weights_.size();
  if (out_act_ == OutputActivation::kSigmoid) {
    dz_[n - 1] =
        dy.array() * out_.array() * (1.0f - out_.array());
  } else {
    dz_[n - 1] = dy;
  }
  for (std::size_t l = n; l-- > 0;) {
    grad_w_[l].noalias() += dz_[l] * acts_[l].transpose();
    grad_b_[l] += dz_[l].rowwise().sum();
    if (l > 0) {
      // ReLU mask of the layer-l input activation.
      dz_[l - 1] = (weights_[l].transpose() * dz_[l]).array() *
                   (acts_[l].array() > 0.0f).cast<float>();
    } else if (dx != nullptr) {
      dx->noalias() = weights_[0].transpose() * dz_[0];
    }
  }
}

void Mlp::zero_grad() {
  for (std::size_t l = 0; l < grad_w_.size(); ++l) {
    grad_w_[l].setZero();
    grad_b_[l].setZero();
  }
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size()) +
         static_cast<std::size_t>(biases_[l].size());
  }
  return n;
}

void Mlp::flatten(std::vector<float>* out) const {
  out->clear();
  out->reserve(param_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out->insert(out->end(), weights_[l].data(),
                weights_[l].data() + weights_[l].size());
    out->insert(out->end(), biases_[l].data(),
                biases_[l].data() + biases_[l].size());
  }
}

void Mlp::unflatten(const std::vector<float>& in) {
  if (in.size() != param_count()) {
    throw std::invalid_argument("Mlp::unflatten: size mismatch");
  }
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(pos),
              in.begin() + static_cast<std::ptrdiff_t>(pos + weights_[l].size()),
              weights_[l].data());
    pos += static_cast<std::size_t>(weights_[l].size());
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(pos),
              in.begin() + static_cast<std::ptrdiff_t>(pos + biases_[l].size()),
              biases_[l].data());
    pos += static_cast<std::size_t>(biases_[l].size());
  }
}

Adam::Adam(const Mlp& net, float lr, float beta1, float beta2, float eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  const int n = net.n_layers();
  m_w_.resize(static_cast<std::size_t>(n));
  v_w_.resize(static_cast<std::size_t>(n));
  m_b_.resize(static_cast<std::size_t>(n));
  v_b_.resize(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    const std::size_t i = static_cast<std::size_t>(l);
    m_w_[i] = Eigen::MatrixXf::Zero(net.weight(l).rows(), net.weight(l).cols());
    v_w_[i] = m_w_[i];
    m_b_[i] = Eigen::VectorXf::Zero(net.bias(l).size());
    v_b_[i] = m_b_[i];
  }
}

void Adam::step(Mlp* net) {
  ++t_;
  const float bc1 = 1.0f - std::pow(beta1_, static_cast<float>(t_));
  const float bc2 = 1.0f - std::pow(beta2_, static_cast<float>(t_));
  const float alpha = lr_ * std::sqrt(bc2) / bc1;
  for (int l = 0; l < net->n_layers(); ++l) {
    const std::size_t i = static_cast<std::size_t>(l);
    const Eigen::MatrixXf& gw = net->weight_grad(l);
    m_w_[i] = beta1_ * m_w_[i] + (1.0f - beta1_) * gw;
    v_w_[i] = beta2_ * v_w_[i].array() + (1.0f - beta2_) * gw.array().square();
    net->weight(l).array() -=
        alpha * m_w_[i].array() / (v_w_[i].array().sqrt() + eps_);
    const Eigen::VectorXf& gb = net->bias_grad(l);
    m_b_[i] = beta1_ * m_b_[i] + (1.0f - beta1_) * gb;
    v_b_[i] = beta2_ * v_b_[i].array() + (1.0f - beta2_) * gb.array().square();
    net->bias(l).array() -=
        alpha * m_b_[i].array() / (v_b_[i].array().sqrt() + eps_);
  }
}

std::size_t Adam::moment_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < m_w_.size(); ++l) {
    n += 2 * (static_cast<std::size_t>(m_w_[l].size()) +
              static_cast<std::size_t>(m_b_[l].size()));
  }
  return n;
}

void Adam::flatten(std::vector<float>* out) const {
  out->clear();
  out->reserve(moment_count());
  for (std::size_t l = 0; l < m_w_.size(); ++l) {
    out->insert(out->end(), m_w_[l].data(), m_w_[l].data() + m_w_[l].size());
    out->insert(out->end(), v_w_[l].data(), v_w_[l].data() + v_w_[l].size());
    out->insert(out->end(), m_b_[l].data(), m_b_[l].data() + m_b_[l].size());
    out->insert(out->end(), v_b_[l].data(), v_b_[l].data() + v_b_[l].size());
  }
}

void Adam::unflatten(const std::vector<float>& in) {
  if (in.size() != moment_count()) {
    throw std::invalid_argument("Adam::unflatten: size mismatch");
  }
  std::size_t pos = 0;
  const auto take = [&](auto& dst) {
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(pos),
              in.begin() + static_cast<std::ptrdiff_t>(pos + dst.size()),
              dst.data());
    pos += static_cast<std::size_t>(dst.size());
  };
  for (std::size_t l = 0; l < m_w_.size(); ++l) {
    take(m_w_[l]);
    take(v_w_[l]);
    take(m_b_[l]);
    take(v_b_[l]);
  }
}

void soft_update(const Mlp& src, float tau, Mlp* dst) {
  for (int l = 0; l < dst->n_layers(); ++l) {
    dst->weight(l) = tau * src.weight(l) + (1.0f - tau) * dst->weight(l);
    dst->bias(l) = tau * src.bias(l) + (1.0f - tau) * dst->bias(l);
  }
}

void copy_params(const Mlp& src, Mlp* dst) {
  for (int l = 0; l < dst->n_layers(); ++l) {
    dst->weight(l) = src.weight(l);
    dst->bias(l) = src.bias(l);
  }
}

}  // namespace walklab
