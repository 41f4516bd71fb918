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

// Shared test fixtures: asset lookup, a cached copy of the shipped biped,
// and small hand-written models whose behavior has closed forms.

#ifndef WALKLAB_TESTS_HELPERS_HPP_
#define WALKLAB_TESTS_HELPERS_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "walklab/model.hpp"

namespace walklab::testing {

inline std::string asset_path(const std::string& name) {
  return std::string(WALKLAB_ASSET_DIR "/") + name;
}

// The shipped planar biped, parsed once. Tests must not mutate it; take a
// copy when a variant (zero gravity, different contact) is needed.
inline const ModelSpec& biped() {
  static const ModelSpec model = load_model_file(asset_path("h0918.model"));
  return model;
}

// Two hinged 1 m rods, no muscles, no spheres. Passive swing conserves
// mechanical energy, which pins the integrator and the dynamics sweeps.
inline std::string double_pendulum_text() {
  return R"(schema walklab-model-v1
name pendulum2
gravity 9.81
feet 0
segment rod1 1.0 0.08333333333333333 1.0 0.0 -0.5
segment rod2 1.0 0.08333333333333333 1.0 0.0 -0.5
joint shoulder revolute world rod1 0.0 0.0
joint elbow revolute rod1 rod2 0.0 -1.0
)";
}

// A 10 kg translating puck riding one contact sphere: the simplest body
// that can be dropped on terrain. No rotation, so the settled ground
// reaction force must equal the weight exactly.
inline std::string puck_text() {
  return R"(schema walklab-model-v1
name puck
gravity 9.81
feet 1
segment puck 10.0 0.05 0.2 0.0 0.0
joint slide_x prismatic_x world puck 0.0 0.0
joint slide_y prismatic_y world puck 0.0 0.0
sphere pad puck 0.0 0.0 0.1 0 -1
contact stiffness 1e5
contact exponent 1.5
contact damping 1.0
contact mu_static 0.9
contact mu_dynamic 0.8
contact mu_viscous 0.5
contact v_ref 0.05
)";
}

// Unique scratch directory under the system temp root, removed on scope
// exit. Keeps CLI and checkpoint tests from littering the build tree.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / ("walklab_test_" + tag + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("TempDir: could not create a scratch directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace walklab::testing

#endif  // WALKLAB_TESTS_HELPERS_HPP_
