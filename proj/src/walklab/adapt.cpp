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

#include "walklab/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "walklab/common.hpp"

namespace walklab {

AdaptState AdaptState::initial(const AdaptConfig& cfg) {
  AdaptState s;
  s.alpha = 0.0;
  s.delta_alpha = cfg.delta_alpha0;
  s.r_mean = 0.0;
  s.c_mean = 0.0;
  return s;
}

void adapt_update(const AdaptConfig& cfg, double episode_return,
                  AdaptState* state) {
  if (!std::isfinite(episode_return)) {
    throw std::invalid_argument("adapt_update: non-finite episode return");
  }
  AdaptState& s = *state;
  s.r_mean = cfg.beta * s.r_mean + (1.0 - cfg.beta) * episode_return;
  const bool above = s.r_mean > cfg.threshold;
  if (above && s.c_mean < 0.5) {
    s.delta_alpha *= cfg.lambda;
  } else if (above) {
    s.alpha += s.delta_alpha;
  } else {
    s.alpha = std::max(0.0, s.alpha - s.delta_alpha);
  }
  const double c_target = above ? 1.0 : 0.0;
  s.c_mean = cfg.beta * s.c_mean + (1.0 - cfg.beta) * c_target;
}

std::string adapt_snapshot(const AdaptState& state) {
  nlohmann::json j;
  j["alpha"] = state.alpha;
  j["delta_alpha"] = state.delta_alpha;
  j["r_mean"] = state.r_mean;
  j["c_mean"] = state.c_mean;
  return j.dump();
}

AdaptState adapt_restore(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("adapt snapshot: ") + e.what());
  }
  AdaptState s;
  try {
    s.alpha = j.at("alpha").get<double>();
    s.delta_alpha = j.at("delta_alpha").get<double>();
    s.r_mean = j.at("r_mean").get<double>();
    s.c_mean = j.at("c_mean").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("adapt snapshot: ") + e.what());
  }
  return s;
}

}  // namespace walklab
