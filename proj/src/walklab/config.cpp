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

#include "walklab/config.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "walklab/common.hpp"

namespace walklab {
namespace {

constexpr char kSchema[] = "walklab-config-v1";

struct KeyValue {
  int line;
  std::string key;
  std::string value;
};

std::vector<KeyValue> tokenize(const std::string& text) {
  std::vector<KeyValue> pairs;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const std::size_t split = line.find_first_of(" \t");
    if (split == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": key '" + line + "' has no value");
    }
    KeyValue kv;
    kv.line = line_no;
    kv.key = line.substr(0, split);
    const std::size_t vb = line.find_first_not_of(" \t", split);
    kv.value = line.substr(vb);
    pairs.push_back(std::move(kv));
  }
  return pairs;
}

[[noreturn]] void fail(const KeyValue& kv, const std::string& msg) {
  throw ParseError("config line " + std::to_string(kv.line) + " (" + kv.key +
                   "): " + msg);
}

double to_double(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    const double v = std::stod(kv.value, &used);
    if (used != kv.value.size()) fail(kv, "trailing characters in number");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(kv, "expected a number, got '" + kv.value + "'");
  }
}

std::int64_t to_int(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(kv.value, &used);
    if (used != kv.value.size()) fail(kv, "trailing characters in integer");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(kv, "expected an integer, got '" + kv.value + "'");
  }
}

std::uint64_t to_uint(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(kv.value, &used);
    if (used != kv.value.size()) fail(kv, "trailing characters in integer");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(kv, "expected a non-negative integer, got '" + kv.value + "'");
  }
}

bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  fail(kv, "expected true/false, got '" + kv.value + "'");
}

int to_positive_int(const KeyValue& kv) {
  const std::int64_t v = to_int(kv);
  if (v < 1 || v > 1u << 30) fail(kv, "must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const std::vector<KeyValue> pairs = tokenize(text);
  if (pairs.empty() || pairs.front().key != "schema") {
    throw ParseError("config must start with 'schema " + std::string(kSchema) +
                     "'");
  }
  if (pairs.front().value != kSchema) {
    throw ParseError("unsupported config schema '" + pairs.front().value +
                     "'");
  }

  RunConfig cfg;
  // Mode first: it sets defaults the remaining keys may override.
  for (const KeyValue& kv : pairs) {
    if (kv.key != "mode") continue;
    if (kv.value != "walk" && kv.value != "run") {
      fail(kv, "mode must be walk or run");
    }
    cfg.mode = kv.value;
  }
  apply_mode(cfg.mode, &cfg);

  double control_rate_hz = 100.0;
  double physics_dt = 1e-4;
  std::set<std::string> seen;
  for (const KeyValue& kv : pairs) {
    const std::string& k = kv.key;
    if (k.rfind("dep_", 0) == 0 || k.rfind("mpo_", 0) == 0) {
      cfg.flagged.push_back(k);
      continue;
    }
    if (!seen.insert(k).second) fail(kv, "duplicate key");
    if (k == "schema" || k == "mode") {
      continue;
    } else if (k == "model") {
      cfg.model_path = kv.value;
    } else if (k == "out") {
      cfg.out_dir = kv.value;
    } else if (k == "seed") {
      cfg.seed = to_uint(kv);
    } else if (k == "terrain") {
      if (kv.value != "flat" && kv.value != "rough") {
        fail(kv, "terrain must be flat or rough");
      }
      cfg.terrain = kv.value;
    } else if (k == "terrain_seed") {
      cfg.terrain_seed = to_uint(kv);
    } else if (k == "terrain_tiles") {
      cfg.terrain_tiles = to_positive_int(kv);
    } else if (k == "terrain_tile_length") {
      cfg.terrain_tile_length = to_double(kv);
      if (cfg.terrain_tile_length <= 0.0) fail(kv, "must be positive");
    } else if (k == "terrain_max_slope_deg") {
      cfg.terrain_max_slope_deg = to_double(kv);
      if (cfg.terrain_max_slope_deg < 0.0) fail(kv, "must be non-negative");
    } else if (k == "terrain_run_in") {
      cfg.terrain_run_in = to_double(kv);
      if (cfg.terrain_run_in < 0.0) fail(kv, "must be non-negative");
    } else if (k == "control_rate_hz") {
      control_rate_hz = to_double(kv);
      if (control_rate_hz <= 0.0) fail(kv, "must be positive");
    } else if (k == "physics_dt") {
      physics_dt = to_double(kv);
      if (physics_dt <= 0.0) fail(kv, "must be positive");
    } else if (k == "horizon") {
      cfg.env.horizon = to_positive_int(kv);
    } else if (k == "action_clip") {
      cfg.env.u_max = to_double(kv);
      if (cfg.env.u_max <= 0.0) fail(kv, "must be positive");
    } else if (k == "fall_fraction") {
      cfg.env.fall_fraction = to_double(kv);
      if (cfg.env.fall_fraction <= 0.0 || cfg.env.fall_fraction > 1.0) {
        fail(kv, "must be in (0, 1]");
      }
    } else if (k == "contact_flag_bw") {
      cfg.env.contact_flag_bw = to_double(kv);
      if (cfg.env.contact_flag_bw < 0.0) fail(kv, "must be non-negative");
    } else if (k == "qdot_obs_scale") {
      cfg.env.qdot_obs_scale = to_double(kv);
      if (cfg.env.qdot_obs_scale <= 0.0) fail(kv, "must be positive");
    } else if (k == "collision_weight") {
      cfg.env.w_collision = to_double(kv);
      if (cfg.env.w_collision < 0.0) fail(kv, "must be non-negative");
    } else if (k == "v_target") {
      cfg.env.weights.v_target = to_double(kv);
      if (cfg.env.weights.v_target <= 0.0) fail(kv, "must be positive");
    } else if (k == "w_smooth") {
      cfg.env.weights.w1 = to_double(kv);
      if (cfg.env.weights.w1 < 0.0) fail(kv, "must be non-negative");
    } else if (k == "w_nactive") {
      cfg.env.weights.w2 = to_double(kv);
      if (cfg.env.weights.w2 < 0.0) fail(kv, "must be non-negative");
    } else if (k == "w_limits") {
      cfg.env.weights.w3 = to_double(kv);
      if (cfg.env.weights.w3 < 0.0) fail(kv, "must be non-negative");
    } else if (k == "w_grf") {
      cfg.env.weights.w4 = to_double(kv);
      if (cfg.env.weights.w4 < 0.0) fail(kv, "must be non-negative");
    } else if (k == "grf_threshold") {
      cfg.env.weights.grf_threshold = to_double(kv);
      if (cfg.env.weights.grf_threshold < 0.0) fail(kv, "must be non-negative");
    } else if (k == "activity_threshold") {
      cfg.env.weights.activity_threshold = to_double(kv);
      if (cfg.env.weights.activity_threshold < 0.0) {
        fail(kv, "must be non-negative");
      }
    } else if (k == "adapt_threshold") {
      cfg.adapt.threshold = to_double(kv);
    } else if (k == "adapt_beta") {
      cfg.adapt.beta = to_double(kv);
      if (cfg.adapt.beta < 0.0 || cfg.adapt.beta >= 1.0) {
        fail(kv, "must be in [0, 1)");
      }
    } else if (k == "adapt_delta0") {
      cfg.adapt.delta_alpha0 = to_double(kv);
      if (cfg.adapt.delta_alpha0 < 0.0) fail(kv, "must be non-negative");
    } else if (k == "adapt_lambda") {
      cfg.adapt.lambda = to_double(kv);
      if (cfg.adapt.lambda <= 0.0 || cfg.adapt.lambda > 1.0) {
        fail(kv, "must be in (0, 1]");
      }
    } else if (k == "hidden_size") {
      cfg.learner.hidden_size = to_positive_int(kv);
    } else if (k == "hidden_layers") {
      cfg.learner.hidden_layers = to_positive_int(kv);
    } else if (k == "lr_actor") {
      cfg.learner.lr_actor = static_cast<float>(to_double(kv));
      if (cfg.learner.lr_actor <= 0.0f) fail(kv, "must be positive");
    } else if (k == "lr_critic") {
      cfg.learner.lr_critic = static_cast<float>(to_double(kv));
      if (cfg.learner.lr_critic <= 0.0f) fail(kv, "must be positive");
    } else if (k == "gamma") {
      cfg.learner.gamma = static_cast<float>(to_double(kv));
      if (cfg.learner.gamma < 0.0f || cfg.learner.gamma >= 1.0f) {
        fail(kv, "must be in [0, 1)");
      }
    } else if (k == "target_tau") {
      cfg.learner.target_tau = static_cast<float>(to_double(kv));
      if (cfg.learner.target_tau <= 0.0f || cfg.learner.target_tau > 1.0f) {
        fail(kv, "must be in (0, 1]");
      }
    } else if (k == "batch_size") {
      cfg.learner.batch_size = to_positive_int(kv);
    } else if (k == "buffer_capacity") {
      cfg.learner.buffer_capacity = static_cast<std::size_t>(to_uint(kv));
      if (cfg.learner.buffer_capacity == 0) fail(kv, "must be positive");
    } else if (k == "steps_before_batches") {
      cfg.learner.steps_before_batches = to_int(kv);
      if (cfg.learner.steps_before_batches < 0) fail(kv, "must be >= 0");
    } else if (k == "steps_between_batches") {
      cfg.learner.steps_between_batches = static_cast<int>(to_int(kv));
      if (cfg.learner.steps_between_batches < 0) fail(kv, "must be >= 0");
    } else if (k == "number_of_batches") {
      cfg.learner.number_of_batches = static_cast<int>(to_int(kv));
      if (cfg.learner.number_of_batches < 0) fail(kv, "must be >= 0");
    } else if (k == "n_parallel") {
      cfg.learner.n_parallel = to_positive_int(kv);
    } else if (k == "ou_sigma") {
      cfg.learner.ou_sigma = to_double(kv);
      if (cfg.learner.ou_sigma < 0.0) fail(kv, "must be non-negative");
    } else if (k == "ou_tau") {
      cfg.learner.ou_tau = to_double(kv);
      if (cfg.learner.ou_tau <= 0.0) fail(kv, "must be positive");
    } else if (k == "target_smooth_sigma") {
      cfg.learner.smooth_sigma = static_cast<float>(to_double(kv));
      if (cfg.learner.smooth_sigma < 0.0f) fail(kv, "must be non-negative");
    } else if (k == "target_smooth_clip") {
      cfg.learner.smooth_clip = static_cast<float>(to_double(kv));
      if (cfg.learner.smooth_clip < 0.0f) fail(kv, "must be non-negative");
    } else if (k == "max_env_steps") {
      cfg.trainer.max_env_steps = to_int(kv);
      if (cfg.trainer.max_env_steps < 0) fail(kv, "must be >= 0");
    } else if (k == "max_episodes") {
      cfg.trainer.max_episodes = to_int(kv);
      if (cfg.trainer.max_episodes < 0) fail(kv, "must be >= 0");
    } else if (k == "max_wall_seconds") {
      cfg.trainer.max_wall_seconds = to_double(kv);
      if (cfg.trainer.max_wall_seconds < 0.0) fail(kv, "must be >= 0");
    } else if (k == "eval_every_episodes") {
      cfg.trainer.eval_every_episodes = to_int(kv);
      if (cfg.trainer.eval_every_episodes < 0) fail(kv, "must be >= 0");
    } else if (k == "eval_episodes") {
      cfg.trainer.eval_episodes = to_positive_int(kv);
    } else if (k == "stop_eval_vx") {
      cfg.trainer.stop_eval_vx = to_double(kv);
      if (cfg.trainer.stop_eval_vx < 0.0) fail(kv, "must be >= 0");
    } else if (k == "checkpoint_every_episodes") {
      cfg.trainer.checkpoint_every_episodes = to_int(kv);
      if (cfg.trainer.checkpoint_every_episodes < 0) fail(kv, "must be >= 0");
    } else if (k == "final_checkpoint_with_buffer") {
      cfg.trainer.final_checkpoint_with_buffer = to_bool(kv);
    } else if (k == "gait_reference") {
      cfg.gait_reference = kv.value;
    } else {
      fail(kv, "unknown key");
    }
  }

  // The control period must hold a whole number of physics steps.
  const double control_dt = 1.0 / control_rate_hz;
  const double ratio = control_dt / physics_dt;
  const int substeps = static_cast<int>(std::llround(ratio));
  if (substeps < 1 || std::abs(ratio - substeps) > 1e-9 * ratio) {
    throw ParseError(
        "config: physics_dt must divide the control period exactly");
  }
  cfg.env.control_dt = control_dt;
  cfg.env.substeps = substeps;

  if (cfg.model_path.empty()) throw ParseError("config: 'model' is required");
  if (cfg.learner.buffer_capacity <
      static_cast<std::size_t>(cfg.learner.batch_size)) {
    throw ParseError("config: buffer_capacity must be >= batch_size");
  }

  cfg.trainer.seed = cfg.seed;
  cfg.trainer.gait_reference_path = cfg.gait_reference;
  cfg.config_hash = fnv1a64(text);
  cfg.trainer.config_hash = cfg.config_hash;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_run_config(buf.str());

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  const auto resolve = [&base](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };
  cfg.model_path = resolve(cfg.model_path);
  if (!std::filesystem::exists(cfg.model_path)) {
    throw ParseError("config: model file not found: " + cfg.model_path);
  }
  if (!cfg.gait_reference.empty()) {
    cfg.gait_reference = resolve(cfg.gait_reference);
    if (!std::filesystem::exists(cfg.gait_reference)) {
      throw ParseError("config: gait reference not found: " +
                       cfg.gait_reference);
    }
    cfg.trainer.gait_reference_path = cfg.gait_reference;
  }
  return cfg;
}

Terrain make_terrain(const RunConfig& cfg) {
  if (cfg.terrain == "flat") return Terrain::flat();
  const std::uint64_t seed =
      cfg.terrain_seed != 0 ? cfg.terrain_seed : cfg.seed;
  return Terrain::sloped_tiles(seed, cfg.terrain_tiles,
                               cfg.terrain_tile_length,
                               cfg.terrain_max_slope_deg, cfg.terrain_run_in);
}

void apply_mode(const std::string& mode, RunConfig* cfg) {
  if (mode != "walk" && mode != "run") {
    throw ParseError("mode must be walk or run, got '" + mode + "'");
  }
  cfg->mode = mode;
  if (mode == "run") {
    cfg->env.u_max = 1.0;
    cfg->env.running_task = true;
    cfg->env.w_collision = 1.0;
  } else {
    cfg->env.u_max = 0.5;
    cfg->env.running_task = false;
    cfg->env.w_collision = 0.0;
  }
}

void apply_ablation(const std::string& variant, RunConfig* cfg) {
  if (variant == "ours") return;
  if (variant == "no-adapt") {
    cfg->adapt.delta_alpha0 = 0.0;
    return;
  }
  if (variant == "no-effort") {
    cfg->adapt.delta_alpha0 = 0.0;
    cfg->env.weights.w1 = 0.0;
    cfg->env.weights.w2 = 0.0;
    cfg->env.u_max = 1.0;
    return;
  }
  if (variant == "only-vel") {
    cfg->adapt.delta_alpha0 = 0.0;
    cfg->env.weights.w1 = 0.0;
    cfg->env.weights.w2 = 0.0;
    cfg->env.weights.w3 = 0.0;
    cfg->env.weights.w4 = 0.0;
    cfg->env.u_max = 1.0;
    return;
  }
  throw std::invalid_argument("unknown ablation variant '" + variant + "'");
}

}  // namespace walklab
