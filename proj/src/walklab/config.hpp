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

// Run configuration: one flat key-value document drives every command.
// Format mirrors the model files: the first non-comment line must be
// `schema walklab-config-v1`, then `key value` pairs, '#' comments.
// Unknown keys are errors, except dep_* and mpo_* keys, which belong to
// learners this build does not ship; those parse fine and are reported
// back so callers can warn instead of failing.

#ifndef WALKLAB_CONFIG_HPP_
#define WALKLAB_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "walklab/agent.hpp"
#include "walklab/env.hpp"
#include "walklab/terrain.hpp"

namespace walklab {

struct RunConfig {
  std::string model_path;
  std::string mode = "walk";  // walk | run
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  // Training/evaluation terrain.
  std::string terrain = "flat";  // flat | rough
  std::uint64_t terrain_seed = 0;  // 0: derived from seed
  int terrain_tiles = 10;
  double terrain_tile_length = 1.0;
  double terrain_max_slope_deg = 5.0;
  double terrain_run_in = 5.0;

  EnvConfig env;
  LearnerConfig learner;
  AdaptConfig adapt;
  TrainerOptions trainer;  // seed and gait reference are mirrored in here

  std::string gait_reference;

  // dep_*/mpo_* keys seen in the file; accepted but not used.
  std::vector<std::string> flagged;
  // FNV-1a of the document text, stamped into emitted files.
  std::uint64_t config_hash = 0;
};

// Parses and validates a config document. Mode defaults are applied first
// (run mode raises the action clip to 1.0 and switches the reward to the
// velocity-minus-collision form), then explicit keys override them.
RunConfig parse_run_config(const std::string& text);

// Reads the file, resolves a relative model/gait-reference path against the
// config file's directory, and checks that the model file exists.
RunConfig load_run_config(const std::string& path);

// Builds the terrain the config asks for. Rough terrain uses terrain_seed,
// or the run seed when terrain_seed is 0.
Terrain make_terrain(const RunConfig& cfg);

// Sets the mode and its dependent defaults (excitation clip, reward form,
// collision cost). The parser calls this before reading other keys; the CLI
// calls it again to honor a --mode override, so an explicit clip key in the
// file does not survive a mode switch from the command line.
void apply_mode(const std::string& mode, RunConfig* cfg);

// Applies one reward-ablation variant in place. Names: ours (no change),
// no-adapt (effort weight pinned at zero), no-effort (additionally zeroes
// the smoothness and active-count weights and lifts the action clip to 1),
// only-vel (additionally zeroes the pain weights). Throws on other names.
void apply_ablation(const std::string& variant, RunConfig* cfg);

}  // namespace walklab

#endif  // WALKLAB_CONFIG_HPP_
