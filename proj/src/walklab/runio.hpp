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

// CSV emission and ingestion for every command. Emitted files start with
// '#' provenance lines (tool name, config hash, seed, and any extras such
// as dt or body weight), then a header row, then numeric rows formatted so
// doubles survive a round trip. No timestamps: the same seed and config
// produce byte-identical files.

#ifndef WALKLAB_RUNIO_HPP_
#define WALKLAB_RUNIO_HPP_

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "walklab/agent.hpp"
#include "walklab/gait.hpp"
#include "walklab/model.hpp"

namespace walklab {

struct Provenance {
  std::string tool;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

// Shortest text that parses back to the same double; NaN prints as "nan".
std::string format_double(double v);

std::string provenance_header(const Provenance& prov);

// Streaming CSV writer, flushed after every row so partial runs still
// leave usable logs.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const Provenance& prov,
            const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t n_cols_;
};

// Training metrics log, one row per episode.
extern const std::vector<std::string> kMetricsColumns;
void write_metrics_row(CsvWriter* writer, const EpisodeRow& row);

// Per-step reward components as applied: the activity term is multiplied
// by the effort weight in force at that step.
extern const std::vector<std::string> kStepLogColumns;
void write_step_row(CsvWriter* writer, std::int64_t episode_id, int step,
                    const RewardBreakdown& breakdown, double alpha);

// One rollout per file: time, joint angles and velocities, activations,
// excitations, per-foot GRF, COM velocity and position. dt and body weight
// ride along as provenance so gait analysis needs no model file.
void write_rollout_csv(const std::string& path, const EpisodeTrace& trace,
                       const ModelSpec& model, double dt,
                       const Provenance& prov);

// Parsed CSV with its provenance lines.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const;  // -1 when absent
  // Meta lookup; throws ParseError when the key is required but missing.
  const std::string* meta_value(const std::string& key) const;
  double meta_number(const std::string& key) const;
};

CsvTable read_csv(const std::string& path);

// Rebuilds a gait rollout from a rollout CSV. Throws ParseError when a
// required signal column or provenance entry is missing.
Rollout rollout_from_csv(const CsvTable& table);

}  // namespace walklab

#endif  // WALKLAB_RUNIO_HPP_
