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

#include "walklab/runio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "walklab/common.hpp"
#include "walklab/reward.hpp"

namespace walklab {
namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string provenance_header(const Provenance& prov) {
  std::ostringstream out;
  out << "# walklab " << prov.tool << "\n";
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(prov.config_hash));
  out << "# config_hash " << hex << "\n";
  out << "# seed " << prov.seed << "\n";
  for (const auto& [key, value] : prov.extra) {
    out << "# " << key << ' ' << value << "\n";
  }
  return out.str();
}

CsvWriter::CsvWriter(const std::string& path, const Provenance& prov,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::trunc), path_(path), n_cols_(columns.size()) {
  if (!out_) throw IoError("cannot open for writing: " + path);
  out_ << provenance_header(prov) << join(columns) << "\n";
  out_.flush();
  if (!out_) throw IoError("failed writing: " + path);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_) {
    throw std::logic_error("CsvWriter: column count mismatch");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out_.put(',');
    out_ << format_double(values[i]);
  }
  out_.put('\n');
  out_.flush();
  if (!out_) throw IoError("failed writing: " + path_);
}

const std::vector<std::string> kMetricsColumns = {
    "episode", "steps",  "task_return", "total_return",
    "mean_effort", "alpha", "r_mean", "exp_match"};

void write_metrics_row(CsvWriter* writer, const EpisodeRow& row) {
  writer->row({static_cast<double>(row.episode),
               static_cast<double>(row.steps), row.task_return,
               row.total_return, row.mean_effort, row.alpha, row.r_mean,
               row.exp_match});
}

const std::vector<std::string> kStepLogColumns = {
    "episode", "step", "r_vel", "effort_activity", "effort_smooth",
    "effort_nactive", "pain_limits", "pain_grf", "total"};

void write_step_row(CsvWriter* writer, std::int64_t episode_id, int step,
                    const RewardBreakdown& breakdown, double alpha) {
  writer->row({static_cast<double>(episode_id), static_cast<double>(step),
               breakdown.r_vel, alpha * breakdown.effort_activity,
               breakdown.effort_smooth, breakdown.effort_nactive,
               breakdown.pain_limits, breakdown.pain_grf,
               total_reward(breakdown, alpha)});
}

void write_rollout_csv(const std::string& path, const EpisodeTrace& trace,
                       const ModelSpec& model, double dt,
                       const Provenance& prov) {
  std::vector<std::string> columns;
  columns.push_back("t");
  for (const Joint& j : model.joints) columns.push_back("q." + j.name);
  for (const Joint& j : model.joints) columns.push_back("qd." + j.name);
  for (const MuscleParams& m : model.muscles) columns.push_back("a." + m.name);
  for (const MuscleParams& m : model.muscles) columns.push_back("u." + m.name);
  // Bipeds name their feet; anything else falls back to slot numbers.
  if (model.n_feet == 2) {
    columns.push_back("grf_left");
    columns.push_back("grf_right");
  } else {
    for (int f = 0; f < model.n_feet; ++f) {
      columns.push_back("grf_" + std::to_string(f));
    }
  }
  columns.push_back("com_vx");
  columns.push_back("com_x");

  Provenance full = prov;
  full.extra.emplace_back("dt", format_double(dt));
  full.extra.emplace_back("body_weight", format_double(model.body_weight()));

  CsvWriter writer(path, full, columns);
  std::vector<double> values(columns.size());
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    std::size_t k = 0;
    values[k++] = trace.t[i];
    for (Eigen::Index j = 0; j < trace.q[i].size(); ++j) {
      values[k++] = trace.q[i][j];
    }
    for (Eigen::Index j = 0; j < trace.qdot[i].size(); ++j) {
      values[k++] = trace.qdot[i][j];
    }
    for (Eigen::Index j = 0; j < trace.a[i].size(); ++j) {
      values[k++] = trace.a[i][j];
    }
    for (Eigen::Index j = 0; j < trace.u[i].size(); ++j) {
      values[k++] = trace.u[i][j];
    }
    for (int f = 0; f < model.n_feet; ++f) {
      values[k++] = static_cast<Eigen::Index>(f) < trace.grf[i].size()
                        ? trace.grf[i][f]
                        : 0.0;
    }
    values[k++] = trace.com_vx[i];
    values[k++] = trace.com_x[i];
    if (k != values.size()) {
      throw std::logic_error("rollout trace width mismatch");
    }
    writer.row(values);
  }
}

int CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const std::string* CsvTable::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

double CsvTable::meta_number(const std::string& key) const {
  const std::string* v = meta_value(key);
  if (v == nullptr) {
    throw ParseError("csv is missing provenance entry '" + key + "'");
  }
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw ParseError("csv provenance entry '" + key + "' is not a number");
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv: " + path);
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string rest = line.substr(1);
      const std::size_t b = rest.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      rest = rest.substr(b);
      const std::size_t split = rest.find_first_of(" \t");
      if (split == std::string::npos) {
        table.meta.emplace_back(rest, "");
      } else {
        const std::size_t vb = rest.find_first_not_of(" \t", split);
        table.meta.emplace_back(rest.substr(0, split), rest.substr(vb));
      }
      continue;
    }
    if (!header_seen) {
      table.columns = split_csv(line);
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != table.columns.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": row width does not match header");
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        std::size_t used = 0;
        row[i] = std::stod(fields[i], &used);
        if (used != fields[i].size()) throw std::invalid_argument(fields[i]);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": bad number '" + fields[i] + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError(path + ": no header row");
  return table;
}

Rollout rollout_from_csv(const CsvTable& table) {
  Rollout rollout;
  rollout.dt = table.meta_number("dt");
  rollout.body_weight = table.meta_number("body_weight");

  const auto need = [&table](const std::string& name) {
    const int c = table.col(name);
    if (c < 0) {
      throw ParseError("rollout csv is missing signal column '" + name + "'");
    }
    return c;
  };
  const int c_hip[2] = {need("q.hip_l"), need("q.hip_r")};
  const int c_knee[2] = {need("q.knee_l"), need("q.knee_r")};
  const int c_ankle[2] = {need("q.ankle_l"), need("q.ankle_r")};
  const int c_grf[2] = {need("grf_left"), need("grf_right")};
  const int c_com_vx = need("com_vx");
  const int c_com_x = need("com_x");

  std::vector<int> act_cols;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i].rfind("a.", 0) == 0) {
      act_cols.push_back(static_cast<int>(i));
    }
  }
  if (act_cols.empty()) {
    throw ParseError("rollout csv has no activation columns (a.*)");
  }

  const std::size_t n = table.rows.size();
  for (int leg = 0; leg < 2; ++leg) {
    rollout.hip[leg].resize(n);
    rollout.knee[leg].resize(n);
    rollout.ankle[leg].resize(n);
    rollout.grf[leg].resize(n);
  }
  rollout.activations.resize(static_cast<Eigen::Index>(act_cols.size()),
                             static_cast<Eigen::Index>(n));
  rollout.com_x.resize(n);
  rollout.com_vx.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& row = table.rows[i];
    for (int leg = 0; leg < 2; ++leg) {
      rollout.hip[leg][i] = row[static_cast<std::size_t>(c_hip[leg])];
      rollout.knee[leg][i] = row[static_cast<std::size_t>(c_knee[leg])];
      rollout.ankle[leg][i] = row[static_cast<std::size_t>(c_ankle[leg])];
      rollout.grf[leg][i] = row[static_cast<std::size_t>(c_grf[leg])];
    }
    for (std::size_t m = 0; m < act_cols.size(); ++m) {
      rollout.activations(static_cast<Eigen::Index>(m),
                          static_cast<Eigen::Index>(i)) =
          row[static_cast<std::size_t>(act_cols[m])];
    }
    rollout.com_vx[i] = row[static_cast<std::size_t>(c_com_vx)];
    rollout.com_x[i] = row[static_cast<std::size_t>(c_com_x)];
  }
  rollout.validate();
  return rollout;
}

}  // namespace walklab
