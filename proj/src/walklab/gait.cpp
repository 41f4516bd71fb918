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

#include "walklab/gait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "walklab/common.hpp"

namespace walklab {
namespace {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

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
  for (std::string& f : fields) {
    std::size_t b = f.find_first_not_of(" \t");
    std::size_t e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " value '" + s + "'");
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_series(const Rollout& r, const std::vector<double>& s,
                  const char* name) {
  if (s.size() != r.samples()) {
    throw ParseError(std::string("rollout series '") + name +
                     "' length mismatch");
  }
}

}  // namespace

void Rollout::validate() const {
  if (dt <= 0.0) throw ParseError("rollout dt must be positive");
  if (body_weight <= 0.0) throw ParseError("rollout body weight must be positive");
  for (int leg = 0; leg < 2; ++leg) {
    check_series(*this, hip[leg], "hip");
    check_series(*this, knee[leg], "knee");
    check_series(*this, ankle[leg], "ankle");
    check_series(*this, grf[leg], "grf");
  }
  if (static_cast<std::size_t>(activations.cols()) != samples()) {
    throw ParseError("rollout activation series length mismatch");
  }
  if (com_vx.size() != samples()) {
    throw ParseError("rollout series 'com_vx' length mismatch");
  }
}

std::vector<std::size_t> detect_foot_strikes(const std::vector<double>& grf,
                                             double dt, double threshold,
                                             double debounce_seconds) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  std::vector<std::size_t> strikes;
  if (grf.size() < 2) return strikes;
  const std::size_t gap = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(debounce_seconds / dt)));
  for (std::size_t i = 1; i < grf.size(); ++i) {
    if (grf[i - 1] <= threshold && grf[i] > threshold) {
      if (strikes.empty() || i - strikes.back() >= gap) strikes.push_back(i);
    }
  }
  return strikes;
}

std::map<std::string, std::vector<double>> gait_signals(const Rollout& rollout,
                                                        int leg) {
  if (leg < 0 || leg > 1) throw std::invalid_argument("leg must be 0 or 1");
  rollout.validate();
  const std::size_t n = rollout.samples();
  std::map<std::string, std::vector<double>> out;
  std::vector<double> hip(n), knee(n), ankle(n), grf(n);
  for (std::size_t i = 0; i < n; ++i) {
    hip[i] = rollout.hip[leg][i] * kRadToDeg;
    // The model measures knee flexion negative; gait plots use flexion
    // positive, so the sign is flipped here once for all downstream use.
    knee[i] = -rollout.knee[leg][i] * kRadToDeg;
    ankle[i] = rollout.ankle[leg][i] * kRadToDeg;
    grf[i] = rollout.grf[leg][i] / rollout.body_weight;
  }
  out.emplace("hip", std::move(hip));
  out.emplace("knee", std::move(knee));
  out.emplace("ankle", std::move(ankle));
  out.emplace("grf", std::move(grf));
  return out;
}

std::vector<GaitCycle> segment_and_normalize(
    const std::map<std::string, std::vector<double>>& signals, int leg,
    const std::vector<std::size_t>& strikes, int points) {
  if (points < 2) throw std::invalid_argument("points must be at least 2");
  std::vector<GaitCycle> cycles;
  if (strikes.size() < 2) return cycles;
  for (std::size_t k = 0; k + 1 < strikes.size(); ++k) {
    const std::size_t s0 = strikes[k];
    const std::size_t s1 = strikes[k + 1];
    if (s1 <= s0) throw std::invalid_argument("strikes must be increasing");
    GaitCycle cycle;
    cycle.leg = leg;
    cycle.start = s0;
    cycle.end = s1;
    for (const auto& [name, series] : signals) {
      if (s1 >= series.size()) {
        throw std::invalid_argument("strike index past end of series");
      }
      Eigen::VectorXd trace(points);
      for (int i = 0; i < points; ++i) {
        const double pos =
            static_cast<double>(s0) + (static_cast<double>(s1 - s0) * i) /
                                          static_cast<double>(points - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        trace[i] = (frac == 0.0) ? series[lo]
                                 : series[lo] * (1.0 - frac) +
                                       series[lo + 1] * frac;
      }
      cycle.traces.emplace(name, std::move(trace));
    }
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

ReferenceBand band_from_cycles(const std::vector<GaitCycle>& cycles) {
  if (cycles.empty()) throw std::invalid_argument("no gait cycles to average");
  ReferenceBand band;
  const GaitCycle& first = cycles.front();
  if (first.traces.empty()) throw std::invalid_argument("cycle has no traces");
  band.points = static_cast<int>(first.traces.begin()->second.size());
  const double n = static_cast<double>(cycles.size());
  for (const auto& [name, trace0] : first.traces) {
    if (trace0.size() != band.points) {
      throw std::invalid_argument("cycle trace length mismatch");
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(band.points);
    for (const GaitCycle& c : cycles) {
      auto it = c.traces.find(name);
      if (it == c.traces.end() || it->second.size() != band.points) {
        throw std::invalid_argument("cycle trace length mismatch");
      }
      mean += it->second;
    }
    mean /= n;
    Eigen::VectorXd var = Eigen::VectorXd::Zero(band.points);
    for (const GaitCycle& c : cycles) {
      const Eigen::VectorXd d = c.traces.at(name) - mean;
      var += d.cwiseProduct(d);
    }
    band.signals.emplace(name,
                         std::make_pair(mean, (var / n).cwiseSqrt().eval()));
  }
  return band;
}

std::map<std::string, Eigen::VectorXd> average_cycles(
    const std::vector<GaitCycle>& cycles) {
  ReferenceBand band = band_from_cycles(cycles);
  std::map<std::string, Eigen::VectorXd> out;
  for (auto& [name, ms] : band.signals) out.emplace(name, std::move(ms.first));
  return out;
}

std::map<std::string, double> experimental_match(
    const std::map<std::string, Eigen::VectorXd>& mean_traces,
    const ReferenceBand& band) {
  std::map<std::string, double> fractions;
  for (const auto& [name, ms] : band.signals) {
    auto it = mean_traces.find(name);
    if (it == mean_traces.end()) continue;
    const Eigen::VectorXd& trace = it->second;
    if (trace.size() != ms.first.size()) {
      throw std::invalid_argument("trace and band resample lengths differ");
    }
    int inside = 0;
    for (Eigen::Index i = 0; i < trace.size(); ++i) {
      if (std::abs(trace[i] - ms.first[i]) <= ms.second[i]) ++inside;
    }
    fractions[name] = static_cast<double>(inside) /
                      static_cast<double>(trace.size());
  }
  return fractions;
}

void summary_metrics(const Rollout& rollout, double* avg_effort,
                     double* distance) {
  *avg_effort = rollout.activations.size() == 0
                    ? 0.0
                    : rollout.activations.array().cube().mean();
  *distance =
      rollout.com_x.empty() ? 0.0 : rollout.com_x.back() - rollout.com_x.front();
}

std::vector<GaitCycle> collect_cycles(const Rollout& rollout, int points) {
  rollout.validate();
  std::vector<GaitCycle> cycles;
  for (int leg = 0; leg < 2; ++leg) {
    const auto signals = gait_signals(rollout, leg);
    const auto strikes =
        detect_foot_strikes(signals.at("grf"), rollout.dt, kStrikeThresholdBw,
                            kStrikeDebounceSeconds);
    auto leg_cycles = segment_and_normalize(signals, leg, strikes, points);
    for (GaitCycle& c : leg_cycles) cycles.push_back(std::move(c));
  }
  return cycles;
}

MatchReport analyze_cycles(const std::vector<GaitCycle>& cycles,
                           const ReferenceBand* band) {
  MatchReport report;
  report.cycles = static_cast<int>(cycles.size());
  if (band != nullptr && !cycles.empty()) {
    report.fractions = experimental_match(average_cycles(cycles), *band);
    if (!report.fractions.empty()) {
      double sum = 0.0;
      for (const auto& [name, f] : report.fractions) sum += f;
      report.aggregate = sum / static_cast<double>(report.fractions.size());
    }
  }
  return report;
}

MatchReport analyze_rollout(const Rollout& rollout, const ReferenceBand* band) {
  MatchReport report = analyze_cycles(collect_cycles(rollout, kGaitPoints), band);
  summary_metrics(rollout, &report.avg_effort, &report.distance);
  return report;
}

ReferenceBand parse_reference_band(const std::string& text) {
  ReferenceBand band;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::map<std::string, std::vector<std::pair<double, double>>> rows;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = split_csv(line);
    if (!header_seen) {
      if (f.size() != 4 || f[0] != "signal" || f[1] != "percent" ||
          f[2] != "mean" || f[3] != "std") {
        throw ParseError("reference band header must be signal,percent,mean,std");
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 4) throw ParseError("reference band row needs 4 fields");
    const double mean = parse_number(f[2], "mean");
    const double sd = parse_number(f[3], "std");
    parse_number(f[1], "percent");
    if (sd < 0.0) throw ParseError("reference band std must be non-negative");
    if (rows.find(f[0]) == rows.end()) order.push_back(f[0]);
    rows[f[0]].emplace_back(mean, sd);
  }
  if (!header_seen) throw ParseError("reference band file is empty");
  if (rows.empty()) throw ParseError("reference band has no rows");
  band.points = static_cast<int>(rows.begin()->second.size());
  for (const std::string& name : order) {
    const auto& pts = rows.at(name);
    if (static_cast<int>(pts.size()) != band.points) {
      throw ParseError("reference band signals have unequal point counts");
    }
    Eigen::VectorXd mean(band.points), sd(band.points);
    for (int i = 0; i < band.points; ++i) {
      mean[i] = pts[i].first;
      sd[i] = pts[i].second;
    }
    band.signals.emplace(name, std::make_pair(std::move(mean), std::move(sd)));
  }
  return band;
}

ReferenceBand load_reference_band(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reference band file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_reference_band(buf.str());
}

std::string reference_band_csv(const ReferenceBand& band) {
  std::ostringstream out;
  out << "signal,percent,mean,std\n";
  for (const auto& [name, ms] : band.signals) {
    for (int i = 0; i < band.points; ++i) {
      const double percent =
          band.points > 1 ? 100.0 * i / static_cast<double>(band.points - 1)
                          : 0.0;
      out << name << ',' << format_number(percent) << ','
          << format_number(ms.first[i]) << ',' << format_number(ms.second[i])
          << '\n';
    }
  }
  return out.str();
}

}  // namespace walklab
