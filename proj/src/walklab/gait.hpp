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

#ifndef WALKLAB_GAIT_HPP_
#define WALKLAB_GAIT_HPP_

#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace walklab {

// Default gait-cycle analysis settings. Strikes are detected when vertical
// GRF rises above 5% body weight; repeat crossings within 100 ms are merged.
// Cycles are resampled to 100 points spanning 0..100% inclusive.
inline constexpr int kGaitPoints = 100;
inline constexpr double kStrikeThresholdBw = 0.05;
inline constexpr double kStrikeDebounceSeconds = 0.1;

// Uniformly sampled walking episode, legs indexed 0 = left, 1 = right.
// Joint angles are in radians using the model sign conventions; grf is the
// vertical ground reaction force per foot in newtons.
struct Rollout {
  double dt = 0.0;
  double body_weight = 0.0;
  std::array<std::vector<double>, 2> hip;
  std::array<std::vector<double>, 2> knee;
  std::array<std::vector<double>, 2> ankle;
  std::array<std::vector<double>, 2> grf;
  Eigen::MatrixXd activations;  // one column per sample
  std::vector<double> com_x;
  std::vector<double> com_vx;

  std::size_t samples() const { return com_x.size(); }
  // Throws ParseError if series lengths disagree or dt <= 0.
  void validate() const;
};

// One foot-strike-to-foot-strike segment with every signal resampled to a
// fixed number of points over the cycle.
struct GaitCycle {
  int leg = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::map<std::string, Eigen::VectorXd> traces;
};

// Per-signal pointwise mean and standard deviation over % gait cycle.
// Angles are stored in degrees and GRF in body weights.
struct ReferenceBand {
  int points = 0;
  std::map<std::string, std::pair<Eigen::VectorXd, Eigen::VectorXd>> signals;
};

struct MatchReport {
  std::map<std::string, double> fractions;
  double aggregate = std::numeric_limits<double>::quiet_NaN();
  double avg_effort = 0.0;
  double distance = 0.0;
  int cycles = 0;
};

// Indices where grf crosses from <= threshold to > threshold, keeping only
// crossings at least debounce_seconds after the previously kept one.
std::vector<std::size_t> detect_foot_strikes(const std::vector<double>& grf,
                                             double dt, double threshold,
                                             double debounce_seconds);

// Analysis-frame signals for one leg: hip/knee/ankle in degrees with knee
// flexion positive, grf in body weights. Keys: hip, knee, ankle, grf.
std::map<std::string, std::vector<double>> gait_signals(const Rollout& rollout,
                                                        int leg);

// Splits signals at consecutive strikes and linearly resamples each segment
// to `points` samples. Fewer than two strikes yields an empty list.
std::vector<GaitCycle> segment_and_normalize(
    const std::map<std::string, std::vector<double>>& signals, int leg,
    const std::vector<std::size_t>& strikes, int points);

// Pointwise mean across cycles per signal. Throws std::invalid_argument on
// an empty input or mismatched resample lengths.
std::map<std::string, Eigen::VectorXd> average_cycles(
    const std::vector<GaitCycle>& cycles);

// Pointwise mean and population standard deviation across cycles.
ReferenceBand band_from_cycles(const std::vector<GaitCycle>& cycles);

// Fraction of points with |trace - mean| <= std, per signal present in both
// inputs (boundary counts as inside). Throws on resample-length mismatch.
std::map<std::string, double> experimental_match(
    const std::map<std::string, Eigen::VectorXd>& mean_traces,
    const ReferenceBand& band);

// avg_effort: mean of a^3 over all muscles and samples.
// distance: final minus initial COM x.
void summary_metrics(const Rollout& rollout, double* avg_effort,
                     double* distance);

// Strike detection and segmentation for both legs of one rollout.
std::vector<GaitCycle> collect_cycles(const Rollout& rollout, int points);

// Match fractions of the pooled cycle mean against `band` (skipped when
// band is null), plus effort and distance. `cycles` counts pooled cycles.
MatchReport analyze_cycles(const std::vector<GaitCycle>& cycles,
                           const ReferenceBand* band);
MatchReport analyze_rollout(const Rollout& rollout, const ReferenceBand* band);

// CSV with header signal,percent,mean,std; percent = 100*i/(points-1).
ReferenceBand parse_reference_band(const std::string& text);
ReferenceBand load_reference_band(const std::string& path);
std::string reference_band_csv(const ReferenceBand& band);

}  // namespace walklab

#endif  // WALKLAB_GAIT_HPP_
