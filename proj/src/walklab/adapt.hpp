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

// Adaptive effort weighting. The effort weight alpha starts at zero so the
// agent first learns to walk at all; once the smoothed task return clears a
// threshold, and has stayed there long enough for the smoothed confidence to
// cross 0.5, alpha is ratcheted up by a step size that shrank while
// confidence was building. Whenever the smoothed return drops back below the
// threshold, alpha backs off. Updates run once per finished episode.

#ifndef WALKLAB_ADAPT_HPP_
#define WALKLAB_ADAPT_HPP_

#include <string>

namespace walklab {

struct AdaptConfig {
  double threshold = 1000.0;     // smoothed-return gate
  double beta = 0.8;             // smoothing factor for r_mean and c_mean
  double delta_alpha0 = 9e-4;    // initial alpha step
  double lambda = 0.9;           // step decay while confidence builds
};

struct AdaptState {
  double alpha = 0.0;
  double delta_alpha = 9e-4;
  double r_mean = 0.0;
  double c_mean = 0.0;

  static AdaptState initial(const AdaptConfig& cfg);
};

// One adaptation step given a finished episode's task return. Exactly one of
// the three branches runs, using the confidence value from before this call:
//   r_mean > threshold, c_mean <  0.5: decay the step size.
//   r_mean > threshold, c_mean >= 0.5: raise alpha by the step size.
//   otherwise:                         lower alpha (floored at zero).
// The confidence average is refreshed after the branch.
void adapt_update(const AdaptConfig& cfg, double episode_return,
                  AdaptState* state);

// JSON round trip for checkpointing. snapshot() emits a single-line object;
// restore() throws ParseError on malformed input or missing fields. Doubles
// survive the round trip bit-exactly.
std::string adapt_snapshot(const AdaptState& state);
AdaptState adapt_restore(const std::string& json_text);

}  // namespace walklab

#endif  // WALKLAB_ADAPT_HPP_
