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

// Height-field terrains: flat training ground and the randomized sloped-tile
// evaluation course. Profiles are piecewise linear and immutable after
// construction. Tile slopes come from SplitMix64 so a seed produces the same
// terrain on every platform.

#ifndef WALKLAB_TERRAIN_HPP_
#define WALKLAB_TERRAIN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace walklab {

struct TerrainKnot {
  double x = 0.0;
  double y = 0.0;
};

class Terrain {
 public:
  enum class Kind { kFlat, kSlopedTiles };

  // Flat ground, height 0 everywhere.
  static Terrain flat();

  // Flat run-in of `run_in` meters ending at x = 0, then n_tiles consecutive
  // tiles of tile_length meters whose slopes are drawn uniformly from
  // [-max_slope_deg, +max_slope_deg]. Heights accumulate across tiles.
  static Terrain sloped_tiles(uint64_t seed, int n_tiles = 10,
                              double tile_length = 1.0,
                              double max_slope_deg = 5.0,
                              double run_in = 5.0);

  // Rebuilds a terrain from a serialized knot list (checkpoint restore).
  // Knots must be strictly increasing in x; flat terrains have none.
  static Terrain from_knots(Kind kind, std::vector<TerrainKnot> knots);

  // Height and outward (upward) unit normal at x. The profile extends flat
  // beyond both end knots.
  double height(double x) const;
  void height_and_normal(double x, double* y, Eigen::Vector2d* normal) const;

  Kind kind() const { return kind_; }
  const std::vector<TerrainKnot>& knots() const { return knots_; }

  // Knot list as CSV rows "x,y" (used by the terrain-gen command).
  std::string to_csv() const;

 private:
  Kind kind_ = Kind::kFlat;
  std::vector<TerrainKnot> knots_;  // empty for flat ground
};

}  // namespace walklab

#endif  // WALKLAB_TERRAIN_HPP_
