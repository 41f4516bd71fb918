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

#include "walklab/terrain.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <utility>

#include "walklab/common.hpp"
#include "walklab/rng.hpp"

namespace walklab {

Terrain Terrain::flat() {
  Terrain t;
  t.kind_ = Kind::kFlat;
  return t;
}

Terrain Terrain::sloped_tiles(uint64_t seed, int n_tiles, double tile_length,
                              double max_slope_deg, double run_in) {
  assert(n_tiles >= 1 && tile_length > 0.0 && max_slope_deg >= 0.0);
  Terrain t;
  t.kind_ = Kind::kSlopedTiles;
  t.knots_.reserve(static_cast<size_t>(n_tiles) + 2);
  t.knots_.push_back({-run_in, 0.0});
  t.knots_.push_back({0.0, 0.0});
  SplitMix64 rng(seed);
  double x = 0.0;
  double y = 0.0;
  for (int i = 0; i < n_tiles; ++i) {
    const double slope_deg = -max_slope_deg + 2.0 * max_slope_deg * rng.uniform();
    x += tile_length;
    y += tile_length * std::tan(slope_deg * M_PI / 180.0);
    t.knots_.push_back({x, y});
  }
  return t;
}

Terrain Terrain::from_knots(Kind kind, std::vector<TerrainKnot> knots) {
  for (size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].x <= knots[i - 1].x) {
      throw ParseError("terrain knots must be strictly increasing in x");
    }
  }
  Terrain t;
  t.kind_ = kind;
  t.knots_ = std::move(knots);
  return t;
}

double Terrain::height(double x) const {
  if (knots_.empty()) return 0.0;
  if (x <= knots_.front().x) return knots_.front().y;
  if (x >= knots_.back().x) return knots_.back().y;
  // Knot counts are small; linear scan is fine.
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (x <= knots_[i].x) {
      const TerrainKnot& a = knots_[i - 1];
      const TerrainKnot& b = knots_[i];
      const double s = (x - a.x) / (b.x - a.x);
      return a.y + s * (b.y - a.y);
    }
  }
  return knots_.back().y;
}

void Terrain::height_and_normal(double x, double* y,
                                Eigen::Vector2d* normal) const {
  double slope = 0.0;
  if (knots_.empty() || x <= knots_.front().x || x >= knots_.back().x) {
    *y = knots_.empty() ? 0.0
                        : (x <= knots_.front().x ? knots_.front().y
                                                 : knots_.back().y);
  } else {
    *y = knots_.back().y;
    for (size_t i = 1; i < knots_.size(); ++i) {
      if (x <= knots_[i].x) {
        const TerrainKnot& a = knots_[i - 1];
        const TerrainKnot& b = knots_[i];
        slope = (b.y - a.y) / (b.x - a.x);
        *y = a.y + (x - a.x) * slope;
        break;
      }
    }
  }
  const double inv_len = 1.0 / std::sqrt(1.0 + slope * slope);
  *normal = Eigen::Vector2d(-slope * inv_len, inv_len);
}

std::string Terrain::to_csv() const {
  std::string out = "x,y\n";
  char line[64];
  if (knots_.empty()) {
    out += "0,0\n";
    return out;
  }
  for (const TerrainKnot& k : knots_) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", k.x, k.y);
    out += line;
  }
  return out;
}

}  // namespace walklab
