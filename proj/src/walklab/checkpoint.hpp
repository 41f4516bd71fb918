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

#ifndef WALKLAB_CHECKPOINT_HPP_
#define WALKLAB_CHECKPOINT_HPP_

#include <memory>
#include <string>

namespace walklab {

class Trainer;

// Binary training checkpoint: a magic string, a length-prefixed JSON header
// (configs, counters, the model description verbatim, terrain knots, RNG
// and adaptation state), then raw little-endian float blobs for the six
// networks and the three optimizers, and optionally the replay buffer.
// Checkpoints are written at episode boundaries; a single-environment run
// restored from a checkpoint that includes the buffer continues
// bit-identically to the uninterrupted run.
void save_checkpoint(const std::string& path, Trainer& trainer,
                     bool include_buffer);

std::unique_ptr<Trainer> load_checkpoint(const std::string& path);

}  // namespace walklab

#endif  // WALKLAB_CHECKPOINT_HPP_
