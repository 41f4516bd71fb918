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

// Model description and its text-file parser. A model is a planar kinematic
// tree of one-degree-of-freedom joints (two prismatic axes and revolute).
// The floating base is expressed in the file as several joints sharing the
// same parent/child pair; the parser chains them in declaration order,
// inserting massless intermediate bodies, so the dynamics only ever sees a
// tree with one joint per body.

#ifndef WALKLAB_MODEL_HPP_
#define WALKLAB_MODEL_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "walklab/contact.hpp"
#include "walklab/muscle.hpp"

namespace walklab {

// A physical segment as declared in the model file.
struct Segment {
  std::string name;
  double mass = 0.0;     // kg
  double inertia = 0.0;  // kg·m² about the center of mass
  double length = 0.0;   // m, informational extent
  Eigen::Vector2d com{0.0, 0.0};  // center of mass in the body frame
};

enum class JointType { kPrismaticX, kPrismaticY, kRevolute };

struct JointLimit {
  bool present = false;
  double lower = 0.0;      // rad
  double upper = 0.0;      // rad
  double stiffness = 50.0; // N·m/rad
  double damping = 2.0;    // N·m·s/rad
};

// One degree of freedom. Drives the body of the same index: joints[i]
// connects links[i] to its parent body (index parent_link, -1 for world).
struct Joint {
  std::string name;
  JointType type = JointType::kRevolute;
  int parent_link = -1;
  Eigen::Vector2d anchor{0.0, 0.0};  // joint position in the parent frame
  JointLimit limit;
};

// One body of the internal tree. Chained floating-base joints get massless
// bodies with segment == -1.
struct Link {
  std::string name;
  double mass = 0.0;
  double inertia = 0.0;
  Eigen::Vector2d com{0.0, 0.0};
  int segment = -1;  // declared segment carried by this body, if any
};

struct ModelSpec {
  std::string name;
  double gravity = 9.81;
  std::vector<Segment> segments;
  std::vector<Link> links;    // parent always precedes child
  std::vector<Joint> joints;  // joints[i] drives links[i]
  std::vector<MuscleParams> muscles;
  std::vector<ContactSphere> spheres;  // link field indexes links
  ContactParams contact;
  int n_feet = 0;
  // Verbatim text the spec was parsed from; empty when built in code.
  // Checkpoints embed it so a restore re-parses the identical model.
  std::string source;

  int dof() const { return static_cast<int>(joints.size()); }
  double total_mass() const;
  double body_weight() const;  // N

  // Index lookups; -1 when absent.
  int joint_index(const std::string& joint_name) const;
  int link_of_segment(const std::string& segment_name) const;

  // Indices of joints that carry limits, in joint order. StepReport limit
  // torques follow this ordering.
  std::vector<int> limited_joints() const;
};

// Parses and validates the structured-text model format (schema
// walklab-model-v1). Throws ParseError with a line reference on syntax
// errors, dangling names, or invariant violations (non-positive masses,
// inverted limits, feet with fewer than two spheres, ...).
ModelSpec load_model(const std::string& text);
ModelSpec load_model_file(const std::string& path);

}  // namespace walklab

#endif  // WALKLAB_MODEL_HPP_
