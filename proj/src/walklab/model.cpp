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

#include "walklab/model.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "walklab/common.hpp"

namespace walklab {

double ModelSpec::total_mass() const {
  double m = 0.0;
  for (const Segment& s : segments) m += s.mass;
  return m;
}

double ModelSpec::body_weight() const { return gravity * total_mass(); }

int ModelSpec::joint_index(const std::string& joint_name) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].name == joint_name) return static_cast<int>(i);
  }
  return -1;
}

int ModelSpec::link_of_segment(const std::string& segment_name) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].segment >= 0 &&
        segments[links[i].segment].name == segment_name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::vector<int> ModelSpec::limited_joints() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].limit.present) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

struct RawJoint {
  int line = 0;
  std::string name;
  JointType type = JointType::kRevolute;
  std::string parent;  // segment name or "world"
  std::string child;   // segment name
  Eigen::Vector2d anchor{0.0, 0.0};
  JointLimit limit;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("model line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    fail(line, "expected a number, got '" + tok + "'");
  }
  return v;
}

int parse_int(const std::string& tok, int line) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') {
    fail(line, "expected an integer, got '" + tok + "'");
  }
  return static_cast<int>(v);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::string stripped = line;
  const std::size_t hash = stripped.find('#');
  if (hash != std::string::npos) stripped.resize(hash);
  std::istringstream ss(stripped);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

JointType parse_joint_type(const std::string& tok, int line) {
  if (tok == "prismatic_x") return JointType::kPrismaticX;
  if (tok == "prismatic_y") return JointType::kPrismaticY;
  if (tok == "revolute") return JointType::kRevolute;
  fail(line, "unknown joint type '" + tok + "'");
}

}  // namespace

ModelSpec load_model(const std::string& text) {
  ModelSpec model;
  model.source = text;
  model.n_feet = 2;
  std::vector<RawJoint> raw_joints;
  struct RawSphere {
    int line;
    std::string name, segment;
    Eigen::Vector2d offset;
    double radius;
    int foot, group;
  };
  std::vector<RawSphere> raw_spheres;
  struct RawMuscle {
    int line;
    MuscleParams params;
    double fiber_ref_norm;
    std::vector<std::pair<std::string, MuscleAttachment>> arms;
  };
  std::vector<RawMuscle> raw_muscles;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_schema = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> t = tokenize(line);
    if (t.empty()) continue;
    if (!saw_schema) {
      if (t.size() != 2 || t[0] != "schema" || t[1] != "walklab-model-v1") {
        fail(line_no, "first entry must be 'schema walklab-model-v1'");
      }
      saw_schema = true;
      continue;
    }
    const std::string& kind = t[0];
    if (kind == "name") {
      if (t.size() != 2) fail(line_no, "name takes one value");
      model.name = t[1];
    } else if (kind == "gravity") {
      if (t.size() != 2) fail(line_no, "gravity takes one value");
      model.gravity = parse_double(t[1], line_no);
      if (model.gravity <= 0.0) fail(line_no, "gravity must be positive");
    } else if (kind == "feet") {
      if (t.size() != 2) fail(line_no, "feet takes one value");
      model.n_feet = parse_int(t[1], line_no);
      if (model.n_feet < 0) fail(line_no, "feet must be non-negative");
    } else if (kind == "segment") {
      if (t.size() != 7) {
        fail(line_no, "segment: name mass inertia length com_x com_y");
      }
      Segment s;
      s.name = t[1];
      s.mass = parse_double(t[2], line_no);
      s.inertia = parse_double(t[3], line_no);
      s.length = parse_double(t[4], line_no);
      s.com = {parse_double(t[5], line_no), parse_double(t[6], line_no)};
      if (s.mass <= 0.0) fail(line_no, "segment mass must be positive");
      if (s.inertia <= 0.0) fail(line_no, "segment inertia must be positive");
      if (s.length <= 0.0) fail(line_no, "segment length must be positive");
      for (const Segment& prev : model.segments) {
        if (prev.name == s.name) fail(line_no, "duplicate segment " + s.name);
      }
      model.segments.push_back(s);
    } else if (kind == "joint") {
      if (t.size() != 7 && t.size() != 12) {
        fail(line_no,
             "joint: name type parent child anchor_x anchor_y"
             " [limit lo hi k c]");
      }
      RawJoint j;
      j.line = line_no;
      j.name = t[1];
      j.type = parse_joint_type(t[2], line_no);
      j.parent = t[3];
      j.child = t[4];
      j.anchor = {parse_double(t[5], line_no), parse_double(t[6], line_no)};
      if (t.size() == 12) {
        if (t[7] != "limit") fail(line_no, "expected 'limit'");
        j.limit.present = true;
        j.limit.lower = parse_double(t[8], line_no);
        j.limit.upper = parse_double(t[9], line_no);
        j.limit.stiffness = parse_double(t[10], line_no);
        j.limit.damping = parse_double(t[11], line_no);
        if (j.limit.lower >= j.limit.upper) {
          fail(line_no, "joint lower limit must be below upper limit");
        }
        if (j.limit.stiffness < 0.0 || j.limit.damping < 0.0) {
          fail(line_no, "limit stiffness and damping must be non-negative");
        }
      }
      for (const RawJoint& prev : raw_joints) {
        if (prev.name == j.name) fail(line_no, "duplicate joint " + j.name);
      }
      raw_joints.push_back(j);
    } else if (kind == "muscle") {
      if (t.size() < 12 || (t.size() - 9) % 3 != 0) {
        fail(line_no,
             "muscle: name f_max l_opt slack v_max tau_act tau_deact"
             " fiber_ref_norm (joint arm q_ref)+");
      }
      RawMuscle m;
      m.line = line_no;
      m.params.name = t[1];
      m.params.f_max = parse_double(t[2], line_no);
      m.params.l_opt = parse_double(t[3], line_no);
      m.params.tendon_slack = parse_double(t[4], line_no);
      m.params.v_max = parse_double(t[5], line_no);
      m.params.tau_act = parse_double(t[6], line_no);
      m.params.tau_deact = parse_double(t[7], line_no);
      m.fiber_ref_norm = parse_double(t[8], line_no);
      if (m.params.f_max <= 0.0 || m.params.l_opt <= 0.0 ||
          m.params.v_max <= 0.0) {
        fail(line_no, "muscle F_max, l_opt, v_max must be positive");
      }
      if (m.params.tau_act <= 0.0 || m.params.tau_deact <= 0.0 ||
          m.params.tau_act > m.params.tau_deact) {
        fail(line_no,
             "time constants must be positive with tau_act <= tau_deact");
      }
      if (m.params.tendon_slack < 0.0 || m.fiber_ref_norm <= 0.0) {
        fail(line_no, "slack must be >= 0 and fiber_ref_norm > 0");
      }
      for (std::size_t i = 9; i + 2 < t.size(); i += 3) {
        MuscleAttachment at;
        at.arm = parse_double(t[i + 1], line_no);
        at.q_ref = parse_double(t[i + 2], line_no);
        m.arms.emplace_back(t[i], at);
      }
      for (const RawMuscle& prev : raw_muscles) {
        if (prev.params.name == m.params.name) {
          fail(line_no, "duplicate muscle " + m.params.name);
        }
      }
      raw_muscles.push_back(std::move(m));
    } else if (kind == "sphere") {
      if (t.size() != 8) {
        fail(line_no, "sphere: name segment off_x off_y radius foot group");
      }
      RawSphere s;
      s.line = line_no;
      s.name = t[1];
      s.segment = t[2];
      s.offset = {parse_double(t[3], line_no), parse_double(t[4], line_no)};
      s.radius = parse_double(t[5], line_no);
      s.foot = parse_int(t[6], line_no);
      s.group = parse_int(t[7], line_no);
      if (s.radius <= 0.0) fail(line_no, "sphere radius must be positive");
      raw_spheres.push_back(s);
    } else if (kind == "contact") {
      if (t.size() != 3) fail(line_no, "contact: key value");
      const double v = parse_double(t[2], line_no);
      if (v < 0.0) fail(line_no, "contact parameters are non-negative");
      if (t[1] == "stiffness") model.contact.stiffness = v;
      else if (t[1] == "exponent") model.contact.exponent = v;
      else if (t[1] == "damping") model.contact.damping = v;
      else if (t[1] == "mu_static") model.contact.mu_static = v;
      else if (t[1] == "mu_dynamic") model.contact.mu_dynamic = v;
      else if (t[1] == "mu_viscous") model.contact.mu_viscous = v;
      else if (t[1] == "v_ref") model.contact.v_ref = v;
      else fail(line_no, "unknown contact key '" + t[1] + "'");
    } else {
      fail(line_no, "unknown record '" + kind + "'");
    }
  }
  if (!saw_schema) throw ParseError("model: empty document");
  if (model.contact.mu_static < model.contact.mu_dynamic) {
    throw ParseError("model: mu_static must be >= mu_dynamic");
  }

  std::unordered_map<std::string, int> segment_index;
  for (std::size_t i = 0; i < model.segments.size(); ++i) {
    segment_index[model.segments[i].name] = static_cast<int>(i);
  }

  // Attach joints in declaration order, chaining consecutive joints that
  // share a (parent, child) pair through massless intermediate bodies.
  std::unordered_map<std::string, int> link_of_segment;
  std::size_t i = 0;
  while (i < raw_joints.size()) {
    std::size_t j = i + 1;
    while (j < raw_joints.size() && raw_joints[j].parent == raw_joints[i].parent &&
           raw_joints[j].child == raw_joints[i].child) {
      ++j;
    }
    const RawJoint& first = raw_joints[i];
    if (segment_index.find(first.child) == segment_index.end()) {
      fail(first.line, "joint child '" + first.child + "' is not a segment");
    }
    if (link_of_segment.count(first.child) != 0) {
      fail(first.line, "segment '" + first.child + "' attached twice");
    }
    int parent_link;
    if (first.parent == "world") {
      parent_link = -1;
    } else {
      const auto it = link_of_segment.find(first.parent);
      if (it == link_of_segment.end()) {
        fail(first.line, "joint parent '" + first.parent +
                             "' is not an attached segment (order matters)");
      }
      parent_link = it->second;
    }
    for (std::size_t k = i; k < j; ++k) {
      const RawJoint& rj = raw_joints[k];
      Joint joint;
      joint.name = rj.name;
      joint.type = rj.type;
      joint.parent_link = parent_link;
      joint.anchor = rj.anchor;
      joint.limit = rj.limit;
      Link link;
      if (k + 1 == j) {
        const int seg = segment_index[rj.child];
        link.name = rj.child;
        link.segment = seg;
        link.mass = model.segments[seg].mass;
        link.inertia = model.segments[seg].inertia;
        link.com = model.segments[seg].com;
      } else {
        link.name = rj.child + "@" + rj.name;
        link.segment = -1;
      }
      model.joints.push_back(joint);
      model.links.push_back(link);
      parent_link = static_cast<int>(model.links.size()) - 1;
    }
    link_of_segment[first.child] = parent_link;
    i = j;
  }
  for (const Segment& s : model.segments) {
    if (link_of_segment.count(s.name) == 0) {
      throw ParseError("model: segment '" + s.name + "' is not attached");
    }
  }

  for (const RawMuscle& rm : raw_muscles) {
    MuscleParams p = rm.params;
    for (const auto& [joint_name, at] : rm.arms) {
      MuscleAttachment resolved = at;
      resolved.joint = model.joint_index(joint_name);
      if (resolved.joint < 0) {
        fail(rm.line, "muscle arm references unknown joint " + joint_name);
      }
      p.attachments.push_back(resolved);
    }
    p.l_ref = rm.fiber_ref_norm * p.l_opt + p.tendon_slack;
    model.muscles.push_back(std::move(p));
  }

  std::vector<int> foot_counts(static_cast<std::size_t>(model.n_feet), 0);
  for (const RawSphere& rs : raw_spheres) {
    ContactSphere s;
    const auto it = link_of_segment.find(rs.segment);
    if (it == link_of_segment.end()) {
      fail(rs.line, "sphere references unknown segment " + rs.segment);
    }
    s.link = it->second;
    s.offset = rs.offset;
    s.radius = rs.radius;
    s.foot = rs.foot;
    s.collide_group = rs.group;
    if (s.foot >= model.n_feet) {
      fail(rs.line, "sphere foot slot out of range");
    }
    if (s.foot >= 0) ++foot_counts[static_cast<std::size_t>(s.foot)];
    model.spheres.push_back(s);
  }
  for (int f = 0; f < model.n_feet; ++f) {
    if (foot_counts[static_cast<std::size_t>(f)] < 2) {
      throw ParseError("model: foot " + std::to_string(f) +
                       " needs at least 2 contact spheres");
    }
  }
  return model;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

}  // namespace walklab
