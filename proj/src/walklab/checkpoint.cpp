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

// Checkpoint layout, all multi-byte values little-endian:
//   bytes 0..3   magic "WLKC"
//   bytes 4..7   format version (uint32)
//   bytes 8..15  JSON header length (uint64), then that many header bytes
//   then, in order: six network parameter blobs (float32), three optimizer
//   moment blobs (float32), and when the header says so the live replay
//   transitions (obs/action/next_obs float32, reward terms float64, done
//   uint8, episode id int64). Blob sizes are implied by the dimensions in
//   the header, so any truncation is detected as a short read.

#include "walklab/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "walklab/agent.hpp"
#include "walklab/common.hpp"

namespace walklab {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'W', 'L', 'K', 'C'};
constexpr std::uint32_t kVersion = 1;

static_assert(sizeof(RewardBreakdown) == 6 * sizeof(double) &&
                  std::is_trivially_copyable_v<RewardBreakdown>,
              "RewardBreakdown must stay a plain struct of six doubles");

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data),
            static_cast<std::streamsize>(bytes));
}

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  write_raw(out, &value, sizeof(T));
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if (!v.empty()) write_raw(out, v.data(), v.size() * sizeof(T));
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes,
              const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw ParseError(std::string("checkpoint truncated while reading ") +
                     what);
  }
}

template <typename T>
T read_pod(std::ifstream& in, const char* what) {
  T value;
  read_raw(in, &value, sizeof(T), what);
  return value;
}

template <typename T>
std::vector<T> read_vec(std::ifstream& in, std::size_t count,
                        const char* what) {
  std::vector<T> v(count);
  if (count > 0) read_raw(in, v.data(), count * sizeof(T), what);
  return v;
}

json weights_to_json(const RewardWeights& w) {
  return json{{"w1", w.w1},
              {"w2", w.w2},
              {"w3", w.w3},
              {"w4", w.w4},
              {"v_target", w.v_target},
              {"grf_threshold", w.grf_threshold},
              {"activity_threshold", w.activity_threshold}};
}

RewardWeights weights_from_json(const json& j) {
  RewardWeights w;
  w.w1 = j.at("w1").get<double>();
  w.w2 = j.at("w2").get<double>();
  w.w3 = j.at("w3").get<double>();
  w.w4 = j.at("w4").get<double>();
  w.v_target = j.at("v_target").get<double>();
  w.grf_threshold = j.at("grf_threshold").get<double>();
  w.activity_threshold = j.at("activity_threshold").get<double>();
  return w;
}

json env_to_json(const EnvConfig& c) {
  return json{{"control_dt", c.control_dt},
              {"substeps", c.substeps},
              {"horizon", c.horizon},
              {"u_max", c.u_max},
              {"weights", weights_to_json(c.weights)},
              {"running_task", c.running_task},
              {"w_collision", c.w_collision},
              {"fall_fraction", c.fall_fraction},
              {"contact_flag_bw", c.contact_flag_bw},
              {"qdot_obs_scale", c.qdot_obs_scale},
              {"start_x", c.start_x}};
}

EnvConfig env_from_json(const json& j) {
  EnvConfig c;
  c.control_dt = j.at("control_dt").get<double>();
  c.substeps = j.at("substeps").get<int>();
  c.horizon = j.at("horizon").get<int>();
  c.u_max = j.at("u_max").get<double>();
  c.weights = weights_from_json(j.at("weights"));
  c.running_task = j.at("running_task").get<bool>();
  c.w_collision = j.at("w_collision").get<double>();
  c.fall_fraction = j.at("fall_fraction").get<double>();
  c.contact_flag_bw = j.at("contact_flag_bw").get<double>();
  c.qdot_obs_scale = j.at("qdot_obs_scale").get<double>();
  c.start_x = j.at("start_x").get<double>();
  return c;
}

json learner_to_json(const LearnerConfig& c) {
  return json{{"hidden_size", c.hidden_size},
              {"hidden_layers", c.hidden_layers},
              {"lr_actor", c.lr_actor},
              {"lr_critic", c.lr_critic},
              {"gamma", c.gamma},
              {"target_tau", c.target_tau},
              {"batch_size", c.batch_size},
              {"steps_before_batches", c.steps_before_batches},
              {"steps_between_batches", c.steps_between_batches},
              {"number_of_batches", c.number_of_batches},
              {"n_parallel", c.n_parallel},
              {"buffer_capacity", c.buffer_capacity},
              {"ou_sigma", c.ou_sigma},
              {"ou_tau", c.ou_tau},
              {"smooth_sigma", c.smooth_sigma},
              {"smooth_clip", c.smooth_clip}};
}

LearnerConfig learner_from_json(const json& j) {
  LearnerConfig c;
  c.hidden_size = j.at("hidden_size").get<int>();
  c.hidden_layers = j.at("hidden_layers").get<int>();
  c.lr_actor = j.at("lr_actor").get<float>();
  c.lr_critic = j.at("lr_critic").get<float>();
  c.gamma = j.at("gamma").get<float>();
  c.target_tau = j.at("target_tau").get<float>();
  c.batch_size = j.at("batch_size").get<int>();
  c.steps_before_batches = j.at("steps_before_batches").get<std::int64_t>();
  c.steps_between_batches = j.at("steps_between_batches").get<int>();
  c.number_of_batches = j.at("number_of_batches").get<int>();
  c.n_parallel = j.at("n_parallel").get<int>();
  c.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
  c.ou_sigma = j.at("ou_sigma").get<double>();
  c.ou_tau = j.at("ou_tau").get<double>();
  c.smooth_sigma = j.at("smooth_sigma").get<float>();
  c.smooth_clip = j.at("smooth_clip").get<float>();
  return c;
}

json adapt_cfg_to_json(const AdaptConfig& c) {
  return json{{"threshold", c.threshold},
              {"beta", c.beta},
              {"delta_alpha0", c.delta_alpha0},
              {"lambda", c.lambda}};
}

AdaptConfig adapt_cfg_from_json(const json& j) {
  AdaptConfig c;
  c.threshold = j.at("threshold").get<double>();
  c.beta = j.at("beta").get<double>();
  c.delta_alpha0 = j.at("delta_alpha0").get<double>();
  c.lambda = j.at("lambda").get<double>();
  return c;
}

json options_to_json(const TrainerOptions& o) {
  return json{{"seed", o.seed},
              {"max_env_steps", o.max_env_steps},
              {"max_episodes", o.max_episodes},
              {"max_wall_seconds", o.max_wall_seconds},
              {"eval_every_episodes", o.eval_every_episodes},
              {"eval_episodes", o.eval_episodes},
              {"stop_eval_vx", o.stop_eval_vx},
              {"checkpoint_every_episodes", o.checkpoint_every_episodes},
              {"checkpoint_dir", o.checkpoint_dir},
              {"final_checkpoint_with_buffer", o.final_checkpoint_with_buffer},
              {"gait_reference_path", o.gait_reference_path},
              {"config_hash", o.config_hash}};
}

TrainerOptions options_from_json(const json& j) {
  TrainerOptions o;
  o.seed = j.at("seed").get<std::uint64_t>();
  o.max_env_steps = j.at("max_env_steps").get<std::int64_t>();
  o.max_episodes = j.at("max_episodes").get<std::int64_t>();
  o.max_wall_seconds = j.at("max_wall_seconds").get<double>();
  o.eval_every_episodes = j.at("eval_every_episodes").get<std::int64_t>();
  o.eval_episodes = j.at("eval_episodes").get<int>();
  o.stop_eval_vx = j.at("stop_eval_vx").get<double>();
  o.checkpoint_every_episodes =
      j.at("checkpoint_every_episodes").get<std::int64_t>();
  o.checkpoint_dir = j.at("checkpoint_dir").get<std::string>();
  o.final_checkpoint_with_buffer =
      j.at("final_checkpoint_with_buffer").get<bool>();
  o.gait_reference_path = j.at("gait_reference_path").get<std::string>();
  o.config_hash = j.at("config_hash").get<std::uint64_t>();
  return o;
}

void write_net(std::ofstream& out, const Mlp& net) {
  std::vector<float> flat;
  net.flatten(&flat);
  write_vec(out, flat);
}

void read_net(std::ifstream& in, Mlp* net, const char* what) {
  std::vector<float> flat = read_vec<float>(in, net->param_count(), what);
  net->unflatten(flat);
}

void read_opt(std::ifstream& in, Adam* opt, const char* what) {
  std::vector<float> flat = read_vec<float>(in, opt->moment_count(), what);
  opt->unflatten(flat);
}

}  // namespace

void save_checkpoint(const std::string& path, Trainer& trainer,
                     bool include_buffer) {
  const ModelSpec& model = trainer.model();
  if (model.source.empty()) {
    throw std::invalid_argument(
        "checkpointing needs a model loaded from text so it can be embedded");
  }
  Agent& agent = trainer.agent();
  ReplayBuffer& buffer = trainer.buffer();

  json header;
  header["obs_dim"] = agent.obs_dim();
  header["act_dim"] = agent.act_dim();
  header["env_steps"] = trainer.env_steps();
  header["episodes"] = trainer.episodes();
  header["next_episode_id"] = trainer.next_episode_id();
  {
    const std::array<std::uint64_t, 4> s = trainer.rng().state();
    json strs = json::array();
    for (std::uint64_t w : s) strs.push_back(std::to_string(w));
    header["rng"] = strs;
  }
  header["adapt"] = json::parse(adapt_snapshot(trainer.adapt_state()));
  header["adapt_config"] = adapt_cfg_to_json(trainer.adapt_config());
  header["env_config"] = env_to_json(trainer.env_config());
  header["learner_config"] = learner_to_json(trainer.learner_config());
  header["options"] = options_to_json(trainer.options());
  {
    json knots = json::array();
    for (const TerrainKnot& k : trainer.terrain().knots()) {
      knots.push_back(json::array({k.x, k.y}));
    }
    header["terrain"] = json{
        {"kind", trainer.terrain().kind() == Terrain::Kind::kFlat
                     ? "flat"
                     : "sloped_tiles"},
        {"knots", knots}};
  }
  header["model_text"] = model.source;
  header["adam_t"] = json{{"actor", agent.actor_opt().t()},
                          {"critic1", agent.critic1_opt().t()},
                          {"critic2", agent.critic2_opt().t()}};
  header["buffer"] = json{{"included", include_buffer},
                          {"capacity", buffer.capacity()},
                          {"head", buffer.head()},
                          {"size", buffer.size()}};

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  write_raw(out, kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  const std::string header_text = header.dump();
  write_pod(out, static_cast<std::uint64_t>(header_text.size()));
  write_raw(out, header_text.data(), header_text.size());

  write_net(out, agent.actor());
  write_net(out, agent.actor_target());
  write_net(out, agent.critic1());
  write_net(out, agent.critic2());
  write_net(out, agent.critic1_target());
  write_net(out, agent.critic2_target());
  std::vector<float> moments;
  agent.actor_opt().flatten(&moments);
  write_vec(out, moments);
  agent.critic1_opt().flatten(&moments);
  write_vec(out, moments);
  agent.critic2_opt().flatten(&moments);
  write_vec(out, moments);

  if (include_buffer) {
    // Live transitions always occupy slots [0, size): the ring fills
    // forward and wraps in place, so slot indices never exceed the
    // high-water mark.
    const std::size_t n = buffer.size();
    const std::size_t od = static_cast<std::size_t>(buffer.obs_dim());
    const std::size_t ad = static_cast<std::size_t>(buffer.act_dim());
    write_raw(out, buffer.obs_data().data(), n * od * sizeof(float));
    write_raw(out, buffer.action_data().data(), n * ad * sizeof(float));
    write_raw(out, buffer.next_obs_data().data(), n * od * sizeof(float));
    write_raw(out, buffer.breakdowns().data(), n * sizeof(RewardBreakdown));
    write_raw(out, buffer.dones().data(), n * sizeof(std::uint8_t));
    write_raw(out, buffer.episode_ids().data(), n * sizeof(std::int64_t));
  }
  out.flush();
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

std::unique_ptr<Trainer> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  read_raw(in, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a checkpoint file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " +
                     std::to_string(version));
  }
  const auto header_len = read_pod<std::uint64_t>(in, "header length");
  std::string header_text(header_len, '\0');
  read_raw(in, header_text.data(), header_len, "header");
  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }

  std::unique_ptr<Trainer> trainer;
  try {
    ModelSpec model = load_model(header.at("model_text").get<std::string>());
    const json& tj = header.at("terrain");
    std::vector<TerrainKnot> knots;
    for (const json& k : tj.at("knots")) {
      knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
    }
    Terrain terrain = Terrain::from_knots(
        tj.at("kind").get<std::string>() == "flat"
            ? Terrain::Kind::kFlat
            : Terrain::Kind::kSlopedTiles,
        std::move(knots));
    trainer = std::make_unique<Trainer>(
        std::move(model), std::move(terrain),
        env_from_json(header.at("env_config")),
        learner_from_json(header.at("learner_config")),
        adapt_cfg_from_json(header.at("adapt_config")),
        options_from_json(header.at("options")));

    Agent& agent = trainer->agent();
    if (agent.obs_dim() != header.at("obs_dim").get<int>() ||
        agent.act_dim() != header.at("act_dim").get<int>()) {
      throw ParseError("checkpoint dimensions do not match the model");
    }
    std::array<std::uint64_t, 4> s{};
    const json& rj = header.at("rng");
    for (int i = 0; i < 4; ++i) {
      s[static_cast<std::size_t>(i)] =
          std::stoull(rj.at(i).get<std::string>());
    }
    trainer->rng().set_state(s);
    trainer->adapt_state() = adapt_restore(header.at("adapt").dump());
    trainer->restore_counters(header.at("env_steps").get<std::int64_t>(),
                              header.at("episodes").get<std::int64_t>(),
                              header.at("next_episode_id").get<std::int64_t>());

    read_net(in, &agent.actor(), "actor");
    read_net(in, &agent.actor_target(), "actor target");
    read_net(in, &agent.critic1(), "critic 1");
    read_net(in, &agent.critic2(), "critic 2");
    read_net(in, &agent.critic1_target(), "critic 1 target");
    read_net(in, &agent.critic2_target(), "critic 2 target");
    read_opt(in, &agent.actor_opt(), "actor moments");
    read_opt(in, &agent.critic1_opt(), "critic 1 moments");
    read_opt(in, &agent.critic2_opt(), "critic 2 moments");
    const json& at = header.at("adam_t");
    agent.actor_opt().set_t(at.at("actor").get<std::int64_t>());
    agent.critic1_opt().set_t(at.at("critic1").get<std::int64_t>());
    agent.critic2_opt().set_t(at.at("critic2").get<std::int64_t>());

    const json& bj = header.at("buffer");
    ReplayBuffer& buffer = trainer->buffer();
    if (bj.at("capacity").get<std::size_t>() != buffer.capacity()) {
      throw ParseError("checkpoint buffer capacity mismatch");
    }
    if (bj.at("included").get<bool>()) {
      const std::size_t n = bj.at("size").get<std::size_t>();
      const std::size_t cap = buffer.capacity();
      const std::size_t od = static_cast<std::size_t>(buffer.obs_dim());
      const std::size_t ad = static_cast<std::size_t>(buffer.act_dim());
      std::vector<float> obs = read_vec<float>(in, n * od, "buffer obs");
      std::vector<float> act = read_vec<float>(in, n * ad, "buffer actions");
      std::vector<float> nxt =
          read_vec<float>(in, n * od, "buffer next obs");
      std::vector<RewardBreakdown> bds =
          read_vec<RewardBreakdown>(in, n, "buffer rewards");
      std::vector<std::uint8_t> dn =
          read_vec<std::uint8_t>(in, n, "buffer dones");
      std::vector<std::int64_t> ids =
          read_vec<std::int64_t>(in, n, "buffer episode ids");
      obs.resize(cap * od, 0.0f);
      act.resize(cap * ad, 0.0f);
      nxt.resize(cap * od, 0.0f);
      bds.resize(cap);
      dn.resize(cap, 0);
      ids.resize(cap, 0);
      buffer.restore_raw(bj.at("head").get<std::size_t>(), n, std::move(obs),
                         std::move(act), std::move(nxt), std::move(bds),
                         std::move(dn), std::move(ids));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }
  return trainer;
}

}  // namespace walklab
