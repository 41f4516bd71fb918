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
//
// Command-line front end: policy training, rollout evaluation on flat or
// rough ground, gait-cycle analysis, reward ablations, and terrain export.
// Every command is deterministic for a given seed; failures print a one-line
// JSON object on stderr and exit nonzero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "walklab/agent.hpp"
#include "walklab/checkpoint.hpp"
#include "walklab/common.hpp"
#include "walklab/config.hpp"
#include "walklab/env.hpp"
#include "walklab/gait.hpp"
#include "walklab/model.hpp"
#include "walklab/rng.hpp"
#include "walklab/runio.hpp"
#include "walklab/terrain.hpp"

namespace {

using nlohmann::json;
using namespace walklab;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

// Mean and population standard deviation, as used everywhere else in the
// code base (gait bands use the same convention).
void mean_and_std(const std::vector<double>& v, double* mean, double* sd) {
  *mean = 0.0;
  *sd = 0.0;
  if (v.empty()) return;
  for (const double x : v) *mean += x;
  *mean /= static_cast<double>(v.size());
  for (const double x : v) *sd += (x - *mean) * (x - *mean);
  *sd = std::sqrt(*sd / static_cast<double>(v.size()));
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// NaN maps to null in JSON output; readers treat null as "not computed".
json finite_or_null(double v) {
  if (std::isfinite(v)) return json(v);
  return json(nullptr);
}

struct TrainArgs {
  std::string config;
  std::string checkpoint;
  std::string out;
  std::string terrain;
  std::string mode;
  std::string ablate;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool step_log = false;
};

struct EvalArgs {
  std::string checkpoint;
  std::string terrain = "flat";
  std::string out = "out/eval";
  int rollouts = 20;
  std::uint64_t seed = 1;
};

struct AnalyzeArgs {
  std::string rollouts_dir;
  std::string reference;
  std::string out;
};

struct AblateArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct TerrainGenArgs {
  std::uint64_t seed = 1;
  int tiles = 10;
  double tile_length = 1.0;
  double max_slope_deg = 5.0;
  double run_in = 5.0;
  std::string out;
};

// Shared tail of cmd_train and cmd_ablate: drives one training run and
// streams its logs to CSV. Returns the result plus the per-episode rows.
TrainResult run_training(Trainer* trainer, const std::string& out_dir,
                         const Provenance& prov, bool step_log,
                         std::vector<EpisodeRow>* rows_out) {
  std::filesystem::create_directories(out_dir);
  CsvWriter metrics(out_dir + "/metrics.csv", prov, kMetricsColumns);
  std::unique_ptr<CsvWriter> steps;
  if (step_log) {
    steps = std::make_unique<CsvWriter>(out_dir + "/steps.csv", prov,
                                        kStepLogColumns);
  }
  std::function<void(const StepLogRow&)> step_sink;
  if (steps) {
    step_sink = [&steps](const StepLogRow& s) {
      write_step_row(steps.get(), s.episode_id, s.step, s.breakdown, s.alpha);
    };
  }
  return trainer->run(
      [&metrics, rows_out](const EpisodeRow& row) {
        write_metrics_row(&metrics, row);
        if (rows_out) rows_out->push_back(row);
      },
      step_sink);
}

Provenance run_provenance(const std::string& tool, const Trainer& trainer) {
  Provenance prov;
  prov.tool = tool;
  prov.config_hash = trainer.options().config_hash;
  prov.seed = trainer.options().seed;
  prov.extra.push_back({"clip", format_double(trainer.env_config().u_max)});
  return prov;
}

int cmd_train(const TrainArgs& a) {
  std::unique_ptr<Trainer> trainer;
  std::string out_dir = a.out;
  if (!a.checkpoint.empty()) {
    // Resume. The checkpoint embeds the model, terrain, and every config,
    // so the only honored flags are --out and --step-log.
    trainer = load_checkpoint(a.checkpoint);
    if (out_dir.empty()) out_dir = trainer->options().checkpoint_dir;
    if (out_dir.empty()) out_dir = "out/train";
  } else {
    if (a.config.empty()) {
      throw std::invalid_argument("train needs --config or --checkpoint");
    }
    RunConfig cfg = load_run_config(a.config);
    if (a.seed_set) {
      cfg.seed = a.seed;
      cfg.trainer.seed = a.seed;
    }
    if (!a.mode.empty()) apply_mode(a.mode, &cfg);
    if (!a.terrain.empty()) cfg.terrain = a.terrain;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    out_dir = cfg.out_dir;
    if (!a.ablate.empty()) apply_ablation(a.ablate, &cfg);
    ModelSpec model = load_model(read_text_file(cfg.model_path));
    Terrain terrain = make_terrain(cfg);
    TrainerOptions options = cfg.trainer;
    options.checkpoint_dir = cfg.out_dir;
    trainer = std::make_unique<Trainer>(std::move(model), std::move(terrain),
                                        cfg.env, cfg.learner, cfg.adapt,
                                        options);
  }

  const Provenance prov = run_provenance("train", *trainer);
  const TrainResult res =
      run_training(trainer.get(), out_dir, prov, a.step_log, nullptr);

  json summary{{"command", "train"},
               {"out", out_dir},
               {"config_hash", hash_hex(prov.config_hash)},
               {"seed", prov.seed},
               {"episodes", res.episodes},
               {"env_steps", res.env_steps},
               {"eval_success", res.eval_success},
               {"wall_seconds", res.wall_seconds}};
  if (res.last_eval.episodes > 0) {
    summary["last_eval"] = json{
        {"episodes", res.last_eval.episodes},
        {"falls", res.last_eval.falls},
        {"mean_vx", res.last_eval.mean_vx},
        {"mean_distance", res.last_eval.mean_distance},
        {"mean_effort", res.last_eval.mean_effort},
        {"exp_match", finite_or_null(res.last_eval.exp_match)}};
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  if (a.rollouts <= 0) {
    throw std::invalid_argument("--rollouts must be positive");
  }
  std::unique_ptr<Trainer> trainer = load_checkpoint(a.checkpoint);
  const double alpha = trainer->adapt_state().alpha;
  const double dt = trainer->env_config().control_dt;
  std::filesystem::create_directories(a.out);

  Provenance prov = run_provenance("eval", *trainer);
  prov.seed = a.seed;
  prov.extra.push_back({"terrain", a.terrain});

  // Flat runs reuse one environment; rough runs rebuild it per rollout with
  // a fresh tile layout so robustness covers terrain variation too.
  SplitMix64 terrain_seeds(a.seed);
  std::unique_ptr<Env> env;
  if (a.terrain == "flat") {
    env = std::make_unique<Env>(trainer->model(), Terrain::flat(),
                                trainer->env_config());
  }

  std::vector<double> distances, efforts, vxs, task_returns;
  int falls = 0;
  json per_rollout = json::array();
  std::vector<GaitCycle> pooled;
  for (int i = 0; i < a.rollouts; ++i) {
    if (a.terrain == "rough") {
      env = std::make_unique<Env>(trainer->model(),
                                  Terrain::sloped_tiles(terrain_seeds.next()),
                                  trainer->env_config());
    }
    std::vector<EpisodeTrace> traces;
    const EvalStats st = evaluate(env.get(), &trainer->agent(), 1,
                                  a.seed + static_cast<std::uint64_t>(i),
                                  alpha, &traces);
    const std::string file = "rollout_" + std::to_string(i) + ".csv";
    write_rollout_csv(a.out + "/" + file, traces.front(), trainer->model(),
                      dt, prov);
    const Rollout rollout = trace_to_rollout(traces.front(), *env);
    std::vector<GaitCycle> cycles = collect_cycles(rollout, kGaitPoints);
    for (GaitCycle& c : cycles) pooled.push_back(std::move(c));

    distances.push_back(st.mean_distance);
    efforts.push_back(st.mean_effort);
    vxs.push_back(st.mean_vx);
    task_returns.push_back(st.mean_task_return);
    falls += st.falls;
    per_rollout.push_back(json{{"file", file},
                               {"distance", st.mean_distance},
                               {"effort", st.mean_effort},
                               {"mean_vx", st.mean_vx},
                               {"task_return", st.mean_task_return},
                               {"fell", st.falls > 0}});
  }

  const auto stat_pair = [](const std::vector<double>& v) {
    double m = 0.0, s = 0.0;
    mean_and_std(v, &m, &s);
    return json{{"mean", m}, {"std", s}};
  };
  json summary{{"command", "eval"},
               {"config_hash", hash_hex(prov.config_hash)},
               {"seed", a.seed},
               {"terrain", a.terrain},
               {"rollouts", a.rollouts},
               {"alpha", alpha},
               {"falls", falls},
               {"gait_cycles", static_cast<int>(pooled.size())},
               {"distance", stat_pair(distances)},
               {"effort", stat_pair(efforts)},
               {"mean_vx", stat_pair(vxs)},
               {"task_return", stat_pair(task_returns)},
               {"per_rollout", per_rollout}};
  write_text_file(a.out + "/summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

json report_to_json(const std::string& name, const MatchReport& rep) {
  json match = json::object();
  for (const auto& [signal, frac] : rep.fractions) match[signal] = frac;
  return json{{"file", name},
              {"cycles", rep.cycles},
              {"no_cycles", rep.cycles == 0},
              {"distance", rep.distance},
              {"avg_effort", rep.avg_effort},
              {"match", match},
              {"aggregate_match", finite_or_null(rep.aggregate)}};
}

int cmd_analyze(const AnalyzeArgs& a) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(a.rollouts_dir)) {
    throw IoError("not a directory: " + a.rollouts_dir);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(a.rollouts_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("rollout", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw IoError("no rollout*.csv files in " + a.rollouts_dir);
  }

  std::unique_ptr<ReferenceBand> band;
  if (!a.reference.empty()) {
    band = std::make_unique<ReferenceBand>(load_reference_band(a.reference));
  }

  const std::string out_dir =
      a.out.empty() ? a.rollouts_dir + "/analysis" : a.out;
  fs::create_directories(out_dir);

  // Provenance comes from the first rollout's own header so analysis output
  // traces back to the run that produced the data.
  Provenance prov;
  prov.tool = "analyze";

  std::vector<GaitCycle> pooled;
  json reports = json::array();
  double distance_sum = 0.0, effort_sum = 0.0;
  for (const std::string& file : files) {
    const CsvTable table = read_csv(file);
    if (prov.seed == 0 && prov.config_hash == 0) {
      if (const std::string* h = table.meta_value("config_hash")) {
        prov.config_hash = std::stoull(*h, nullptr, 16);
      }
      if (const std::string* s = table.meta_value("seed")) {
        prov.seed = std::stoull(*s);
      }
    }
    const Rollout rollout = rollout_from_csv(table);
    const MatchReport rep = analyze_rollout(rollout, band.get());
    distance_sum += rep.distance;
    effort_sum += rep.avg_effort;
    std::vector<GaitCycle> cycles = collect_cycles(rollout, kGaitPoints);
    for (GaitCycle& c : cycles) pooled.push_back(std::move(c));

    const std::string stem = fs::path(file).stem().string();
    const json rep_json =
        report_to_json(fs::path(file).filename().string(), rep);
    write_text_file(out_dir + "/report_" + stem + ".json",
                    rep_json.dump(2) + "\n");
    reports.push_back(rep_json);
  }

  // Pooled view: cycles from every rollout weigh equally, so rollouts with
  // more cycles contribute more, matching how the band itself is built.
  MatchReport pooled_rep = analyze_cycles(pooled, band.get());
  pooled_rep.distance = distance_sum / static_cast<double>(files.size());
  pooled_rep.avg_effort = effort_sum / static_cast<double>(files.size());
  json pooled_json = report_to_json("pooled", pooled_rep);
  pooled_json["rollouts"] = static_cast<int>(files.size());
  write_text_file(out_dir + "/pooled_report.json", pooled_json.dump(2) + "\n");

  if (!pooled.empty()) {
    const ReferenceBand mean_band = band_from_cycles(pooled);
    write_text_file(out_dir + "/pooled_band.csv",
                    provenance_header(prov) + reference_band_csv(mean_band));
  }
  std::cout << pooled_json.dump(2) << "\n";
  return 0;
}

int cmd_ablate(const AblateArgs& a) {
  const std::vector<std::string> variants = {"ours", "no-adapt", "no-effort",
                                             "only-vel"};
  std::string base_out;
  json summary{{"command", "ablate"}, {"variants", json::array()}};
  std::vector<std::string> comparison_rows;
  for (const std::string& variant : variants) {
    RunConfig cfg = load_run_config(a.config);
    if (a.seed_set) {
      cfg.seed = a.seed;
      cfg.trainer.seed = a.seed;
    }
    if (!a.out.empty()) cfg.out_dir = a.out;
    base_out = cfg.out_dir;
    apply_ablation(variant, &cfg);
    const std::string vdir = cfg.out_dir + "/" + variant;

    ModelSpec model = load_model(read_text_file(cfg.model_path));
    Terrain terrain = make_terrain(cfg);
    TrainerOptions options = cfg.trainer;
    options.checkpoint_dir = vdir;
    Trainer trainer(std::move(model), std::move(terrain), cfg.env,
                    cfg.learner, cfg.adapt, options);

    Provenance prov = run_provenance("ablate", trainer);
    prov.extra.push_back({"variant", variant});
    std::vector<EpisodeRow> rows;
    const TrainResult res =
        run_training(&trainer, vdir, prov, /*step_log=*/true, &rows);

    double mean_effort = 0.0;
    double task_return = 0.0;
    for (const EpisodeRow& r : rows) {
      mean_effort += r.mean_effort;
      task_return += r.task_return;
    }
    if (!rows.empty()) {
      mean_effort /= static_cast<double>(rows.size());
      task_return /= static_cast<double>(rows.size());
    }
    const double alpha_final = trainer.adapt_state().alpha;
    const double exp_match = res.last_eval.exp_match;

    summary["variants"].push_back(
        json{{"variant", variant},
             {"clip", cfg.env.u_max},
             {"alpha_final", alpha_final},
             {"episodes", res.episodes},
             {"env_steps", res.env_steps},
             {"mean_effort", mean_effort},
             {"task_return", task_return},
             {"exp_match", finite_or_null(exp_match)}});
    comparison_rows.push_back(
        variant + "," + format_double(cfg.env.u_max) + "," +
        format_double(alpha_final) + "," + std::to_string(res.episodes) +
        "," + std::to_string(res.env_steps) + "," +
        format_double(mean_effort) + "," + format_double(task_return) + "," +
        format_double(exp_match));
  }

  // The comparison table has a string column, so it is written by hand in
  // the same provenance-plus-header CSV shape as the other outputs.
  RunConfig cfg = load_run_config(a.config);
  Provenance prov;
  prov.tool = "ablate";
  prov.config_hash = cfg.config_hash;
  prov.seed = a.seed_set ? a.seed : cfg.seed;
  std::string table = provenance_header(prov);
  table +=
      "variant,clip,alpha_final,episodes,env_steps,mean_effort,task_return,"
      "exp_match\n";
  for (const std::string& row : comparison_rows) table += row + "\n";
  write_text_file(base_out + "/comparison.csv", table);

  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_terrain_gen(const TerrainGenArgs& a) {
  const Terrain terrain = Terrain::sloped_tiles(
      a.seed, a.tiles, a.tile_length, a.max_slope_deg, a.run_in);
  Provenance prov;
  prov.tool = "terrain-gen";
  prov.seed = a.seed;
  const std::string params = "tiles=" + std::to_string(a.tiles) +
                             " tile_length=" + format_double(a.tile_length) +
                             " max_slope_deg=" +
                             format_double(a.max_slope_deg) +
                             " run_in=" + format_double(a.run_in);
  prov.config_hash = fnv1a64(params);
  prov.extra.push_back({"tiles", std::to_string(a.tiles)});
  prov.extra.push_back({"tile_length", format_double(a.tile_length)});
  prov.extra.push_back({"max_slope_deg", format_double(a.max_slope_deg)});
  prov.extra.push_back({"run_in", format_double(a.run_in)});

  std::string text = provenance_header(prov);
  text += "x,y\n";
  for (const TerrainKnot& k : terrain.knots()) {
    text += format_double(k.x) + "," + format_double(k.y) + "\n";
  }
  if (a.out.empty()) {
    std::cout << text;
  } else {
    if (const auto dir = std::filesystem::path(a.out).parent_path();
        !dir.empty()) {
      std::filesystem::create_directories(dir);
    }
    write_text_file(a.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar musculoskeletal walking: train, evaluate, analyze"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "Train a policy and write metrics plus checkpoints");
  train->add_option("--config", train_args.config, "Run config file");
  train->add_option("--checkpoint", train_args.checkpoint,
                    "Resume training from this checkpoint");
  train->add_option("--seed", train_args.seed, "Override the config seed")
      ->each([&train_args](const std::string&) { train_args.seed_set = true; });
  train->add_option("--terrain", train_args.terrain, "Terrain override")
      ->check(CLI::IsMember({"flat", "rough"}));
  train->add_option("--mode", train_args.mode, "Mode override")
      ->check(CLI::IsMember({"walk", "run"}));
  train->add_option("--ablate", train_args.ablate, "Reward ablation variant")
      ->check(CLI::IsMember({"ours", "no-adapt", "no-effort", "only-vel"}));
  train->add_option("--out", train_args.out, "Output directory");
  train->add_flag("--step-log", train_args.step_log,
                  "Also write a per-step reward component log");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Roll out a checkpointed policy and write rollout CSVs");
  eval->add_option("--checkpoint", eval_args.checkpoint, "Policy checkpoint")
      ->required();
  eval->add_option("--terrain", eval_args.terrain, "Evaluation terrain")
      ->check(CLI::IsMember({"flat", "rough"}));
  eval->add_option("--rollouts", eval_args.rollouts, "Number of rollouts");
  eval->add_option("--seed", eval_args.seed, "Base seed for initial states");
  eval->add_option("--out", eval_args.out, "Output directory");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Gait-cycle analysis of rollout CSVs");
  analyze->add_option("--rollouts", analyze_args.rollouts_dir,
                      "Directory holding rollout*.csv files")
      ->required();
  analyze->add_option("--reference", analyze_args.reference,
                      "Reference gait band CSV for the match metric");
  analyze->add_option("--out", analyze_args.out,
                      "Output directory (default: <rollouts>/analysis)");

  AblateArgs ablate_args;
  CLI::App* ablate = app.add_subcommand(
      "ablate", "Train the four reward variants and compare them");
  ablate->add_option("--config", ablate_args.config, "Base run config")
      ->required();
  ablate->add_option("--seed", ablate_args.seed, "Shared seed override")
      ->each(
          [&ablate_args](const std::string&) { ablate_args.seed_set = true; });
  ablate->add_option("--out", ablate_args.out, "Output directory");

  TerrainGenArgs tg_args;
  CLI::App* tg = app.add_subcommand(
      "terrain-gen", "Emit a seeded sloped-tile terrain as x,y knots");
  tg->add_option("--seed", tg_args.seed, "Terrain seed");
  tg->add_option("--tiles", tg_args.tiles, "Number of tiles");
  tg->add_option("--tile-length", tg_args.tile_length, "Tile length (m)");
  tg->add_option("--max-slope", tg_args.max_slope_deg, "Max slope (deg)");
  tg->add_option("--run-in", tg_args.run_in, "Flat run-in length (m)");
  tg->add_option("--out", tg_args.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(train)) return cmd_train(train_args);
    if (app.got_subcommand(eval)) return cmd_eval(eval_args);
    if (app.got_subcommand(analyze)) return cmd_analyze(analyze_args);
    if (app.got_subcommand(ablate)) return cmd_ablate(ablate_args);
    if (app.got_subcommand(tg)) return cmd_terrain_gen(tg_args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return e.get_exit_code();
  } catch (const ParseError& e) {
    std::cerr << json{{"error", {{"type", "parse"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << json{{"error", {{"type", "io"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr
        << json{{"error", {{"type", "divergence"}, {"message", e.what()}}}}
               .dump()
        << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "error"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  }
  return 0;
}
