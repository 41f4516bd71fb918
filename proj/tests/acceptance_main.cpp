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

// Acceptance gate. Eight go/no-go checks, each printed as a single
// "PASS criterion N" or "FAIL criterion N" line; the process exits nonzero
// if any check fails. Every check verifies the library against an
// independent re-implementation or a hand-constructed fixture rather than
// against the library itself. Check 7 trains for real and can take hours;
// pass a comma-separated list of criterion numbers as the only argument to
// run a subset (e.g. "1,2,3").

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "walklab/adapt.hpp"
#include "walklab/agent.hpp"
#include "walklab/env.hpp"
#include "walklab/gait.hpp"
#include "walklab/model.hpp"
#include "walklab/muscle.hpp"
#include "walklab/replay.hpp"
#include "walklab/reward.hpp"
#include "walklab/rng.hpp"
#include "walklab/runio.hpp"
#include "walklab/sim.hpp"
#include "walklab/terrain.hpp"

namespace {

using walklab::RewardBreakdown;
using walklab::RewardWeights;

std::string g_detail;  // failure notes for the criterion being run

void note(const std::string& msg) {
  g_detail += "  ";
  g_detail += msg;
  g_detail += "\n";
}

bool expect(bool ok, const std::string& msg) {
  if (!ok) note(msg);
  return ok;
}

bool bits_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

double rel_err(double got, double want) {
  const double scale = std::max({1.0, std::abs(got), std::abs(want)});
  return std::abs(got - want) / scale;
}

std::string model_path() {
  return std::string(WALKLAB_ASSET_DIR) + "/h0918.model";
}

// ---------------------------------------------------------------------------
// Criterion 1: reward functions against a brute-force scalar evaluator.

struct OracleCosts {
  double activity = 0.0;
  double smooth = 0.0;
  double nactive = 0.0;
  double limits = 0.0;
  double grf = 0.0;
};

double oracle_velocity(double v, double v_target) {
  if (v >= v_target) return 1.0;
  const double d = v - v_target;
  return std::exp(-d * d);
}

double oracle_effort(const std::vector<double>& a, const std::vector<double>& u,
                     const std::vector<double>& u_prev, double alpha,
                     const RewardWeights& w, OracleCosts* c) {
  const std::size_t n = a.size();
  double cube_sum = 0.0;
  double diff_sum = 0.0;
  int active = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cube_sum += a[i] * a[i] * a[i];
    const double d = u[i] - u_prev[i];
    diff_sum += d * d;
    if (a[i] > w.activity_threshold) ++active;
  }
  c->activity = cube_sum / static_cast<double>(n);
  c->smooth = w.w1 * diff_sum;
  c->nactive = w.w2 * (static_cast<double>(active) / static_cast<double>(n));
  return alpha * c->activity + c->smooth + c->nactive;
}

double oracle_pain(const std::vector<double>& torques,
                   const std::vector<double>& grfs, double body_weight,
                   const RewardWeights& w, OracleCosts* c) {
  double t_sum = 0.0;
  for (double t : torques) t_sum += std::abs(t);
  double g_sum = 0.0;
  for (double g : grfs) g_sum += std::max(0.0, g / body_weight - w.grf_threshold);
  c->limits = w.w3 * t_sum;
  c->grf = w.w4 * g_sum;
  return c->limits + c->grf;
}

bool criterion1() {
  std::mt19937_64 gen(0x5eed001);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Pinned examples first; these must hold exactly.
  bool ok = true;
  ok &= expect(walklab::velocity_reward(1.2, 1.2) == 1.0, "v at target != 1");
  ok &= expect(walklab::velocity_reward(2.0, 1.2) == 1.0, "v above target != 1");
  ok &= expect(bits_equal(walklab::velocity_reward(0.2, 1.2), std::exp(-1.0)),
               "v = 0.2 not exp(-1)");

  Eigen::VectorXd a3(3);
  a3 << 0.2, 0.1, 0.16;
  ok &= expect(walklab::count_active(a3, 0.15) == 2, "active count != 2");
  Eigen::VectorXd at_thr = Eigen::VectorXd::Constant(4, 0.15);
  ok &= expect(walklab::count_active(at_thr, 0.15) == 0,
               "threshold itself counted active");

  RewardWeights dw;
  {
    // All activations at or below threshold, unchanged excitations, alpha 0.
    Eigen::VectorXd a = Eigen::VectorXd::Constant(6, 0.15);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(6, 0.3);
    RewardBreakdown b;
    const double cost = walklab::effort_cost(a, u, u, 0.0, dw, &b);
    ok &= expect(cost == 0.0, "idle effort cost nonzero");
    ok &= expect(b.effort_activity != 0.0 || b.effort_activity == 0.0, "");
    ok &= expect(b.effort_smooth == 0.0 && b.effort_nactive == 0.0,
                 "idle effort components nonzero");
  }
  {
    // Half activation everywhere: mean cubic activity is exactly 1/8.
    Eigen::VectorXd a = Eigen::VectorXd::Constant(18, 0.5);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(18);
    RewardBreakdown b;
    walklab::effort_cost(a, u, u, 1.0, dw, &b);
    ok &= expect(b.effort_activity == 0.125, "cubic activity != 0.125");
    ok &= expect(b.effort_smooth == 0.0, "smoothness nonzero for u == u_prev");
  }
  {
    // Body weight a power of two makes the body-weight ratios exact.
    const double bw = 512.0;
    Eigen::VectorXd torques = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd grfs = Eigen::VectorXd::Constant(2, 1.2 * bw);
    RewardBreakdown b;
    ok &= expect(walklab::pain_cost(torques, grfs, bw, dw, &b) == 0.0,
                 "GRF exactly at threshold penalized");
    Eigen::VectorXd one(1);
    one << 1.5 * bw;
    walklab::pain_cost(torques, one, bw, dw, &b);
    ok &= expect(bits_equal(b.pain_grf, 0.073 * (1.5 - 1.2)),
                 "GRF excess term mismatch");
    ok &= expect(rel_err(b.pain_grf, 0.0219) < 1e-3, "GRF excess far from 0.0219");
    Eigen::VectorXd two(2);
    two << 1.0, 2.0;
    Eigen::VectorXd no_grf(0);
    walklab::pain_cost(two, no_grf, bw, dw, &b);
    ok &= expect(bits_equal(b.pain_limits, 0.131 * 3.0),
                 "limit torque term != 0.131 * 3");
  }
  {
    RewardBreakdown b;
    b.r_vel = 1.0;
    ok &= expect(walklab::total_reward(b, 0.7) == 1.0,
                 "costless total reward != 1");
    b.effort_activity = 0.25;
    const double diff =
        walklab::total_reward(b, 0.0) - walklab::total_reward(b, 0.5);
    ok &= expect(std::abs(diff - 0.5 * 0.25) <= 1e-12,
                 "alpha linearity broken on pinned breakdown");
  }
  ok &= expect(walklab::running_reward(3.0, 0.0, 512.0, 1.0) == 3.0,
               "collision-free running reward != v");
  ok &= expect(walklab::running_reward(0.0, 0.0, 512.0, 1.0) == 0.0,
               "running reward at rest != 0");
  ok &= expect(walklab::running_reward(3.0, 256.0, 512.0, 1.0) == 2.5,
               "running collision penalty mismatch");

  // Brute-force sweep over random inputs and random weights.
  int bad = 0;
  for (int it = 0; it < 10000 && bad < 5; ++it) {
    RewardWeights w;
    w.w1 = 2.0 * unit(gen);
    w.w2 = 2.0 * unit(gen);
    w.w3 = 2.0 * unit(gen);
    w.w4 = 2.0 * unit(gen);
    w.v_target = 0.5 + 1.5 * unit(gen);
    w.grf_threshold = 0.5 + 1.5 * unit(gen);
    w.activity_threshold = 0.05 + 0.45 * unit(gen);

    const double v = -1.0 + 4.0 * unit(gen);
    const double got_v = walklab::velocity_reward(v, w.v_target);
    if (rel_err(got_v, oracle_velocity(v, w.v_target)) > 1e-12) {
      note("velocity_reward mismatch at v = " + std::to_string(v));
      ++bad;
    }

    const int n = 1 + static_cast<int>(unit(gen) * 29.0);
    std::vector<double> av(n), uv(n), upv(n);
    Eigen::VectorXd ae(n), ue(n), upe(n);
    for (int i = 0; i < n; ++i) {
      av[i] = unit(gen);
      uv[i] = unit(gen);
      upv[i] = unit(gen);
      ae[i] = av[i];
      ue[i] = uv[i];
      upe[i] = upv[i];
    }
    const double alpha = 2.0 * unit(gen);
    OracleCosts oc;
    const double want_e = oracle_effort(av, uv, upv, alpha, w, &oc);
    RewardBreakdown b;
    b.r_vel = got_v;
    const double got_e = walklab::effort_cost(ae, ue, upe, alpha, w, &b);
    if (rel_err(got_e, want_e) > 1e-12 ||
        rel_err(b.effort_activity, oc.activity) > 1e-12 ||
        rel_err(b.effort_smooth, oc.smooth) > 1e-12 ||
        rel_err(b.effort_nactive, oc.nactive) > 1e-12) {
      note("effort_cost mismatch on iteration " + std::to_string(it));
      ++bad;
    }

    const double bw = 100.0 + 900.0 * unit(gen);
    const int nt = 1 + static_cast<int>(unit(gen) * 8.0);
    std::vector<double> tv(nt);
    Eigen::VectorXd te(nt);
    for (int i = 0; i < nt; ++i) {
      tv[i] = -50.0 + 100.0 * unit(gen);
      te[i] = tv[i];
    }
    std::vector<double> gv(2);
    Eigen::VectorXd ge(2);
    for (int i = 0; i < 2; ++i) {
      gv[i] = 3.0 * bw * unit(gen);
      ge[i] = gv[i];
    }
    const double want_p = oracle_pain(tv, gv, bw, w, &oc);
    const double got_p = walklab::pain_cost(te, ge, bw, w, &b);
    if (rel_err(got_p, want_p) > 1e-12 ||
        rel_err(b.pain_limits, oc.limits) > 1e-12 ||
        rel_err(b.pain_grf, oc.grf) > 1e-12) {
      note("pain_cost mismatch on iteration " + std::to_string(it));
      ++bad;
    }

    const double want_t = got_v - (alpha * b.effort_activity +
                                   b.effort_smooth + b.effort_nactive) -
                          (b.pain_limits + b.pain_grf);
    const double got_t = walklab::total_reward(b, alpha);
    if (rel_err(got_t, want_t) > 1e-12) {
      note("total_reward mismatch on iteration " + std::to_string(it));
      ++bad;
    }
    if (got_t > 1.0) {
      note("total reward above 1 on iteration " + std::to_string(it));
      ++bad;
    }

    const double coll = 2.0 * bw * unit(gen);
    const double wc = 2.0 * unit(gen);
    const double want_r = v - wc * (coll / bw);
    if (rel_err(walklab::running_reward(v, coll, bw, wc), want_r) > 1e-12) {
      note("running_reward mismatch on iteration " + std::to_string(it));
      ++bad;
    }
  }
  return ok && bad == 0;
}

// ---------------------------------------------------------------------------
// Criterion 2: effort-weight schedule against a straight-line re-derivation.

struct FlatAdapt {
  double alpha = 0.0;
  double dalpha = 0.0;
  double rmean = 0.0;
  double cmean = 0.0;
};

void flat_update(FlatAdapt* s, double r, double theta, double beta,
                 double lambda) {
  s->rmean = beta * s->rmean + (1.0 - beta) * r;
  if (s->rmean > theta) {
    if (s->cmean >= 0.5) {
      s->alpha += s->dalpha;
    } else {
      s->dalpha *= lambda;
    }
  } else {
    s->alpha = std::max(0.0, s->alpha - s->dalpha);
  }
  s->cmean = beta * s->cmean + (1.0 - beta) * (s->rmean > theta ? 1.0 : 0.0);
}

bool criterion2() {
  bool ok = true;
  walklab::AdaptConfig cfg;

  // Hand-simulated trace: constant return 2000 against the default config.
  {
    walklab::AdaptState s = walklab::AdaptState::initial(cfg);
    int first_above = 0, first_alpha = 0;
    for (int k = 1; k <= 20; ++k) {
      walklab::adapt_update(cfg, 2000.0, &s);
      if (first_above == 0 && s.r_mean > cfg.threshold) first_above = k;
      if (first_alpha == 0 && s.alpha > 0.0) first_alpha = k;
      if (k == 1) ok &= expect(s.r_mean == 400.0, "r_mean step 1 != 400");
      if (k == 2) ok &= expect(s.r_mean == 720.0, "r_mean step 2 != 720");
      if (k == 3) ok &= expect(s.r_mean == 976.0, "r_mean step 3 != 976");
      if (k == 4) {
        ok &= expect(rel_err(s.r_mean, 1180.8) < 1e-12, "r_mean step 4 off");
        ok &= expect(s.delta_alpha == cfg.delta_alpha0 * cfg.lambda,
                     "step 4 did not decay delta_alpha once");
        ok &= expect(s.alpha == 0.0, "alpha rose before confidence built");
      }
    }
    ok &= expect(first_above == 4, "threshold first crossed at step != 4");
    ok &= expect(first_alpha == 8, "alpha first rose at step != 8");
    const double expected_alpha =
        cfg.delta_alpha0 * cfg.lambda * cfg.lambda * cfg.lambda * cfg.lambda;
    walklab::AdaptState probe = walklab::AdaptState::initial(cfg);
    for (int k = 1; k <= 8; ++k) walklab::adapt_update(cfg, 2000.0, &probe);
    ok &= expect(rel_err(probe.alpha, expected_alpha) < 1e-12,
                 "first alpha raise != four-times-decayed step");
  }
  {
    // Single low return from a fresh state: smoothed return 100, no change.
    walklab::AdaptState s = walklab::AdaptState::initial(cfg);
    walklab::adapt_update(cfg, 500.0, &s);
    ok &= expect(s.r_mean == 100.0 && s.alpha == 0.0 && s.c_mean == 0.0,
                 "fresh low-return update moved state");
  }

  // Random return sequences, exact agreement with the re-derivation.
  std::mt19937_64 gen(0x5eed002);
  std::uniform_real_distribution<double> ret(-500.0, 2500.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int seq = 0; seq < 1000 && ok; ++seq) {
    walklab::AdaptConfig c;
    if (seq % 3 == 1) {
      c.threshold = 200.0 + 800.0 * unit(gen);
      c.beta = 0.5 + 0.45 * unit(gen);
      c.delta_alpha0 = 1e-4 + 1e-3 * unit(gen);
      c.lambda = 0.5 + 0.5 * unit(gen);
    } else if (seq % 3 == 2) {
      c.threshold = 0.0;  // always above: exercises raise and decay branches
    }
    walklab::AdaptState s = walklab::AdaptState::initial(c);
    FlatAdapt f{s.alpha, s.delta_alpha, s.r_mean, s.c_mean};
    double prev_dalpha = s.delta_alpha;
    for (int k = 0; k < 50; ++k) {
      const double r = ret(gen);
      walklab::adapt_update(c, r, &s);
      flat_update(&f, r, c.threshold, c.beta, c.lambda);
      if (!bits_equal(s.alpha, f.alpha) ||
          !bits_equal(s.delta_alpha, f.dalpha) ||
          !bits_equal(s.r_mean, f.rmean) || !bits_equal(s.c_mean, f.cmean)) {
        note("state diverged from re-derivation, sequence " +
             std::to_string(seq) + " step " + std::to_string(k));
        ok = false;
        break;
      }
      // Invariants on every step.
      if (s.alpha < 0.0 || s.delta_alpha > prev_dalpha ||
          s.delta_alpha <= 0.0 || s.c_mean < 0.0 || s.c_mean > 1.0) {
        note("invariant violated, sequence " + std::to_string(seq));
        ok = false;
        break;
      }
      prev_dalpha = s.delta_alpha;
      // Exactly one branch condition holds by construction; confirm the
      // conditions partition the space.
      const bool above = s.r_mean > c.threshold;
      const int branches = (above ? 1 : 0) + (!above ? 1 : 0);
      if (branches != 1) {
        note("branch conditions did not partition");
        ok = false;
        break;
      }
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: replay relabeling is bitwise exact and affine in alpha.

bool criterion3() {
  bool ok = true;
  const int n = 1000, od = 8, ad = 4;
  walklab::ReplayBuffer buf(n, od, ad);
  std::vector<RewardBreakdown> kept;
  kept.reserve(n);
  std::mt19937_64 gen(0x5eed003);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::VectorXf obs(od), act(ad), next(od);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < od; ++j) {
      obs[j] = static_cast<float>(unit(gen));
      next[j] = static_cast<float>(unit(gen));
    }
    obs[0] = static_cast<float>(i);  // identity tag for the sampled rows
    for (int j = 0; j < ad; ++j) act[j] = static_cast<float>(unit(gen));
    RewardBreakdown b;
    b.r_vel = unit(gen);
    b.effort_activity = unit(gen);
    b.effort_smooth = 0.5 * unit(gen);
    b.effort_nactive = 1.6 * unit(gen);
    b.pain_limits = 2.0 * unit(gen);
    b.pain_grf = unit(gen);
    buf.add(obs, act, b, next, unit(gen) < 0.1, i / 10);
    kept.push_back(b);
  }

  walklab::Rng rng(99);
  walklab::ReplayBatch batch1, batch2;
  for (int k = 0; k < 100 && ok; ++k) {
    const double a1 = 1.5 * unit(gen);
    const double a2 = 1.5 * unit(gen);
    walklab::Rng r1 = rng;   // replay the same index stream at both alphas
    walklab::Rng r2 = rng;
    buf.sample(n, a1, &r1, &batch1);
    buf.sample(n, a2, &r2, &batch2);
    rng = r1;
    for (int j = 0; j < n; ++j) {
      const int idx = static_cast<int>(batch1.obs(0, j));
      if (idx < 0 || idx >= n) {
        note("sampled row lost its identity tag");
        ok = false;
        break;
      }
      const double fresh1 = walklab::total_reward(kept[idx], a1);
      const double fresh2 = walklab::total_reward(kept[idx], a2);
      if (!bits_equal(batch1.reward[j], fresh1) ||
          !bits_equal(batch2.reward[j], fresh2)) {
        note("sampled reward differs from fresh recomposition, alpha pass " +
             std::to_string(k));
        ok = false;
        break;
      }
      const double diff = batch1.reward[j] - batch2.reward[j];
      const double want = (a2 - a1) * kept[idx].effort_activity;
      if (std::abs(diff - want) > 1e-12) {
        note("alpha-pair difference is not (a2-a1)*activity, pass " +
             std::to_string(k));
        ok = false;
        break;
      }
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: physics invariants.

// Two-rod chain used for the energy test; matches the passive-dynamics
// fixture in the unit suite.
const char* kPendulumText = R"(model double_pendulum
gravity 9.81
link upper parent world joint revolute mass 1.0 com 0 -0.25 inertia 0.02 length 0.5 axis 0 -1
link lower parent upper joint revolute mass 1.0 com 0 -0.25 inertia 0.02 length 0.5 axis 0 -1
)";

bool criterion4() {
  bool ok = true;

  // Energy drift of an undriven two-rod chain.
  {
    walklab::ModelSpec m = walklab::load_model(kPendulumText);
    walklab::Sim sim(m, walklab::Terrain::flat());
    walklab::SimState s = sim.make_state();
    s.q << 1.8, 0.6;
    const double e0 = sim.dynamics().total_energy(s.q, s.qdot, true);
    if (!expect(std::abs(e0) > 1.0, "degenerate initial energy")) return false;
    Eigen::VectorXd u(0);
    walklab::StepReport rep;
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      sim.step(&s, u, 1e-4, &rep);
      if ((i + 1) % 1000 == 0) {
        const double e = sim.dynamics().total_energy(s.q, s.qdot, true);
        worst = std::max(worst, std::abs(e - e0));
      }
    }
    const double e1 = sim.dynamics().total_energy(s.q, s.qdot, true);
    worst = std::max(worst, std::abs(e1 - e0));
    ok &= expect(worst < 0.01 * std::abs(e0),
                 "pendulum energy drift " + std::to_string(worst / std::abs(e0)));
  }

  // A biped placed at standing height settles carrying its own weight.
  {
    walklab::ModelSpec m = walklab::load_model_file(model_path());
    walklab::Sim sim(m, walklab::Terrain::flat());
    walklab::SimState s = sim.make_state();
    s.q(1) = sim.standing_pelvis_height();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m.muscles.size());
    walklab::StepReport rep;
    double grf_acc = 0.0;
    int grf_n = 0;
    for (int i = 0; i < 10000; ++i) {
      sim.step(&s, u, 1e-4, &rep);
      if (s.t > 0.5) {
        grf_acc += rep.grf.sum();
        ++grf_n;
      }
    }
    const double mean_grf = grf_acc / grf_n;
    ok &= expect(std::abs(mean_grf - m.body_weight()) <
                     0.01 * m.body_weight(),
                 "settled GRF sum " + std::to_string(mean_grf) + " vs weight " +
                     std::to_string(m.body_weight()));
  }

  // Force-length curve peaks at the optimal fiber length.
  {
    double best_l = 0.0, best_f = -1.0;
    const double grid = 1e-3;
    for (double l = 0.5; l <= 1.5 + 1e-12; l += grid) {
      const double f = walklab::force_length(l);
      if (f > best_f) {
        best_f = f;
        best_l = l;
      }
    }
    ok &= expect(std::abs(best_l - 1.0) <= grid + 1e-12,
                 "force-length peak at " + std::to_string(best_l));
    ok &= expect(std::abs(best_f - 1.0) < 1e-6, "force-length peak not 1");
  }

  // Activation stays in [0, 1] under random excitation steps.
  {
    std::mt19937_64 gen(0x5eed004);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double a = 0.0;
    bool bounded = true;
    for (int i = 0; i < 100000; ++i) {
      const double u = unit(gen) * 1.5 - 0.25;  // overdriven on both sides
      const double dt = 1e-4 + unit(gen) * 0.02;
      a = walklab::activation_step(a, u, dt, 0.01, 0.04);
      if (!(a >= 0.0 && a <= 1.0)) {
        bounded = false;
        break;
      }
    }
    ok &= expect(bounded, "activation left [0, 1]");
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: gait segmentation and the experimental-match metric.

// Periodic synthetic walking data with strikes on an exact integer grid:
// period 120 samples, leg 0 rising at sample 25 + 120 k, stance 60%.
walklab::Rollout synthetic_rollout() {
  walklab::Rollout r;
  r.dt = 0.01;
  r.body_weight = 736.0;
  const int period = 120, n = 1000;
  r.activations = Eigen::MatrixXd::Constant(4, n, 0.2);
  for (int i = 0; i < n; ++i) {
    const double t = i * r.dt;
    const double phase = 2.0 * M_PI * i / period;
    for (int leg = 0; leg < 2; ++leg) {
      const double lp = phase + (leg == 0 ? 0.0 : M_PI);
      r.hip[leg].push_back(0.3 * std::sin(lp));
      r.knee[leg].push_back(-0.4 + 0.3 * std::cos(lp));
      r.ankle[leg].push_back(0.1 * std::sin(lp + 0.5));
      const int local =
          (i - 25 + (leg == 0 ? 0 : period / 2) + 10 * period) % period;
      r.grf[leg].push_back(local < 72 ? 600.0 : 0.0);
    }
    r.com_x.push_back(1.1 * t);
    r.com_vx.push_back(1.1);
  }
  return r;
}

bool criterion5() {
  bool ok = true;
  walklab::Rollout r = synthetic_rollout();

  const auto strikes = walklab::detect_foot_strikes(
      r.grf[0], r.dt, walklab::kStrikeThresholdBw * r.body_weight,
      walklab::kStrikeDebounceSeconds);
  ok &= expect(strikes.size() == 9, "strike count " +
               std::to_string(strikes.size()) + " != 9");
  const auto signals = walklab::gait_signals(r, 0);
  const auto cycles = walklab::segment_and_normalize(signals, 0, strikes,
                                                     walklab::kGaitPoints);
  if (!expect(cycles.size() == 8,
              "cycle count " + std::to_string(cycles.size()) + " != 8")) {
    return false;
  }

  const auto mean_traces = walklab::average_cycles(cycles);
  const int pts = walklab::kGaitPoints;

  // Band centered on the trace itself: everything inside, match 1.0.
  walklab::ReferenceBand inside;
  inside.points = pts;
  for (const auto& [name, m] : mean_traces) {
    inside.signals.emplace(name,
                           std::make_pair(m, Eigen::VectorXd::Ones(pts)));
  }
  for (const auto& [name, f] : walklab::experimental_match(mean_traces, inside)) {
    ok &= expect(f == 1.0, "inside-band fraction for " + name + " != 1");
  }

  // Second half of the band shifted far away: exactly half outside, 0.5.
  walklab::ReferenceBand half;
  half.points = pts;
  for (const auto& [name, m] : mean_traces) {
    Eigen::VectorXd shifted = m;
    for (int i = pts / 2; i < pts; ++i) shifted[i] += 10.0;
    half.signals.emplace(name,
                         std::make_pair(shifted, Eigen::VectorXd::Ones(pts)));
  }
  for (const auto& [name, f] : walklab::experimental_match(mean_traces, half)) {
    ok &= expect(f == 0.5, "half-outside fraction for " + name + " != 0.5");
  }

  // Trace sitting at mean + 2 sd everywhere: all outside, 0.0.
  walklab::ReferenceBand out;
  out.points = pts;
  for (const auto& [name, m] : mean_traces) {
    Eigen::VectorXd low = m.array() - 2.0;
    out.signals.emplace(name,
                        std::make_pair(low, Eigen::VectorXd::Ones(pts)));
  }
  for (const auto& [name, f] : walklab::experimental_match(mean_traces, out)) {
    ok &= expect(f == 0.0, "two-sigma-out fraction for " + name + " != 0");
  }

  // The aggregate follows the per-signal fractions.
  walklab::MatchReport rep = walklab::analyze_cycles(cycles, &inside);
  ok &= expect(rep.aggregate == 1.0, "aggregate match != 1 on centered band");
  ok &= expect(rep.cycles == 8, "report cycle count != 8");
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: terrain generator contract.

bool criterion6() {
  bool ok = true;
  const double max_dy = std::tan(5.0 * M_PI / 180.0) * (1.0 + 1e-9);
  for (std::uint64_t seed = 1; seed <= 1000 && ok; ++seed) {
    const walklab::Terrain t = walklab::Terrain::sloped_tiles(seed);
    const auto& k = t.knots();
    ok &= expect(k.size() == 12, "knot count != 12");
    ok &= expect(k.front().x == -5.0 && k.front().y == 0.0 &&
                     k[1].x == 0.0 && k[1].y == 0.0,
                 "run-in knots wrong");
    for (std::size_t i = 1; i + 1 < k.size() && ok; ++i) {
      const double dx = k[i + 1].x - k[i].x;
      const double dy = k[i + 1].y - k[i].y;
      ok &= expect(dx > 0.0, "knots not strictly increasing");
      ok &= expect(std::abs(dy / dx) <= max_dy,
                   "tile slope out of range on seed " + std::to_string(seed));
    }
    // C0 continuity across knots and flat extension beyond the ends.
    for (std::size_t i = 0; i < k.size() && ok; ++i) {
      const double below = t.height(k[i].x - 1e-9);
      const double at = t.height(k[i].x);
      const double above = t.height(k[i].x + 1e-9);
      ok &= expect(std::abs(below - at) < 1e-6 && std::abs(above - at) < 1e-6,
                   "height discontinuity at a knot");
      ok &= expect(std::abs(at - k[i].y) < 1e-9, "knot height not matched");
    }
    ok &= expect(t.height(k.front().x - 100.0) == k.front().y &&
                     t.height(k.back().x + 100.0) == k.back().y,
                 "profile does not extend flat");
    // Bit reproducibility.
    const walklab::Terrain t2 = walklab::Terrain::sloped_tiles(seed);
    const auto& k2 = t2.knots();
    bool same = k2.size() == k.size();
    for (std::size_t i = 0; same && i < k.size(); ++i) {
      same = bits_equal(k[i].x, k2[i].x) && bits_equal(k[i].y, k2[i].y);
    }
    ok &= expect(same, "seed " + std::to_string(seed) + " not reproducible");
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: the training smoke test.

bool criterion7() {
  const auto start = std::chrono::steady_clock::now();
  const double budget = 14000.0;
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  walklab::ModelSpec model = walklab::load_model_file(model_path());
  bool ok = true;
  bool walked = false;

  for (std::uint64_t seed = 1; seed <= 3 && !walked; ++seed) {
    const double remaining = budget - elapsed();
    if (remaining < 900.0) {
      note("wall budget exhausted before seed " + std::to_string(seed));
      break;
    }
    walklab::EnvConfig env_cfg;  // walking defaults: 10 s horizon, clip 0.5
    walklab::LearnerConfig lc;   // 2 x 256 networks
    lc.steps_before_batches = 20000;
    lc.steps_between_batches = 10;
    lc.number_of_batches = 1;
    lc.buffer_capacity = 300000;
    lc.ou_sigma = 0.15;
    lc.ou_tau = 0.2;
    walklab::AdaptConfig ac;
    walklab::TrainerOptions topt;
    topt.seed = seed;
    topt.max_env_steps = 2000000;
    topt.max_wall_seconds = std::min(4400.0, remaining - 300.0);
    topt.eval_every_episodes = 100;
    topt.eval_episodes = 2;
    topt.stop_eval_vx = 0.5;

    walklab::Trainer trainer(model, walklab::Terrain::flat(), env_cfg, lc, ac,
                             topt);
    std::vector<walklab::EpisodeRow> rows;
    const walklab::TrainResult res =
        trainer.run([&](const walklab::EpisodeRow& row) { rows.push_back(row); });

    ok &= expect(res.env_steps <= 2000000,
                 "seed used more than 2e6 environment steps");

    // The effort weight may only move once the smoothed return has crossed
    // the threshold; before that every logged alpha must be zero.
    std::size_t first_above = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].r_mean > ac.threshold) {
        first_above = i;
        break;
      }
    }
    for (std::size_t i = 0; i < first_above; ++i) {
      if (rows[i].alpha != 0.0) {
        ok = expect(false, "alpha nonzero before r_mean crossed the threshold");
        break;
      }
    }

    std::ostringstream line;
    line << "seed " << seed << ": episodes " << res.episodes << ", steps "
         << res.env_steps << ", eval vx " << res.last_eval.mean_vx
         << ", falls " << res.last_eval.falls;
    if (res.eval_success) {
      // Confirm with a fresh environment and held-out evaluation seeds.
      walklab::Env env(model, walklab::Terrain::flat(), env_cfg);
      const walklab::EvalStats es =
          walklab::evaluate(&env, &trainer.agent(), 3, 900000 + seed,
                            trainer.adapt_state().alpha);
      line << "; confirm vx " << es.mean_vx << ", falls " << es.falls;
      if (es.falls == 0 && es.mean_vx >= 0.5) walked = true;
    }
    note(line.str());
  }
  ok &= expect(walked, "no seed reached 0.5 m/s without falling");
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: ablation plumbing, verified from the emitted CSV files.

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + WALKLAB_CLI_PATH + "\" " + args +
                          " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool criterion8() {
  namespace fs = std::filesystem;
  bool ok = true;
  const fs::path dir =
      fs::temp_directory_path() /
      ("walklab_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path cfg = dir / "ablate.cfg";
  {
    std::ofstream out(cfg);
    out << "schema walklab-config-v1\n"
        << "model " << model_path() << "\n"
        << "seed 11\n"
        << "hidden_size 32\n"
        << "hidden_layers 1\n"
        << "batch_size 32\n"
        << "buffer_capacity 20000\n"
        << "steps_before_batches 1000000\n"
        << "max_env_steps 10000\n";
  }
  const fs::path out_dir = dir / "study";
  const int rc = run_cli("ablate --config " + cfg.string() + " --out " +
                         out_dir.string());
  if (!expect(rc == 0, "ablate exited with " + std::to_string(rc))) {
    return false;
  }

  // only-vel: every logged cost component is zero on every step.
  {
    const walklab::CsvTable t =
        walklab::read_csv((out_dir / "only-vel" / "steps.csv").string());
    const int ca = t.col("effort_activity"), cs = t.col("effort_smooth");
    const int cn = t.col("effort_nactive"), cl = t.col("pain_limits");
    const int cg = t.col("pain_grf");
    ok &= expect(ca >= 0 && cs >= 0 && cn >= 0 && cl >= 0 && cg >= 0,
                 "step log misses cost columns");
    ok &= expect(t.rows.size() == 10000,
                 "only-vel logged " + std::to_string(t.rows.size()) +
                     " steps, wanted 10000");
    bool zero = true;
    for (const auto& row : t.rows) {
      if (row[ca] != 0.0 || row[cs] != 0.0 || row[cn] != 0.0 ||
          row[cl] != 0.0 || row[cg] != 0.0) {
        zero = false;
        break;
      }
    }
    ok &= expect(zero, "only-vel logged a nonzero cost component");
  }

  // no-adapt: the effort weight stays exactly zero.
  {
    const walklab::CsvTable t =
        walklab::read_csv((out_dir / "no-adapt" / "metrics.csv").string());
    const int c = t.col("alpha");
    ok &= expect(c >= 0 && !t.rows.empty(), "no-adapt metrics malformed");
    bool zero = true;
    for (const auto& row : t.rows) {
      if (row[c] != 0.0) {
        zero = false;
        break;
      }
    }
    ok &= expect(zero, "no-adapt logged a nonzero alpha");
  }

  // no-effort: the excitation clip is lifted to 1 and recorded as such.
  {
    const walklab::CsvTable t =
        walklab::read_csv((out_dir / "no-effort" / "steps.csv").string());
    const std::string* clip = t.meta_value("clip");
    ok &= expect(clip != nullptr && std::stod(*clip) == 1.0,
                 "no-effort step log clip meta != 1");
    std::ifstream cmp(out_dir / "comparison.csv");
    ok &= expect(cmp.good(), "comparison.csv missing");
    std::string line;
    bool found = false;
    int clip_col = -1;
    while (std::getline(cmp, line)) {
      if (!line.empty() && line[0] == '#') continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string f;
      while (std::getline(ss, f, ',')) fields.push_back(f);
      if (clip_col < 0) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == "clip") clip_col = static_cast<int>(i);
        }
        continue;
      }
      if (!fields.empty() && fields[0] == "no-effort" && clip_col >= 0 &&
          clip_col < static_cast<int>(fields.size())) {
        found = true;
        ok &= expect(std::stod(fields[clip_col]) == 1.0,
                     "comparison clip for no-effort != 1");
      }
    }
    ok &= expect(found, "comparison.csv has no no-effort row");
  }

  fs::remove_all(dir);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    double budget_s;
    bool (*fn)();
  };
  const Entry entries[] = {
      {1, "reward oracle suite", 5.0, criterion1},
      {2, "effort-weight schedule trace equivalence", 5.0, criterion2},
      {3, "replay relabeling exactness", 10.0, criterion3},
      {4, "physics invariants", 120.0, criterion4},
      {5, "gait metric oracle", 5.0, criterion5},
      {6, "terrain contract", 5.0, criterion6},
      {7, "training smoke test", 14400.0, criterion7},
      {8, "ablation plumbing", 600.0, criterion8},
  };

  std::vector<int> wanted;
  if (argc > 1) {
    std::stringstream ss(argv[1]);
    std::string tok;
    while (std::getline(ss, tok, ',')) wanted.push_back(std::atoi(tok.c_str()));
  }

  int failures = 0;
  for (const Entry& e : entries) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), e.id) == wanted.end()) {
      continue;
    }
    g_detail.clear();
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = e.fn();
    } catch (const std::exception& ex) {
      note(std::string("unhandled exception: ") + ex.what());
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (dt >= e.budget_s) {
      note("runtime " + std::to_string(dt) + " s exceeded budget " +
           std::to_string(e.budget_s) + " s");
      ok = false;
    }
    std::printf("%s criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", e.id,
                e.name, dt);
    if (!ok) {
      std::fputs(g_detail.c_str(), stdout);
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
