// Acceptance gate: one binary that exercises every top-level claim the lab
// makes, printing exactly one [PASS]/[FAIL] line per criterion with the
// measured numbers, then a summary.  Exits 0 iff every attempted criterion
// passed.
//
//   ./acceptance            runs all 11 criteria (training for criterion 6
//                           dominates the runtime; it is executed last)
//   ./acceptance 1 5 8      runs only the listed criteria
//
// Criteria (details inline):
//    1  score normalization reproduces the reference comparison table
//    2  arrival calibration (volume / emergency fraction / workload)
//    3  duration calibration (Gamma means)
//    4  determinism + common-random-number roster sharing
//    5  learner correctness (GAE, gradients, first-update ratio, masking)
//    6  learning signal vs dispatch heuristics after a desk-scale run
//    7  heuristic signatures on 500 days
//    8  sequential-greedy == joint-argmax on decoupled instances
//    9  regret bounds + single-urgent gap construction
//   10  ex-post oracle dominates every dispatch policy
//   11  per-epoch inference latency of the policy network

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "golden_fixture.hpp"
#include "orlab/analytics.hpp"
#include "orlab/domain.hpp"
#include "orlab/heuristics.hpp"
#include "orlab/marl/net.hpp"
#include "orlab/marl/policy.hpp"
#include "orlab/marl/ppo.hpp"
#include "orlab/oracle.hpp"
#include "orlab/preschedule.hpp"
#include "orlab/reward.hpp"
#include "orlab/rng.hpp"
#include "orlab/simenv.hpp"
#include "orlab/theorycheck.hpp"

using namespace orlab;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, a...);
  return std::string(buf);
}

void report(int num, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", num, detail.c_str());
  std::fflush(stdout);
}

const SimConfig& dcfg() {
  static const SimConfig cfg = default_config();
  return cfg;
}

const PreSchedule& dplan() {
  static const PreSchedule plan = build_preschedule(dcfg());
  return plan;
}

double mean_metric(const std::vector<EpisodeMetrics>& ms, int idx) {
  double s = 0.0;
  for (const auto& m : ms) s += m.values[idx];
  return s / static_cast<double>(ms.size());
}

// ---------------------------------------------------------------------------
// 1. Feeding the reference per-metric means through normalize_scores must
//    reproduce the published normalized table within +-0.01 per cell (the
//    table prints two decimals), including the learned policy's averages
//    0.81 / 0.73 / 0.87.  Runtime < 1 s.
bool criterion1() {
  Stopwatch sw;
  double worst = 0.0;
  std::string worst_cell = "-";
  for (const golden::Stratum& stratum : golden::kStrata) {
    std::vector<MetricsRow> rows;
    for (const golden::Row& g : stratum.rows) {
      MetricsRow r;
      r.policy = g.policy;
      r.episodes = 500;
      for (int k = 0; k < kNumMetrics; ++k)
        r.stats[static_cast<std::size_t>(k)].mean = g.means[static_cast<std::size_t>(k)];
      rows.push_back(r);
    }
    const std::vector<ScoreRow> scores = normalize_scores(rows);
    if (scores.size() != rows.size()) {
      report(1, false, "normalize_scores returned wrong row count");
      return false;
    }
    for (std::size_t p = 0; p < scores.size(); ++p) {
      for (int k = 0; k < kNumMetrics; ++k) {
        const double dev = std::fabs(scores[p].scores[static_cast<std::size_t>(k)] -
                                     stratum.rows[p].scores[static_cast<std::size_t>(k)]);
        if (dev > worst) {
          worst = dev;
          worst_cell = fmt("%s/%s/%s", stratum.name, scores[p].policy.c_str(),
                           kMetricNames[static_cast<std::size_t>(k)]);
        }
      }
      const double dev = std::fabs(scores[p].average - stratum.rows[p].average);
      if (dev > worst) {
        worst = dev;
        worst_cell = fmt("%s/%s/average", stratum.name, scores[p].policy.c_str());
      }
    }
  }
  const double el = sw.sec();
  const bool ok = worst <= 0.01 + 1e-9 && el < 1.0;
  report(1, ok,
         fmt("score normalization vs reference table: worst |dev| %.4f at %s "
             "(tol 0.01), 3 strata x 7 policies, %.3f s",
             worst, worst_cell.c_str(), el));
  return ok;
}

// ---------------------------------------------------------------------------
// 2. Arrival calibration over 1e5 days: mean daily volume 65 +- 0.3, share of
//    days with an emergency batch 0.40 +- 0.01, mean cumulative workload
//    677 +- 15 slot-units.  Runtime < 1 min.
bool criterion2() {
  Stopwatch sw;
  const int days = 100000;
  double vol = 0.0, fired = 0.0, work = 0.0;
  for (int i = 0; i < days; ++i) {
    const Roster roster =
        make_roster(dcfg(), dplan(), derive_seed(0xC2C2u, static_cast<std::uint64_t>(i)));
    vol += static_cast<double>(roster.patients.size());
    fired += roster.emergency_fired ? 1.0 : 0.0;
    work += roster.raw_workload;
  }
  vol /= days;
  fired /= days;
  work /= days;
  const double el = sw.sec();
  const bool ok = std::fabs(vol - 65.0) <= 0.3 && std::fabs(fired - 0.40) <= 0.01 &&
                  std::fabs(work - 677.0) <= 15.0 && el < 60.0;
  report(2, ok,
         fmt("arrival calibration on 1e5 days: volume %.3f (65 +- 0.3), emergency "
             "fraction %.4f (0.40 +- 0.01), workload %.1f (677 +- 15), %.1f s",
             vol, fired, work, el));
  return ok;
}

// ---------------------------------------------------------------------------
// 3. Duration calibration: 1e6 pre-rounding Gamma draws per class match the
//    analytic means 4 / 9 / 24 / 35 within 1%.
bool criterion3() {
  Stopwatch sw;
  const std::array<double, 4> target = {4.0, 9.0, 24.0, 35.0};
  double worst_rel = 0.0;
  std::string note;
  for (int k = 0; k < 4; ++k) {
    const SurgeryClass& cls = dcfg().cls(k + 1);
    Rng rng(derive_seed(0xD0C5u, static_cast<std::uint64_t>(k)));
    double s = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) s += rng.gamma(cls.gamma_shape, cls.gamma_scale);
    const double mean = s / n;
    const double rel = std::fabs(mean - target[static_cast<std::size_t>(k)]) /
                       target[static_cast<std::size_t>(k)];
    worst_rel = std::max(worst_rel, rel);
    note += fmt("%s%.4f", k ? "/" : "", mean);
  }
  const bool ok = worst_rel < 0.01;
  report(3, ok,
         fmt("duration calibration, 1e6 draws/class: means %s vs 4/9/24/35, worst "
             "rel dev %.5f (tol 0.01), %.1f s",
             note.c_str(), worst_rel, sw.sec()));
  return ok;
}

// ---------------------------------------------------------------------------
// 4. Determinism and common random numbers: per seed+policy two fresh runs
//    serialize bit-identically, and the realized roster (ids, classes,
//    arrivals, references, durations, emergency batch) is the same under
//    every policy on that seed.
bool criterion4() {
  Stopwatch sw;
  bool ok = true;
  std::string why;
  int emergency_days = 0;
  const std::vector<std::uint64_t> seeds = {101, 102, 103, 104, 105, 106};
  for (const std::uint64_t seed : seeds) {
    std::vector<EpisodeRecord> recs;
    for (const HeuristicKind kind : all_heuristics()) {
      HeuristicPolicy p1(kind, dcfg()), p2(kind, dcfg());
      EpisodeRecord r1 = run_episode(dcfg(), dplan(), seed, p1);
      const EpisodeRecord r2 = run_episode(dcfg(), dplan(), seed, p2);
      if (serialize_record(r1) != serialize_record(r2)) {
        ok = false;
        why = fmt("rerun of %s on seed %llu not bit-identical",
                  heuristic_name(kind).c_str(), (unsigned long long)seed);
      }
      recs.push_back(std::move(r1));
    }
    const EpisodeRecord& ref = recs.front();
    emergency_days += ref.emergency_fired ? 1 : 0;
    for (const EpisodeRecord& r : recs) {
      if (r.rows.size() != ref.rows.size() || r.emergency_fired != ref.emergency_fired ||
          r.emergency_slot != ref.emergency_slot) {
        ok = false;
        why = fmt("roster shape differs across policies on seed %llu",
                  (unsigned long long)seed);
        continue;
      }
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& a = r.rows[i];
        const auto& b = ref.rows[i];
        if (a.id != b.id || a.class_id != b.class_id || a.arrival != b.arrival ||
            a.reference != b.reference || a.duration != b.duration) {
          ok = false;
          why = fmt("roster row %zu differs across policies on seed %llu", i,
                    (unsigned long long)seed);
        }
      }
    }
  }
  report(4, ok,
         ok ? fmt("determinism/CRN: 6 seeds x 6 policies bit-identical reruns, shared "
                  "rosters (%d/6 emergency days), %.1f s",
                  emergency_days, sw.sec())
            : why);
  return ok;
}

// ---------------------------------------------------------------------------
// 5. Learner correctness: (a) GAE recursion equals the direct double sum to
//    1e-10; (b) reverse-mode gradients match central finite differences to
//    rel. err < 1e-4; (c) importance ratio is exactly 1 when re-evaluated
//    before the first parameter update; (d) masked actions are never sampled
//    in 1e5 draws and carry exactly zero probability.  Runtime < 1 min.
bool criterion5() {
  Stopwatch sw;
  bool ok = true;
  std::string why;

  // (a) GAE vs direct sum A_t = sum_l (gl)^l * (r_{t+l} + g v_{t+l+1} - v_{t+l}).
  double gae_dev = 0.0;
  for (const auto& [g, l] : {std::pair{dcfg().ppo.discount, dcfg().ppo.gae_lambda},
                             std::pair{0.97, 0.9}}) {
    Rng rng(0x6AE);
    std::vector<double> r(37), v(38);
    for (double& x : r) x = 4.0 * rng.uniform() - 2.0;
    for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
    const auto a = compute_gae(r, v, g, l);
    for (std::size_t t = 0; t < r.size(); ++t) {
      double direct = 0.0, w = 1.0;
      for (std::size_t u = t; u < r.size(); ++u) {
        direct += w * (r[u] + g * v[u + 1] - v[u]);
        w *= g * l;
      }
      gae_dev = std::max(gae_dev, std::fabs(a[t] - direct));
    }
  }
  if (gae_dev > 1e-10) {
    ok = false;
    why = fmt("GAE recursion deviates from direct sum by %.3e", gae_dev);
  }

  // (b) finite-difference gradient check on a tiny net.
  Mlp net({7, 9, 8, 5}, 77);
  Rng frng(5);
  std::vector<double> x(7), w(5);
  for (double& v : x) v = 2.0 * frng.uniform() - 1.0;
  for (double& v : w) v = 2.0 * frng.uniform() - 1.0;
  const auto loss = [&]() {
    const auto y = net.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * y[i];
    return s;
  };
  Mlp::Cache cache;
  net.forward(x, &cache);
  net.zero_grad();
  net.backward(cache, w);
  const double h = 1e-6;
  double fd_err = 0.0;
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    const double keep = net.params()[i];
    net.params()[i] = keep + h;
    const double up = loss();
    net.params()[i] = keep - h;
    const double dn = loss();
    net.params()[i] = keep;
    const double fd = (up - dn) / (2.0 * h);
    fd_err = std::max(fd_err, std::fabs(net.grads()[i] - fd) /
                                  std::max(1e-8, std::fabs(net.grads()[i]) + std::fabs(fd)));
  }
  if (fd_err >= 1e-4) {
    ok = false;
    why = fmt("finite-difference gradient rel. err %.3e", fd_err);
  }

  // (c) importance ratio at the first post-collection evaluation.
  const Encoder enc(dcfg());
  const ActorCritic ac(enc.dim(), enc.num_actions(), dcfg().ppo, 2024);
  const RolloutBatch batch = collect_rollouts(dcfg(), dplan(), ac, 2, 0x5A11, 0x5A12);
  double ratio_dev = 0.0;
  for (const PolicySample& s : batch.policy) {
    const MaskedCategorical d = masked_categorical(ac.actor.forward(s.obs), s.mask);
    ratio_dev = std::max(
        ratio_dev,
        std::fabs(std::exp(d.logps[static_cast<std::size_t>(s.action)] - s.logp_old) - 1.0));
  }
  if (batch.policy.empty() || ratio_dev > 1e-12) {
    ok = false;
    why = fmt("first-update ratio deviates from 1 by %.3e over %zu samples", ratio_dev,
              batch.policy.size());
  }

  // (d) masked actions never sampled, masked probabilities exactly zero.
  Rng mrng(4242);
  long violations = 0;
  bool zero_prob = true;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    std::vector<double> logits(9);
    std::vector<std::uint8_t> mask(9, 0);
    for (double& v : logits) v = 4.0 * mrng.uniform() - 2.0;
    int live = 0;
    for (auto& m : mask) live += (m = mrng.uniform() < 0.5 ? 1 : 0);
    if (live == 0) mask[mrng.uniform_int(9)] = 1;
    const MaskedCategorical d = masked_categorical(logits, mask);
    const int a = sample_action(d, mrng);
    if (!mask[static_cast<std::size_t>(a)]) ++violations;
    for (std::size_t k = 0; k < mask.size(); ++k)
      if (!mask[k] && d.probs[k] != 0.0) zero_prob = false;
  }
  if (violations != 0 || !zero_prob) {
    ok = false;
    why = fmt("masking: %ld masked samples drawn, zero-prob %s", violations,
              zero_prob ? "ok" : "violated");
  }
  const double el = sw.sec();
  ok = ok && el < 60.0;
  report(5, ok,
         ok ? fmt("learner correctness: GAE dev %.1e (tol 1e-10), FD grad rel err %.1e "
                  "(tol 1e-4), ratio dev %.1e over %zu samples (tol 1e-12), 0/%d masked "
                  "draws, %.1f s",
                  gae_dev, fd_err, ratio_dev, batch.policy.size(), draws, el)
            : why + fmt(" (%.1f s)", el));
  return ok;
}

// ---------------------------------------------------------------------------
// 6. Learning signal: a fresh desk-scale training run (>= 300 iterations of 16
//    episodes, wall clock <= 2.5 h), then mean CR on 200 paired held-out days
//    must (i) exceed SPT_U and NE_SPT by >= 5% and (ii) reach at least the best
//    heuristic minus 2%.  Qualitative-ordering criterion: the published table's
//    exact numbers rest on an unpublished setup matrix, so only the ordering is
//    asserted.  The run trains from scratch; nothing is pre-seeded.
bool criterion6() {
  Stopwatch sw;
  std::filesystem::create_directories("acceptance_out/train");
  std::ofstream log("acceptance_out/train/train.log");
  TrainOptions opt;
  opt.outdir = "acceptance_out/train";
  opt.seed = 1;
  opt.iterations_override = 3500;
  opt.log = &log;
  std::fprintf(stderr,
               "[note] criterion 6 trains 3500 iterations from scratch (~1 h); progress "
               "in acceptance_out/train/train.log\n");
  const TrainResult res = train(dcfg(), opt);
  const double train_sec = sw.sec();

  const Checkpoint ck = load_checkpoint(res.best_path, dcfg());
  const int days = 200;
  const std::uint64_t base = 777000;
  const auto eval_policy = [&](StepPolicy& pol) {
    double s = 0.0;
    for (int i = 0; i < days; ++i) {
      const EpisodeRecord rec =
          run_episode(dcfg(), dplan(), derive_seed(base, static_cast<std::uint64_t>(i)), pol);
      s += compute_metrics(rec, dcfg()).cr();
    }
    return s / days;
  };
  MarlStepPolicy marl(ck.ac, dcfg(), /*greedy=*/true);
  const double marl_cr = eval_policy(marl);
  double best_heur = -1e300, sptu_cr = 0.0, nespt_cr = 0.0;
  std::string heur_note, best_name;
  for (const HeuristicKind kind : all_heuristics()) {
    HeuristicPolicy pol(kind, dcfg());
    const double cr = eval_policy(pol);
    heur_note += fmt(" %s %.2f", heuristic_name(kind).c_str(), cr);
    if (cr > best_heur) {
      best_heur = cr;
      best_name = heuristic_name(kind);
    }
    if (kind == HeuristicKind::SptU) sptu_cr = cr;
    if (kind == HeuristicKind::NeSpt) nespt_cr = cr;
  }
  const bool margin_ok = marl_cr >= 1.05 * sptu_cr - 1e-9 && marl_cr >= 1.05 * nespt_cr - 1e-9;
  const bool near_best_ok = marl_cr >= 0.98 * best_heur - 1e-9;
  const bool time_ok = train_sec <= 9000.0;
  const bool ok = margin_ok && near_best_ok && time_ok;
  report(6, ok,
         fmt("learning signal: marl %.2f vs spt_u %.2f (%+.2f%%, need >= +5%%), ne_spt "
             "%.2f (%+.2f%%, need >= +5%%), best heuristic %s %.2f (marl/best %.4f, need "
             ">= 0.98); %d iters in %.0f s (cap 9000), best val %.2f at iter %d;%s",
             marl_cr, sptu_cr, 100.0 * (marl_cr / sptu_cr - 1.0), nespt_cr,
             100.0 * (marl_cr / nespt_cr - 1.0), best_name.c_str(), best_heur,
             marl_cr / best_heur, res.iterations, train_sec, res.best_val_reward,
             ck.iteration, heur_note.c_str()));
  return ok;
}

// ---------------------------------------------------------------------------
// 7. Heuristic signatures over 500 paired days: E_LPT has the strictly highest
//    mean Unserved(NE); the pre-day reference schedule has the strictly lowest
//    mean Overtime and Delay; SPT_U has the strictly highest mean Delay.
bool criterion7() {
  Stopwatch sw;
  const int days = 500;
  const std::uint64_t base = 424242;
  const auto& kinds = all_heuristics();
  std::vector<double> unserved(kinds.size(), 0.0), overtime(kinds.size(), 0.0),
      delay(kinds.size(), 0.0);
  std::size_t i_elpt = 0, i_pres = 0, i_sptu = 0;
  for (std::size_t p = 0; p < kinds.size(); ++p) {
    if (kinds[p] == HeuristicKind::ELpt) i_elpt = p;
    if (kinds[p] == HeuristicKind::PreSched) i_pres = p;
    if (kinds[p] == HeuristicKind::SptU) i_sptu = p;
    HeuristicPolicy pol(kinds[p], dcfg());
    for (int i = 0; i < days; ++i) {
      const EpisodeRecord rec =
          run_episode(dcfg(), dplan(), derive_seed(base, static_cast<std::uint64_t>(i)), pol);
      const EpisodeMetrics m = compute_metrics(rec, dcfg());
      unserved[p] += m.unserved_ne();
      overtime[p] += m.overtime();
      delay[p] += m.delay();
    }
    unserved[p] /= days;
    overtime[p] /= days;
    delay[p] /= days;
  }
  bool ok = true;
  std::string why;
  for (std::size_t p = 0; p < kinds.size(); ++p) {
    if (p != i_elpt && !(unserved[i_elpt] > unserved[p])) {
      ok = false;
      why += fmt(" unserved(e_lpt) %.3f !> %s %.3f;", unserved[i_elpt],
                 heuristic_name(kinds[p]).c_str(), unserved[p]);
    }
    if (p != i_pres && !(overtime[i_pres] < overtime[p])) {
      ok = false;
      why += fmt(" overtime(presched) %.2f !< %s %.2f;", overtime[i_pres],
                 heuristic_name(kinds[p]).c_str(), overtime[p]);
    }
    if (p != i_pres && !(delay[i_pres] < delay[p])) {
      ok = false;
      why += fmt(" delay(presched) %.2f !< %s %.2f;", delay[i_pres],
                 heuristic_name(kinds[p]).c_str(), delay[p]);
    }
    if (p != i_sptu && !(delay[i_sptu] > delay[p])) {
      ok = false;
      why += fmt(" delay(spt_u) %.2f !> %s %.2f;", delay[i_sptu],
                 heuristic_name(kinds[p]).c_str(), delay[p]);
    }
  }
  report(7, ok,
         ok ? fmt("heuristic signatures on %d days: unserved_ne e_lpt %.2f highest; "
                  "overtime presched %.2f lowest; delay presched %.2f lowest, spt_u %.2f "
                  "highest, %.0f s",
                  days, unserved[i_elpt], overtime[i_pres], delay[i_pres], delay[i_sptu],
                  sw.sec())
            : "heuristic signatures:" + why);
  return ok;
}

// ---------------------------------------------------------------------------
// 8. Weak-coupling equivalence: on 1000 random decoupled tiny instances the
//    sequential-greedy epoch value equals the exhaustive joint maximum in
//    100% of epochs.  Runtime < 1 min.
bool criterion8() {
  Stopwatch sw;
  const int n = 1000;
  long epochs = 0, joints = 0;
  int bad = 0;
  double max_gap = 0.0;
  for (int i = 0; i < n; ++i) {
    const TinyInstance inst =
        gen_weak_coupling_instance(derive_seed(0x8A8Au, static_cast<std::uint64_t>(i)));
    const ImmediateQ q;
    const WeakCouplingReport rep = check_weak_coupling(inst, q);
    epochs += rep.epochs;
    joints += rep.joint_actions_checked;
    max_gap = std::max(max_gap, rep.max_gap);
    if (!rep.all_equal()) ++bad;
  }
  const double el = sw.sec();
  const bool ok = bad == 0 && el < 60.0;
  report(8, ok,
         fmt("weak coupling: %d/%d instances with all epochs equal (%ld epochs, %ld "
             "joint actions, worst gap %.2e), %.1f s",
             n - bad, n, epochs, joints, max_gap, el));
  return ok;
}

// ---------------------------------------------------------------------------
// 9. Regret bounds on 200 exact-oracle tiny instances: the wait-channel
//    identity-bound and the linearized horizon bound both hold (premises
//    enforced by the generator), regret is nonnegative, and the single-urgent
//    construction's measured gap stays within c_k * Delta^2.
bool criterion9() {
  Stopwatch sw;
  const int n = 200;
  int bad = 0;
  std::string why;
  double worst_slack = 1e300;
  for (int i = 0; i < n; ++i) {
    const TinyInstance inst =
        gen_regret_instance(derive_seed(1, 0xABCDu + static_cast<std::uint64_t>(i)));
    const RegretReport rep = check_regret_bounds(inst, HeuristicKind::NeLpt);
    const bool ok_i = rep.oracle_optimal && rep.premise_ok && rep.wait_ok && rep.tbound_ok &&
                      rep.monotone_ok && rep.regret >= -1e-9;
    worst_slack = std::min(worst_slack, rep.wait_rhs - rep.regret);
    if (!ok_i) {
      ++bad;
      if (why.empty())
        why = fmt("instance %d: oracle %d premise %d wait %d tbound %d monotone %d "
                  "regret %.3f",
                  i, rep.oracle_optimal, rep.premise_ok, rep.wait_ok, rep.tbound_ok,
                  rep.monotone_ok, rep.regret);
    }
  }
  bool grid_ok = true;
  std::string grid_note;
  const int grid[5][3] = {{1, 3, 1}, {2, 5, 2}, {3, 5, 2}, {2, 7, 1}, {1, 4, 3}};
  for (const auto& g : grid) {
    const SingleUrgentGapReport rep = single_urgent_gap(g[0], g[1], g[2]);
    grid_ok = grid_ok && rep.ok && rep.gap <= rep.bound + 1e-9;
    grid_note += fmt(" %.3f<=%.3f", rep.gap, rep.bound);
  }
  const bool ok = bad == 0 && grid_ok;
  report(9, ok,
         ok ? fmt("regret bounds: %d/%d instances satisfy both bounds (min wait-bound "
                  "slack %.3f); single-urgent gaps%s; %.0f s",
                  n - bad, n, worst_slack, grid_note.c_str(), sw.sec())
            : fmt("regret bounds: %d/%d failed; %s; grid %s", bad, n, why.c_str(),
                  grid_ok ? "ok" : ("violated:" + grid_note).c_str()));
  return ok;
}

// ---------------------------------------------------------------------------
// 10. Oracle dominance: on 50 tiny instances the exact full-information
//     optimum weakly dominates every dispatch heuristic on the same
//     realization, strictly on at least one instance.  Instances come from the
//     regret generator, whose rejection sampling guarantees the exact solver
//     finishes within budget.
bool criterion10() {
  Stopwatch sw;
  bool ok = true;
  int strict = 0, checked = 0;
  std::string why;
  for (int i = 0; i < 50; ++i) {
    const TinyInstance inst =
        gen_regret_instance(derive_seed(0xD1u, static_cast<std::uint64_t>(i)));
    const OracleResult res = solve_exact(OracleInstance::from_roster(inst.roster, inst.cfg));
    if (!res.optimal) {
      ok = false;
      why = fmt("instance %d: exact solver hit its node budget", i);
      continue;
    }
    for (const HeuristicKind kind : all_heuristics()) {
      HeuristicPolicy pol(kind, inst.cfg);
      const EpisodeRecord rec = run_episode_on(Episode(inst.cfg, inst.roster), pol);
      const double cr = record_day_outcome(rec, inst.cfg).day_reward;
      ++checked;
      if (res.eval.total < cr - 1e-9) {
        ok = false;
        why = fmt("instance %d: %s CR %.4f beats oracle %.4f", i,
                  heuristic_name(kind).c_str(), cr, res.eval.total);
      }
      if (res.eval.total >= cr + 1e-6) ++strict;
    }
  }
  ok = ok && strict > 0;
  report(10, ok,
         ok ? fmt("oracle dominance: 50 instances x 6 policies (%d comparisons), oracle "
                  ">= policy always, strictly better in %d, %.0f s",
                  checked, strict, sw.sec())
            : why);
  return ok;
}

// ---------------------------------------------------------------------------
// 11. Inference latency: mean wall-clock per joint action selection of the
//     policy network (J=6 rooms, K=8 classes) below 5 ms.  Latency depends on
//     architecture, not weights, so a fresh network of the trained dimensions
//     is representative.
struct TimedMarl final : StepPolicy {
  MarlStepPolicy inner;
  double total_ms = 0.0;
  long calls = 0;
  TimedMarl(const ActorCritic& ac, const SimConfig& cfg) : inner(ac, cfg, /*greedy=*/true) {}
  JointAction decide(const GlobalState& state, const Roster& roster,
                     const SimConfig& cfg) override {
    const auto t0 = std::chrono::steady_clock::now();
    const JointAction a = inner.decide(state, roster, cfg);
    total_ms +=
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    ++calls;
    return a;
  }
  std::string name() const override { return "timed_marl"; }
};

bool criterion11() {
  Stopwatch sw;
  const Encoder enc(dcfg());
  const ActorCritic ac(enc.dim(), enc.num_actions(), dcfg().ppo, 7);
  TimedMarl pol(ac, dcfg());
  for (int i = 0; i < 20; ++i)
    run_episode(dcfg(), dplan(), derive_seed(0xE11u, static_cast<std::uint64_t>(i)), pol);
  const double mean_ms = pol.total_ms / std::max(1L, pol.calls);
  const bool ok = pol.calls > 0 && mean_ms < 5.0;
  report(11, ok,
         fmt("inference latency: %.4f ms mean per joint action over %ld epochs (bound 5 "
             "ms), %.1f s",
             mean_ms, pol.calls, sw.sec()));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> filter;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 11) {
      std::fprintf(stderr, "usage: %s [criterion numbers 1..11]\n", argv[0]);
      return 1;
    }
    filter.insert(n);
  }
  // Criterion 6 (the training run) goes last so the quick results land first.
  const int order[] = {1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 6};
  bool (*fns[])() = {nullptr,    criterion1, criterion2, criterion3,
                     criterion4, criterion5, criterion6, criterion7,
                     criterion8, criterion9, criterion10, criterion11};
  int passed = 0, attempted = 0;
  for (const int n : order) {
    if (!filter.empty() && !filter.count(n)) continue;
    ++attempted;
    bool ok = false;
    try {
      ok = fns[n]();
    } catch (const std::exception& e) {
      report(n, false, fmt("exception: %s", e.what()));
    }
    if (ok) ++passed;
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, attempted);
  return passed == attempted ? 0 : 1;
}
