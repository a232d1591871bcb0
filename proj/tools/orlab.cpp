// orlab: single entry point for the operating-room scheduling lab.
//
// Subcommands: simulate, train, evaluate, compare, preschedule, oracle,
// theorycheck, gantt. Every run writes a manifest.json into its output
// directory (config hash, seed list, policies, version stamp, output file
// list); text outputs carry a `# manifest=<hash>` stamp so any file can be
// traced back to the run that produced it. Reruns with an equal manifest
// reproduce outputs bit-exactly.
//
// Exit codes: 0 ok, 1 usage, 2 invalid config/checkpoint/record, 3 runtime
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "orlab/analytics.hpp"
#include "orlab/domain.hpp"
#include "orlab/heuristics.hpp"
#include "orlab/marl/policy.hpp"
#include "orlab/marl/ppo.hpp"
#include "orlab/oracle.hpp"
#include "orlab/preschedule.hpp"
#include "orlab/rng.hpp"
#include "orlab/simenv.hpp"
#include "orlab/theorycheck.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace orlab;

#ifndef ORLAB_GIT_SHA
#define ORLAB_GIT_SHA "unknown"
#endif

namespace {

constexpr const char* kVersion = "orlab 0.1.0+" ORLAB_GIT_SHA;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Default output root is runs/<command>; the ORLAB_OUT environment variable
// overrides the root (an explicit --out always wins).
std::string default_out(const std::string& command) {
  const char* env = std::getenv("ORLAB_OUT");
  return (env ? std::string(env) : std::string("runs")) + "/" + command;
}

SimConfig load_cfg(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

std::vector<std::uint64_t> seeds_for(std::uint64_t base, int n) {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = derive_seed(base, static_cast<std::uint64_t>(i));
  return out;
}

// Manifest: hashed over its canonical dump (before the hash field itself is
// added), then written to outdir/manifest.json.
struct Manifest {
  json doc;
  std::uint64_t hash = 0;
};

Manifest write_manifest(json doc, const fs::path& outdir) {
  Manifest m;
  m.hash = fnv1a(doc.dump(2));
  doc["manifest_hash"] = hex64(m.hash);
  m.doc = std::move(doc);
  fs::create_directories(outdir);
  std::ofstream f(outdir / "manifest.json");
  if (!f) throw std::runtime_error("cannot write " + (outdir / "manifest.json").string());
  f << m.doc.dump(2) << "\n";
  return m;
}

json base_manifest(const std::string& command, const SimConfig& cfg,
                   const std::string& outdir) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["config_hash"] = hex64(config_hash(cfg));
  j["outdir"] = outdir;
  return j;
}

void write_stamped(const fs::path& path, const std::string& body, const Manifest& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# manifest=" << hex64(m.hash) << "\n" << body;
}

void write_svg(const fs::path& path, const std::string& body, const Manifest& m) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body << "<!-- manifest=" << hex64(m.hash) << " -->\n";
}

// Ordered parallel map: fn(i) for i in [0, n), any interleaving, results
// keyed by index so output order never depends on --jobs. First exception
// wins and is rethrown on the caller thread.
template <typename Fn>
void parallel_for(int n, int jobs, const Fn& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Checkpoint load_checkpoint_or_explain(const std::string& path, const SimConfig& cfg) {
  const std::string hint =
      "; train one first (orlab train --out runs/train) and pass --checkpoint "
      "runs/train/best.ckpt";
  if (path.empty()) throw ConfigError("no checkpoint given" + hint);
  if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path + hint);
  return load_checkpoint(path, cfg);
}

// Policies are the six heuristic names plus "marl" (needs a checkpoint).
std::unique_ptr<StepPolicy> make_policy(const std::string& name, const SimConfig& cfg,
                                        const Checkpoint* ckpt) {
  if (name == "marl") {
    if (!ckpt)
      throw ConfigError(
          "policy 'marl' needs --checkpoint; train one first (orlab train --out "
          "runs/train) and pass --checkpoint runs/train/best.ckpt");
    return std::make_unique<MarlStepPolicy>(ckpt->ac, cfg, /*greedy=*/true);
  }
  return std::make_unique<HeuristicPolicy>(heuristic_from_name(name), cfg);
}

// One policy over a seed list; optionally dumps per-day episode records.
std::vector<EpisodeMetrics> run_days(const SimConfig& cfg, const PreSchedule& plan,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& policy, const Checkpoint* ckpt,
                                     int jobs, const fs::path* record_dir) {
  std::vector<EpisodeMetrics> metrics(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), jobs, [&](int i) {
    const std::unique_ptr<StepPolicy> pol = make_policy(policy, cfg, ckpt);
    const EpisodeRecord rec =
        run_episode(cfg, plan, seeds[static_cast<std::size_t>(i)], *pol);
    metrics[static_cast<std::size_t>(i)] = compute_metrics(rec, cfg);
    if (record_dir) {
      char name[32];
      std::snprintf(name, sizeof name, "day_%04d.rec", i);
      write_record(rec, (*record_dir / name).string());
    }
  });
  return metrics;
}

double mean_cr(const std::vector<EpisodeMetrics>& eps) {
  double sum = 0.0;
  for (const EpisodeMetrics& e : eps) sum += e.cr();
  return eps.empty() ? 0.0 : sum / static_cast<double>(eps.size());
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& config_path, const std::string& policy, int days,
                 std::uint64_t seed, const std::string& out, int jobs,
                 const std::string& checkpoint, bool records) {
  const SimConfig cfg = load_cfg(config_path);
  const PreSchedule plan = build_preschedule(cfg);
  std::optional<Checkpoint> ckpt;
  if (policy == "marl") ckpt = load_checkpoint_or_explain(checkpoint, cfg);
  const std::vector<std::uint64_t> seeds = seeds_for(seed, days);

  json j = base_manifest("simulate", cfg, out);
  j["policies"] = {policy};
  j["base_seed"] = seed;
  j["seeds"] = seeds;
  j["days"] = days;
  j["outputs"] = {"results.csv"};
  if (records) {
    json outs = j["outputs"];
    outs.push_back("records/");
    j["outputs"] = outs;
  }
  const Manifest m = write_manifest(std::move(j), out);

  fs::path record_dir;
  if (records) {
    record_dir = fs::path(out) / "records";
    fs::create_directories(record_dir);
  }
  const std::vector<EpisodeMetrics> eps =
      run_days(cfg, plan, seeds, policy, ckpt ? &*ckpt : nullptr, jobs,
               records ? &record_dir : nullptr);
  write_stamped(fs::path(out) / "results.csv", results_csv(policy, eps), m);

  int emergencies = 0;
  double ot = 0.0;
  for (const EpisodeMetrics& e : eps) {
    emergencies += e.emergency_day ? 1 : 0;
    ot += e.overtime();
  }
  std::printf("simulate policy=%s days=%d base_seed=%llu\n", policy.c_str(), days,
              static_cast<unsigned long long>(seed));
  std::printf("  mean CR %.2f  mean overtime %.2f  emergency days %d/%d\n",
              mean_cr(eps), days > 0 ? ot / days : 0.0, emergencies, days);
  std::printf("  wrote %s/results.csv (%d rows), %s/manifest.json\n", out.c_str(), days,
              out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const std::string& config_path, std::uint64_t seed, int iterations,
              const std::string& out, bool quiet) {
  const SimConfig cfg = load_cfg(config_path);
  json j = base_manifest("train", cfg, out);
  j["base_seed"] = seed;
  j["seeds"] = {seed};
  j["policies"] = {"marl"};
  j["iterations"] = iterations > 0 ? iterations : cfg.ppo.iterations;
  j["outputs"] = {"best.ckpt", "last.ckpt", "curves.csv"};
  write_manifest(std::move(j), out);

  TrainOptions opt;
  opt.outdir = out;
  opt.seed = seed;
  opt.iterations_override = iterations;
  opt.log = quiet ? nullptr : &std::cout;
  const TrainResult res = train(cfg, opt);
  std::printf("train done: %d iterations, final train reward %.2f, best validation %.2f\n",
              res.iterations, res.final_train_reward, res.best_val_reward);
  std::printf("  best %s\n  last %s\n  curves %s\n", res.best_path.c_str(),
              res.last_path.c_str(), res.curves_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const std::string& config_path, const std::string& checkpoint, int days,
                 std::uint64_t seed, const std::string& out, int jobs) {
  const SimConfig cfg = load_cfg(config_path);
  const Checkpoint ckpt = load_checkpoint_or_explain(checkpoint, cfg);
  const PreSchedule plan = build_preschedule(cfg);
  const std::vector<std::uint64_t> seeds = seeds_for(seed, days);

  json j = base_manifest("evaluate", cfg, out);
  j["policies"] = {"marl"};
  j["checkpoint"] = checkpoint;
  j["checkpoint_iteration"] = ckpt.iteration;
  j["base_seed"] = seed;
  j["seeds"] = seeds;
  j["days"] = days;
  j["outputs"] = {"results.csv"};
  const Manifest m = write_manifest(std::move(j), out);

  const std::vector<EpisodeMetrics> eps =
      run_days(cfg, plan, seeds, "marl", &ckpt, jobs, nullptr);
  write_stamped(fs::path(out) / "results.csv", results_csv("marl", eps), m);
  std::printf("evaluate checkpoint=%s (iteration %d) days=%d\n", checkpoint.c_str(),
              ckpt.iteration, days);
  std::printf("  mean CR %.2f\n  wrote %s/results.csv\n", mean_cr(eps), out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// compare

int cmd_compare(const std::string& config_path, std::vector<std::string> policies,
                const std::string& checkpoint, int days, std::uint64_t seed,
                const std::string& out, int jobs) {
  const SimConfig cfg = load_cfg(config_path);
  if (policies.empty()) {
    for (HeuristicKind k : all_heuristics()) policies.push_back(heuristic_name(k));
    if (!checkpoint.empty()) policies.push_back("marl");
  }
  std::optional<Checkpoint> ckpt;
  for (const std::string& p : policies)
    if (p == "marl") ckpt = load_checkpoint_or_explain(checkpoint, cfg);
  const PreSchedule plan = build_preschedule(cfg);
  const std::vector<std::uint64_t> seeds = seeds_for(seed, days);

  json j = base_manifest("compare", cfg, out);
  j["policies"] = policies;
  if (ckpt) j["checkpoint"] = checkpoint;
  j["base_seed"] = seed;
  j["seeds"] = seeds;
  j["days"] = days;
  json outs = json::array();
  for (const std::string& p : policies) outs.push_back("results_" + p + ".csv");
  outs.push_back("comparison.csv");
  outs.push_back("scores.csv");
  j["outputs"] = outs;
  const Manifest m = write_manifest(std::move(j), out);

  // Same seed list for every policy (common random numbers): flatten the
  // policy x day grid for the worker pool.
  const int P = static_cast<int>(policies.size());
  std::vector<std::vector<EpisodeMetrics>> eps(
      static_cast<std::size_t>(P), std::vector<EpisodeMetrics>(seeds.size()));
  parallel_for(P * days, jobs, [&](int idx) {
    const int p = idx / days, d = idx % days;
    const std::unique_ptr<StepPolicy> pol =
        make_policy(policies[static_cast<std::size_t>(p)], cfg, ckpt ? &*ckpt : nullptr);
    const EpisodeRecord rec =
        run_episode(cfg, plan, seeds[static_cast<std::size_t>(d)], *pol);
    eps[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)] =
        compute_metrics(rec, cfg);
  });

  std::vector<StratifiedMetrics> per_policy;
  for (int p = 0; p < P; ++p) {
    const std::string& name = policies[static_cast<std::size_t>(p)];
    write_stamped(fs::path(out) / ("results_" + name + ".csv"),
                  results_csv(name, eps[static_cast<std::size_t>(p)]), m);
    per_policy.push_back(stratify(name, eps[static_cast<std::size_t>(p)]));
  }
  write_stamped(fs::path(out) / "comparison.csv", comparison_csv(per_policy), m);
  write_stamped(fs::path(out) / "scores.csv", scores_csv(per_policy), m);

  std::vector<MetricsRow> all_rows;
  for (const StratifiedMetrics& s : per_policy) all_rows.push_back(s.all);
  const std::vector<ScoreRow> scores = normalize_scores(all_rows);
  std::printf("compare days=%d base_seed=%llu policies=%d\n", days,
              static_cast<unsigned long long>(seed), P);
  std::printf("  %-10s %12s %10s\n", "policy", "mean CR", "avg score");
  for (int p = 0; p < P; ++p)
    std::printf("  %-10s %12.2f %10.2f\n", policies[static_cast<std::size_t>(p)].c_str(),
                all_rows[static_cast<std::size_t>(p)].stats[6].mean,
                scores[static_cast<std::size_t>(p)].average);
  std::printf("  wrote %s/{comparison.csv,scores.csv,results_*.csv,manifest.json}\n",
              out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// preschedule

int cmd_preschedule(const std::string& config_path, const std::string& out,
                    int exact_threshold) {
  const SimConfig cfg = load_cfg(config_path);
  const PreSchedule plan = build_preschedule(cfg, exact_threshold);
  json j = base_manifest("preschedule", cfg, out);
  j["exact_threshold"] = exact_threshold;
  j["exact"] = plan.exact;
  j["objective"] = plan.objective;
  j["outputs"] = {"plan.txt"};
  write_manifest(std::move(j), out);
  write_plan(plan, cfg, (fs::path(out) / "plan.txt").string());
  std::printf("preschedule electives=%d rooms=%d objective=%.4f (%s)\n",
              cfg.total_electives(), cfg.num_ors, plan.objective,
              plan.exact ? "exact" : "list schedule + local search");
  std::printf("  wrote %s/plan.txt\n", out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

std::string single_day_report(const SimConfig& cfg, const EpisodeRecord& rec,
                              long budget, int exact_max, std::uint64_t seed) {
  const OracleInstance inst = OracleInstance::from_record(rec, cfg);
  const double policy_total = record_day_outcome(rec, cfg).day_reward;
  OracleResult res;
  std::string solver;
  if (static_cast<int>(inst.items.size()) <= exact_max) {
    res = budget > 0 ? solve_exact(inst, budget) : solve_exact(inst);
    solver = "exact";
  } else {
    res = solve_search(inst, schedule_from_record(rec), seed,
                       budget > 0 ? budget : 60000);
    solver = "annealing";
  }
  int served = 0;
  for (int s : res.eval.start)
    if (s >= 0) ++served;
  std::ostringstream outp;
  outp << "day seed=" << rec.seed << " policy=" << rec.policy
       << " cases=" << inst.items.size() << "\n";
  outp << "policy total  " << policy_total << "\n";
  outp << "oracle total  " << res.eval.total << " (" << solver << ", "
       << (res.optimal ? "optimal" : "incumbent") << ", nodes " << res.nodes << ")\n";
  outp << "gap           " << res.eval.total - policy_total << "\n";
  outp << "oracle served " << served << "  revenue " << res.eval.revenue
       << "  waiting penalty " << res.eval.waiting_penalty << "  overtime "
       << res.eval.overtime_slots << "\n";
  return outp.str();
}

int cmd_oracle(const std::string& config_path, const std::string& episode,
               const std::string& policy, int days, std::uint64_t seed, long budget,
               int exact_max, const std::string& out, int jobs) {
  const SimConfig cfg = load_cfg(config_path);
  json j = base_manifest("oracle", cfg, out);
  j["budget"] = budget;
  j["outputs"] = {"oracle_report.txt"};

  std::string report;
  if (!episode.empty()) {
    const EpisodeRecord rec = read_record(episode);
    if (rec.cfg_hash != config_hash(cfg))
      throw ConfigError("episode record " + episode +
                        " was produced under a different config (hash " +
                        hex64(rec.cfg_hash) + " vs " + hex64(config_hash(cfg)) +
                        "); pass the matching --config");
    j["episode"] = episode;
    j["seeds"] = {rec.seed};
    j["policies"] = {rec.policy};
    report = single_day_report(cfg, rec, budget, exact_max, seed);
  } else {
    const PreSchedule plan = build_preschedule(cfg);
    const std::vector<std::uint64_t> seeds = seeds_for(seed, days);
    j["policies"] = {policy};
    j["base_seed"] = seed;
    j["seeds"] = seeds;
    j["days"] = days;
    std::vector<OracleGapRow> rows(seeds.size());
    parallel_for(days, jobs, [&](int i) {
      const std::unique_ptr<StepPolicy> pol = make_policy(policy, cfg, nullptr);
      const EpisodeRecord rec =
          run_episode(cfg, plan, seeds[static_cast<std::size_t>(i)], *pol);
      const OracleInstance inst = OracleInstance::from_record(rec, cfg);
      const OracleResult res =
          solve_search(inst, schedule_from_record(rec),
                       derive_seed(seed, 0xF00Du + static_cast<std::uint64_t>(i)),
                       budget > 0 ? budget : 60000);
      OracleGapRow& row = rows[static_cast<std::size_t>(i)];
      row.day_seed = rec.seed;
      row.policy_total = record_day_outcome(rec, cfg).day_reward;
      row.oracle_total = res.eval.total;
      row.optimal = res.optimal;
    });
    report = format_gap_report(policy, rows);
  }
  const Manifest m = write_manifest(std::move(j), out);
  write_stamped(fs::path(out) / "oracle_report.txt", report, m);
  std::fputs(report.c_str(), stdout);
  std::printf("  wrote %s/oracle_report.txt\n", out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// theorycheck

int cmd_theorycheck(const std::string& config_path, int instances, std::uint64_t seed,
                    const std::string& out, int jobs) {
  load_cfg(config_path);  // validated if given; the instance families are
                          // self-contained tiny configs
  const SimConfig dummy = default_config();
  json j = base_manifest("theorycheck", dummy, out);
  j["instances"] = instances;
  j["base_seed"] = seed;
  j["outputs"] = {"theorycheck.txt"};
  const Manifest m = write_manifest(std::move(j), out);

  std::ostringstream ledger;
  bool all_pass = true;
  auto verdict = [&](bool ok, const std::string& line) {
    all_pass = all_pass && ok;
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", line.c_str());
    ledger << (ok ? "[PASS] " : "[FAIL] ") << line << "\n";
  };

  // Battery 1: sequential greedy == exhaustive joint maximum under a
  // separable one-step Q, on every epoch of every instance.
  {
    std::vector<WeakCouplingReport> reports(static_cast<std::size_t>(instances));
    parallel_for(instances, jobs, [&](int i) {
      const TinyInstance inst =
          gen_weak_coupling_instance(derive_seed(seed, static_cast<std::uint64_t>(i)));
      const ImmediateQ q;
      reports[static_cast<std::size_t>(i)] = check_weak_coupling(inst, q);
    });
    int ok_count = 0;
    long epochs = 0, joints = 0;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      const WeakCouplingReport& r = reports[static_cast<std::size_t>(i)];
      ok_count += r.all_equal() ? 1 : 0;
      epochs += r.epochs;
      joints += r.joint_actions_checked;
      worst = std::max(worst, r.max_gap);
      ledger << "weak_coupling seed=" << derive_seed(seed, static_cast<std::uint64_t>(i))
             << " epochs=" << r.epochs << " mismatched=" << r.mismatched_epochs
             << " max_gap=" << r.max_gap << "\n";
    }
    std::ostringstream line;
    line << "weak coupling: " << ok_count << "/" << instances << " instances ("
         << epochs << " epochs, " << joints << " joint actions, worst gap " << worst
         << ")";
    verdict(ok_count == instances, line.str());
  }

  // Battery 2: both regret inequalities against the exact oracle.
  {
    std::vector<RegretReport> reports(static_cast<std::size_t>(instances));
    parallel_for(instances, jobs, [&](int i) {
      const TinyInstance inst =
          gen_regret_instance(derive_seed(seed, 0xABCDu + static_cast<std::uint64_t>(i)));
      reports[static_cast<std::size_t>(i)] =
          check_regret_bounds(inst, HeuristicKind::NeLpt);
    });
    int ok_count = 0;
    for (int i = 0; i < instances; ++i) {
      const RegretReport& r = reports[static_cast<std::size_t>(i)];
      const bool ok = r.oracle_optimal && r.premise_ok && r.wait_ok && r.tbound_ok &&
                      r.monotone_ok && r.regret >= -1e-9;
      ok_count += ok ? 1 : 0;
      ledger << "regret i=" << i << " v_seq=" << r.v_seq << " v_opt=" << r.v_opt
             << " regret=" << r.regret << " wait_rhs=" << r.wait_rhs
             << " tbound_rhs=" << r.tbound_rhs << " premise=" << r.premise_ok
             << " wait_ok=" << r.wait_ok << " tbound_ok=" << r.tbound_ok
             << " monotone_ok=" << r.monotone_ok << " optimal=" << r.oracle_optimal
             << "\n";
    }
    std::ostringstream line;
    line << "regret bounds: " << ok_count << "/" << instances
         << " instances satisfy wait + linearized + monotone against the exact oracle";
    verdict(ok_count == instances, line.str());
  }

  // Battery 3: a room-dependent (changeover/overtime-aware) Q must break the
  // equivalence on the contention example, while the separable Q does not.
  {
    const TinyInstance inst = a4_violation_instance();
    const ImmediateQ sep;
    const OvertimeAwareQ coupled(2.0);
    const WeakCouplingReport r_sep = check_weak_coupling(inst, sep);
    const WeakCouplingReport r_cpl = check_weak_coupling(inst, coupled);
    std::ostringstream line;
    line << "room-coupled Q breaks equivalence: separable gap " << r_sep.max_gap
         << ", coupled mismatches " << r_cpl.mismatched_epochs << " (gap "
         << r_cpl.max_gap << ")";
    verdict(r_sep.all_equal() && r_cpl.mismatched_epochs > 0, line.str());
    ledger << "a4_violation separable_gap=" << r_sep.max_gap
           << " coupled_mismatch=" << r_cpl.mismatched_epochs
           << " coupled_gap=" << r_cpl.max_gap << "\n";
  }

  // Battery 4: the quadratic wait-channel bound holds even where the
  // linearized bound provably fails (optimum delays a patient longer than
  // the dispatch run does).
  {
    const TinyInstance inst = premise_violation_instance();
    const RegretReport r = check_regret_bounds(inst, HeuristicKind::NeLpt);
    std::ostringstream line;
    line << "premise violation: wait bound " << (r.wait_ok ? "holds" : "breaks")
         << " (regret " << r.regret << " vs rhs " << r.wait_rhs
         << "), linearized rhs " << r.tbound_rhs << " "
         << (r.tbound_ok ? "unexpectedly holds" : "fails as expected");
    verdict(r.wait_ok && !r.tbound_ok && !r.premise_ok, line.str());
    ledger << "premise_violation regret=" << r.regret << " wait_rhs=" << r.wait_rhs
           << " tbound_rhs=" << r.tbound_rhs << "\n";
  }

  // Battery 5: the single-blocked-urgent construction achieves its
  // delta^2 gap bound with equality.
  {
    const int grid[][3] = {{1, 3, 1}, {2, 5, 2}, {3, 5, 2}, {2, 7, 1}, {1, 4, 3}};
    int ok_count = 0;
    for (const auto& g : grid) {
      const SingleUrgentGapReport r = single_urgent_gap(g[0], g[1], g[2]);
      ok_count += r.ok ? 1 : 0;
      ledger << "single_urgent tbar=" << g[0] << " blocker=" << g[1]
             << " urgent=" << g[2] << " delta=" << r.delta_slots << " gap=" << r.gap
             << " bound=" << r.bound << "\n";
    }
    std::ostringstream line;
    line << "single-urgent gap construction: " << ok_count << "/5 meet the "
         << "quadratic bound with equality";
    verdict(ok_count == 5, line.str());
  }

  write_stamped(fs::path(out) / "theorycheck.txt", ledger.str(), m);
  std::printf("theorycheck: %s (ledger: %s/theorycheck.txt)\n",
              all_pass ? "ALL PASS" : "FAILURES", out.c_str());
  return all_pass ? 0 : 3;
}

// ---------------------------------------------------------------------------
// gantt

int cmd_gantt(const std::string& config_path, const std::string& episode,
              const std::string& policy, std::uint64_t seed,
              const std::string& checkpoint, const std::string& out) {
  const SimConfig cfg = load_cfg(config_path);
  EpisodeRecord rec;
  json j = base_manifest("gantt", cfg, out);
  if (!episode.empty()) {
    rec = read_record(episode);
    if (rec.cfg_hash != config_hash(cfg))
      throw ConfigError("episode record " + episode +
                        " was produced under a different config (hash " +
                        hex64(rec.cfg_hash) + " vs " + hex64(config_hash(cfg)) +
                        "); pass the matching --config");
    j["episode"] = episode;
  } else {
    std::optional<Checkpoint> ckpt;
    if (policy == "marl") ckpt = load_checkpoint_or_explain(checkpoint, cfg);
    const PreSchedule plan = build_preschedule(cfg);
    const std::unique_ptr<StepPolicy> pol =
        make_policy(policy, cfg, ckpt ? &*ckpt : nullptr);
    rec = run_episode(cfg, plan, seed, *pol);
  }
  j["seeds"] = {rec.seed};
  j["policies"] = {rec.policy};
  j["outputs"] = {"gantt.svg", "timeline.txt"};
  const Manifest m = write_manifest(std::move(j), out);
  write_svg(fs::path(out) / "gantt.svg", gantt_svg(rec, cfg), m);
  write_stamped(fs::path(out) / "timeline.txt", gantt_timeline(rec, cfg), m);
  int served = 0;
  for (const auto& row : rec.rows)
    if (row.start) ++served;
  std::printf("gantt policy=%s seed=%llu served=%d/%zu emergency=%s\n",
              rec.policy.c_str(), static_cast<unsigned long long>(rec.seed), served,
              rec.rows.size(),
              rec.emergency_fired ? std::to_string(rec.emergency_slot).c_str() : "none");
  std::printf("  wrote %s/gantt.svg and %s/timeline.txt\n", out.c_str(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operating-room intraday scheduling lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // Shared option storage; each subcommand binds the flags it uses.
  std::string config_path, out, policy, checkpoint, episode;
  std::vector<std::string> policies;
  std::uint64_t seed = 1;
  int days = 100, jobs = 1, iterations = 0, exact_threshold = 12, exact_max = 10,
      instances = 200;
  long budget = 0;
  bool records = false, quiet = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config JSON (defaults built in)");
    cmd->add_option("--out", out,
                    "output directory (default runs/<command>; ORLAB_OUT overrides "
                    "the root)");
    cmd->add_option("--seed", seed, "base seed; episode i uses a derived child seed");
  };

  CLI::App* sim = app.add_subcommand("simulate", "run one policy over many days");
  add_common(sim);
  sim->add_option("--policy", policy, "spt_u|lpt_u|ne_lpt|e_lpt|ne_spt|presched|marl")
      ->required();
  sim->add_option("--days", days, "number of day-episodes");
  sim->add_option("--jobs", jobs, "parallel workers (output order is unaffected)");
  sim->add_option("--checkpoint", checkpoint, "required when --policy marl");
  sim->add_flag("--records", records, "also dump one .rec file per day");

  CLI::App* tr = app.add_subcommand("train", "PPO training run");
  add_common(tr);
  tr->add_option("--iterations", iterations, "override the config's iteration count");
  tr->add_flag("--quiet", quiet, "suppress per-iteration progress lines");

  CLI::App* ev = app.add_subcommand("evaluate", "greedy rollout of a trained checkpoint");
  add_common(ev);
  ev->add_option("--checkpoint", checkpoint, "checkpoint file (best.ckpt)")->required();
  ev->add_option("--days", days, "number of day-episodes");
  ev->add_option("--jobs", jobs, "parallel workers");

  CLI::App* cp = app.add_subcommand(
      "compare", "paired comparison of policies on a common seed set");
  add_common(cp);
  cp->add_option("--policies", policies,
                 "comma list (default: all heuristics, plus marl when --checkpoint "
                 "given)")
      ->delimiter(',');
  cp->add_option("--checkpoint", checkpoint, "include the trained policy");
  cp->add_option("--days", days, "paired days per policy");
  cp->add_option("--jobs", jobs, "parallel workers");

  CLI::App* ps = app.add_subcommand("preschedule", "build the pre-day elective plan");
  add_common(ps);
  ps->add_option("--exact-threshold", exact_threshold,
                 "exhaustive search up to this many electives");

  CLI::App* orc = app.add_subcommand(
      "oracle", "ex-post full-information bound for finished days");
  add_common(orc);
  orc->add_option("--episode", episode, "episode .rec file to bound");
  orc->add_option("--policy", policy, "or: run this policy for --days and bound each");
  orc->add_option("--days", days, "days in batch mode");
  orc->add_option("--budget", budget,
                  "annealing iterations (search) or node budget (exact); 0 = default");
  orc->add_option("--exact-max", exact_max,
                  "use the exact solver up to this many cases");
  orc->add_option("--jobs", jobs, "parallel workers in batch mode");

  CLI::App* tc = app.add_subcommand(
      "theorycheck", "epoch-equivalence and regret-bound batteries");
  add_common(tc);
  tc->add_option("--instances", instances, "instances per battery");
  tc->add_option("--jobs", jobs, "parallel workers");

  CLI::App* gt = app.add_subcommand("gantt", "render one day as SVG + timeline");
  add_common(gt);
  gt->add_option("--episode", episode, "episode .rec file to render");
  gt->add_option("--policy", policy, "or: simulate one day with this policy");
  gt->add_option("--checkpoint", checkpoint, "required when --policy marl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (out.empty()) out = default_out(cmd);

  try {
    if (cmd == "simulate")
      return cmd_simulate(config_path, policy, days, seed, out, jobs, checkpoint,
                          records);
    if (cmd == "train") return cmd_train(config_path, seed, iterations, out, quiet);
    if (cmd == "evaluate")
      return cmd_evaluate(config_path, checkpoint, days, seed, out, jobs);
    if (cmd == "compare")
      return cmd_compare(config_path, policies, checkpoint, days, seed, out, jobs);
    if (cmd == "preschedule") return cmd_preschedule(config_path, out, exact_threshold);
    if (cmd == "oracle") {
      if (episode.empty() == policy.empty()) {
        std::fprintf(stderr, "oracle: pass exactly one of --episode or --policy\n");
        return 1;
      }
      return cmd_oracle(config_path, episode, policy, days, seed, budget, exact_max,
                        out, jobs);
    }
    if (cmd == "theorycheck")
      return cmd_theorycheck(config_path, instances, seed, out, jobs);
    if (cmd == "gantt") {
      if (episode.empty() == policy.empty()) {
        std::fprintf(stderr, "gantt: pass exactly one of --episode or --policy\n");
        return 1;
      }
      return cmd_gantt(config_path, episode, policy, seed, checkpoint, out);
    }
    std::fprintf(stderr, "unknown subcommand %s\n", cmd.c_str());
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
