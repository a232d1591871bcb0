#pragma once
// Ex-post full-information benchmark: once a day is over, all arrivals and
// realized durations are known, so "what was the best possible day?" becomes
// a deterministic single-day scheduling problem. A schedule here is an
// ordered case sequence per room (plus an implicit unserved set); timing is
// always earliest-start (each case starts at max(previous finish, arrival)),
// which is optimal for a fixed order because every reward term is monotone
// non-increasing in start times. Solvers:
//   solve_exact  - branch and bound over sequences (room by room, serve-or-
//                  skip, first-id symmetry breaking between fresh rooms,
//                  remaining-utility upper bound); for tiny instances.
//   solve_search - simulated annealing seeded from a dispatch heuristic's
//                  ex-post schedule; reports the monotone best-so-far, so
//                  its value only improves on the seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orlab/domain.hpp"
#include "orlab/simenv.hpp"

namespace orlab {

struct OracleItem {
  int id = 0;
  int class_id = 0;
  int arrival = 0;                  // earliest feasible start
  std::optional<int> reference;     // electives: waiting measured from this
  int duration = 1;                 // realized, known ex post
};

struct OracleInstance {
  int horizon = 0;
  int num_ors = 0;
  const SimConfig* cfg = nullptr;
  std::vector<OracleItem> items;    // position == patient id

  static OracleInstance from_roster(const Roster& roster, const SimConfig& cfg);
  static OracleInstance from_record(const EpisodeRecord& rec, const SimConfig& cfg);
};

struct OracleSchedule {
  std::vector<std::vector<int>> rooms;  // patient ids in service order
};

struct OracleEval {
  bool feasible = true;       // all starts within [arrival, horizon-1]
  double total = 0.0;
  double revenue = 0.0;
  double waiting_penalty = 0.0;
  double overtime_slots = 0.0;
  std::vector<int> start;     // per patient id; -1 when unserved
  std::vector<int> room_of;   // per patient id; -1 when unserved
};

// Earliest-start timing + reward arithmetic for a schedule. Infeasible
// schedules (a start past horizon-1) come back feasible=false with total
// = -infinity stand-in semantics left to the caller.
OracleEval evaluate_schedule(const OracleInstance& inst, const OracleSchedule& sched);

// The same total, routed through the simulator's batch reward path; the two
// must agree to 1e-9 on feasible schedules (cross-check used in tests).
double evaluate_via_reward_module(const OracleInstance& inst, const OracleSchedule& sched);

// A finished episode's schedule, for seeding the search or re-timing.
OracleSchedule schedule_from_record(const EpisodeRecord& rec);

struct OracleResult {
  OracleSchedule schedule;
  OracleEval eval;
  bool optimal = false;   // exact solver finished within its node budget
  long nodes = 0;         // branch-and-bound nodes / annealing iterations
};

// Exact branch and bound; intended for instances with <= ~10 cases. If the
// node budget trips, the incumbent is returned with optimal=false.
OracleResult solve_exact(const OracleInstance& inst, long node_budget = 200000000);

// Annealing from the given seed schedule (typically a heuristic's ex-post
// schedule). Deterministic in `seed`.
OracleResult solve_search(const OracleInstance& inst, const OracleSchedule& warm,
                          std::uint64_t seed, long iterations = 60000);

// Human-readable gap report for a batch of days (one line per day plus a
// summary), written by the CLI's oracle command.
struct OracleGapRow {
  std::uint64_t day_seed = 0;
  double policy_total = 0.0;
  double oracle_total = 0.0;
  bool optimal = false;
};
std::string format_gap_report(const std::string& policy, const std::vector<OracleGapRow>& rows);

}  // namespace orlab
