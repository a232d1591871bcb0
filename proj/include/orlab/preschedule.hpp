#pragma once
// Pre-day plan for the elective roster: assigns every elective a room and a
// planned start slot before the day begins. Plans are built against expected
// durations (Gamma means rounded up) and scored by a surrogate objective:
//   sum_i c_k(i) * tau_i^2  +  C_o * sum_rooms [planned_end - T]^+
// i.e. plan late starts conservatively and avoid planned overtime. Rooms
// never idle inside a plan (delaying a planned start can only worsen both
// terms), so a plan is fully described by per-room case sequences.

#include <cstdint>
#include <string>
#include <vector>

#include "orlab/domain.hpp"

namespace orlab {

struct PlanEntry {
  int patient_id = 0;
  int class_id = 0;
  int tau = 0;   // planned start slot
  int room = 0;  // planned OR
};

struct PreSchedule {
  std::vector<PlanEntry> entries;              // indexed by elective patient id
  std::vector<std::vector<int>> room_sequences;  // patient ids in planned order
  double objective = 0.0;
  bool exact = false;  // true when produced by the exhaustive search
};

// The deterministic elective roster implied by the config: patient ids
// 0..N_e-1, grouped by duration class in config order. Reference slot and
// planned room are filled in by build_preschedule.
std::vector<Patient> build_electives(const SimConfig& cfg);

// Expected in-plan duration of a class: analytic Gamma mean rounded up.
int planning_duration(const SurgeryClass& cls);

// Surrogate objective of a candidate plan given as per-room sequences of
// elective patient ids (classes looked up via `electives`).
double plan_objective(const SimConfig& cfg, const std::vector<Patient>& electives,
                      const std::vector<std::vector<int>>& rooms);

// Build the pre-day plan. Exhaustive branch-and-bound for rosters of at most
// `exact_threshold` electives (default 12), otherwise longest-expected-first
// list scheduling refined by swap/relocate local search. Deterministic.
PreSchedule build_preschedule(const SimConfig& cfg, int exact_threshold = 12);

// Plan file round-trip (one elective per line: id class tau room).
void write_plan(const PreSchedule& plan, const SimConfig& cfg, const std::string& path);
PreSchedule read_plan(const std::string& path);

}  // namespace orlab
