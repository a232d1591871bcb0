#pragma once
// The scalar objective: utility credited at case start minus a quadratic
// waiting penalty, plus a terminal overtime penalty at day end. Exposed both
// as per-event pieces (streamed during simulation) and as a batch
// recomputation from a finished schedule; the two must agree to 1e-9.

#include <optional>
#include <vector>

#include "orlab/domain.hpp"

namespace orlab {

// Waiting time entering the penalty when a case starts at `start`:
// electives wait relative to their planned slot (early starts are free),
// non-electives relative to arrival.
int waiting_time(const Patient& p, int start);

// u_k - c_k * wait^2, credited once at the start slot. Idle rooms earn 0.
double immediate_reward(const SurgeryClass& cls, int wait);

// Sum of per-room spill past the regular horizon.
double overtime(const std::vector<int>& last_finish, int horizon);

double terminal_reward(double overtime_total, double overtime_cost);

struct PatientCredit {
  int patient_id = 0;
  int wait = 0;
  double utility = 0.0;
  double penalty = 0.0;  // c_k * wait^2
};

struct DayOutcome {
  std::vector<PatientCredit> credits;  // served patients, in start order
  double revenue = 0.0;                // sum of utilities
  double waiting_penalty = 0.0;
  double overtime_slots = 0.0;
  double day_reward = 0.0;  // revenue - waiting_penalty - C_o * overtime
};

// One served case as the batch path sees it.
struct ServedCase {
  int patient_id = 0;
  int class_id = 0;
  int arrival = 0;
  std::optional<int> reference;
  int start = 0;
};

// Recompute the day reward from a finished schedule, independent of the
// streamed accumulation.
DayOutcome day_reward(const std::vector<ServedCase>& served,
                      const std::vector<int>& last_finish, const SimConfig& cfg);

}  // namespace orlab
