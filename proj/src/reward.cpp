#include "orlab/reward.hpp"

#include <algorithm>

namespace orlab {

int waiting_time(const Patient& p, int start) {
  if (p.elective()) return std::max(start - *p.reference_slot, 0);
  return start - p.arrival_slot;
}

double immediate_reward(const SurgeryClass& cls, int wait) {
  return cls.utility - cls.delay_coeff * static_cast<double>(wait) * static_cast<double>(wait);
}

double overtime(const std::vector<int>& last_finish, int horizon) {
  double total = 0.0;
  for (int f : last_finish) total += std::max(f - horizon, 0);
  return total;
}

double terminal_reward(double overtime_total, double overtime_cost) {
  return -overtime_cost * overtime_total;
}

DayOutcome day_reward(const std::vector<ServedCase>& served,
                      const std::vector<int>& last_finish, const SimConfig& cfg) {
  DayOutcome out;
  out.credits.reserve(served.size());
  for (const ServedCase& sc : served) {
    const SurgeryClass& cls = cfg.cls(sc.class_id);
    Patient p;
    p.id = sc.patient_id;
    p.class_id = sc.class_id;
    p.arrival_slot = sc.arrival;
    p.reference_slot = sc.reference;
    const int w = waiting_time(p, sc.start);
    PatientCredit credit;
    credit.patient_id = sc.patient_id;
    credit.wait = w;
    credit.utility = cls.utility;
    credit.penalty = cls.delay_coeff * static_cast<double>(w) * static_cast<double>(w);
    out.revenue += credit.utility;
    out.waiting_penalty += credit.penalty;
    out.credits.push_back(credit);
  }
  out.overtime_slots = overtime(last_finish, cfg.horizon);
  out.day_reward = out.revenue - out.waiting_penalty - cfg.overtime_cost * out.overtime_slots;
  return out;
}

}  // namespace orlab
