#include "orlab/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "orlab/rng.hpp"

namespace orlab {

namespace {
// Fixed stream indices so adding a purpose never shifts another purpose's
// draws (common-random-numbers discipline).
constexpr std::uint64_t kStreamArrivals = 1;
constexpr std::uint64_t kStreamDurations = 2;
constexpr std::uint64_t kStreamEmergency = 3;
}  // namespace

Roster make_roster(const SimConfig& cfg, const PreSchedule& plan, std::uint64_t seed) {
  Roster roster;
  roster.seed = seed;
  roster.arrivals_by_slot.assign(static_cast<std::size_t>(cfg.horizon), {});

  // Electives: deterministic roster, reference slots and rooms from the plan.
  roster.patients = build_electives(cfg);
  for (Patient& p : roster.patients) {
    const PlanEntry& e = plan.entries[static_cast<std::size_t>(p.id)];
    p.reference_slot = e.tau;
    p.planned_or = e.room;
  }

  // Urgent arrivals: per-slot Poisson, class uniform over urgent types.
  std::vector<int> urgent_classes;
  for (const SurgeryClass& sc : cfg.classes)
    if (sc.category == Category::Urgent) urgent_classes.push_back(sc.id);
  Rng arr(derive_seed(seed, kStreamArrivals));
  if (!urgent_classes.empty() && cfg.urgent_rate > 0.0) {
    for (int t = 0; t < cfg.horizon; ++t) {
      const int n = arr.poisson(cfg.urgent_rate);
      for (int i = 0; i < n; ++i) {
        Patient p;
        p.id = static_cast<int>(roster.patients.size());
        p.class_id = urgent_classes[arr.uniform_int(urgent_classes.size())];
        p.arrival_slot = t;
        roster.patients.push_back(p);
        roster.arrivals_by_slot[static_cast<std::size_t>(t)].push_back(p.id);
      }
    }
  }

  // Emergency: at most one batch per day; scanning slot hazards reproduces
  // the configured day-level probability exactly.
  std::vector<int> emergency_classes;
  for (const SurgeryClass& sc : cfg.classes)
    if (sc.category == Category::Emergency) emergency_classes.push_back(sc.id);
  Rng emer(derive_seed(seed, kStreamEmergency));
  if (!emergency_classes.empty() && cfg.emergency_batch > 0) {
    const double hazard = cfg.emergency_slot_hazard();
    for (int t = 0; t < cfg.horizon; ++t) {
      if (!emer.bernoulli(hazard)) continue;
      roster.emergency_fired = true;
      roster.emergency_slot = t;
      for (int i = 0; i < cfg.emergency_batch; ++i) {
        Patient p;
        p.id = static_cast<int>(roster.patients.size());
        p.class_id = emergency_classes[emer.uniform_int(emergency_classes.size())];
        p.arrival_slot = t;
        roster.patients.push_back(p);
        roster.arrivals_by_slot[static_cast<std::size_t>(t)].push_back(p.id);
      }
      break;
    }
  }

  // Durations last, in patient-id order: policy-independent and stable under
  // the arrival draws above.
  Rng dur(derive_seed(seed, kStreamDurations));
  for (Patient& p : roster.patients) {
    const SurgeryClass& sc = cfg.cls(p.class_id);
    p.duration_raw = dur.gamma(sc.gamma_shape, sc.gamma_scale);
    p.duration_slots = std::max(1, static_cast<int>(std::ceil(p.duration_raw)));
    roster.raw_workload += p.duration_raw;
  }
  return roster;
}

Episode::Episode(const SimConfig& cfg, const PreSchedule& plan, std::uint64_t seed)
    : Episode(cfg, make_roster(cfg, plan, seed)) {}

Episode::Episode(const SimConfig& cfg, Roster roster) : cfg_(&cfg), roster_(std::move(roster)) {
  state_.clock = 0;
  state_.queues.assign(static_cast<std::size_t>(cfg.num_classes()), {});
  state_.ors.assign(static_cast<std::size_t>(cfg.num_ors), ORStatus{});
  outcomes_.assign(roster_.patients.size(), Outcome{});
  team_rewards_.reserve(static_cast<std::size_t>(cfg.horizon));

  // Electives are known pre-day: queue them first, ordered by reference slot
  // (then id) so each elective queue's head is its earliest planned case.
  std::vector<int> electives;
  for (const Patient& p : roster_.patients)
    if (p.elective()) electives.push_back(p.id);
  std::sort(electives.begin(), electives.end(), [&](int a, int b) {
    const Patient& pa = roster_.patient(a);
    const Patient& pb = roster_.patient(b);
    if (*pa.reference_slot != *pb.reference_slot) return *pa.reference_slot < *pb.reference_slot;
    return a < b;
  });
  for (int id : electives)
    state_.queues[static_cast<std::size_t>(roster_.patient(id).class_id - 1)].push_back(id);
  admit(0);
}

void Episode::admit(int slot) {
  if (slot < 0 || slot >= static_cast<int>(roster_.arrivals_by_slot.size())) return;
  for (int id : roster_.arrivals_by_slot[static_cast<std::size_t>(slot)]) {
    const Patient& p = roster_.patient(id);
    if (p.elective()) continue;  // electives queued at reset
    state_.queues[static_cast<std::size_t>(p.class_id - 1)].push_back(id);
  }
}

void Episode::settle() {
  for (ORStatus& o : state_.ors) {
    if (o.current_patient != -1 && o.busy_until <= state_.clock) {
      o.last_finish = std::max(o.last_finish, o.busy_until);
      o.current_patient = -1;
    }
  }
}

StepResult Episode::step(const JointAction& action) {
  if (done()) throw ProtocolError("step after end of day");
  if (static_cast<int>(action.size()) != cfg_->num_ors)
    throw ProtocolError("joint action size mismatch");
  StepResult res;
  res.agent_rewards.assign(static_cast<std::size_t>(cfg_->num_ors), 0.0);
  for (int j = 0; j < cfg_->num_ors; ++j) {
    const int a = action[static_cast<std::size_t>(j)];
    if (a == 0) continue;
    if (a < 1 || a > cfg_->num_classes())
      throw ProtocolError("action out of range on OR " + std::to_string(j));
    ORStatus& o = state_.ors[static_cast<std::size_t>(j)];
    if (o.busy(state_.clock))
      throw ProtocolError("busy OR " + std::to_string(j) + " received a start action");
    auto& queue = state_.queues[static_cast<std::size_t>(a - 1)];
    if (queue.empty())
      throw ProtocolError("start from empty queue " + std::to_string(a) + " on OR " +
                          std::to_string(j));
    const int pid = queue.front();
    queue.pop_front();
    const Patient& p = roster_.patient(pid);
    const int sigma = cfg_->setup.setup(o.last_class, p.class_id);
    const int eff = effective_duration(p.duration_slots, o.last_class, p.class_id, cfg_->setup);
    Outcome& oc = outcomes_[static_cast<std::size_t>(pid)];
    oc.start = state_.clock;
    oc.or_id = j;
    oc.setup = sigma;
    oc.finish = state_.clock + eff;
    o.busy_until = state_.clock + eff;
    o.last_class = p.class_id;
    o.current_patient = pid;
    o.current_start = state_.clock;
    o.current_setup = sigma;
    const double r = immediate_reward(cfg_->cls(p.class_id), waiting_time(p, state_.clock));
    res.agent_rewards[static_cast<std::size_t>(j)] = r;
    res.team_reward += r;
    res.started_patients.push_back(pid);
  }
  team_rewards_.push_back(res.team_reward);
  ++state_.clock;
  settle();
  if (state_.clock < cfg_->horizon) admit(state_.clock);
  return res;
}

void Episode::finalize() {
  if (!done()) throw ProtocolError("finalize before end of day");
  if (finalized_) return;
  for (ORStatus& o : state_.ors) {
    if (o.current_patient != -1) {  // runs to completion in overtime
      o.last_finish = std::max(o.last_finish, o.busy_until);
      o.current_patient = -1;
    }
  }
  std::vector<int> finishes;
  for (const ORStatus& o : state_.ors) finishes.push_back(o.last_finish);
  overtime_ = overtime(finishes, cfg_->horizon);
  terminal_ = terminal_reward(overtime_, cfg_->overtime_cost);
  finalized_ = true;
}

EpisodeRecord Episode::record(const std::string& policy_name) const {
  if (!finalized_) throw ProtocolError("record() before finalize()");
  EpisodeRecord rec;
  rec.seed = roster_.seed;
  rec.cfg_hash = config_hash(*cfg_);
  rec.policy = policy_name;
  rec.horizon = cfg_->horizon;
  rec.num_ors = cfg_->num_ors;
  rec.num_classes = cfg_->num_classes();
  rec.emergency_fired = roster_.emergency_fired;
  rec.emergency_slot = roster_.emergency_slot;
  for (const Patient& p : roster_.patients) {
    EpisodeRecord::Row row;
    row.id = p.id;
    row.class_id = p.class_id;
    row.arrival = p.arrival_slot;
    row.reference = p.reference_slot;
    row.duration = p.duration_slots;
    const Outcome& oc = outcomes_[static_cast<std::size_t>(p.id)];
    if (oc.start >= 0) {
      row.setup = oc.setup;
      row.start = oc.start;
      row.or_id = oc.or_id;
      row.finish = oc.finish;
    }
    rec.rows.push_back(row);
  }
  for (const ORStatus& o : state_.ors) rec.last_finish.push_back(o.last_finish);
  rec.team_rewards = team_rewards_;
  rec.terminal_reward = terminal_;
  double total = terminal_;
  for (double r : team_rewards_) total += r;
  rec.streamed_total = total;
  return rec;
}

DayOutcome record_day_outcome(const EpisodeRecord& rec, const SimConfig& cfg) {
  std::vector<ServedCase> served;
  for (const EpisodeRecord::Row& row : rec.rows) {
    if (!row.start) continue;
    ServedCase sc;
    sc.patient_id = row.id;
    sc.class_id = row.class_id;
    sc.arrival = row.arrival;
    sc.reference = row.reference;
    sc.start = *row.start;
    served.push_back(sc);
  }
  return day_reward(served, rec.last_finish, cfg);
}

std::string serialize_record(const EpisodeRecord& rec) {
  std::ostringstream out;
  out << "orlab-episode v1\n";
  out << "seed " << rec.seed << "\n";
  out << "config_hash " << std::hex << rec.cfg_hash << std::dec << "\n";
  out << "policy " << (rec.policy.empty() ? "-" : rec.policy) << "\n";
  out << "horizon " << rec.horizon << " num_ors " << rec.num_ors << " num_classes "
      << rec.num_classes << "\n";
  out << "emergency " << (rec.emergency_fired ? 1 : 0) << " slot " << rec.emergency_slot << "\n";
  out << "last_finish";
  for (int f : rec.last_finish) out << " " << f;
  out << "\n";
  out << "patients " << rec.rows.size() << "\n";
  auto opt = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  for (const EpisodeRecord::Row& r : rec.rows) {
    out << r.id << " " << r.class_id << " " << r.arrival << " " << opt(r.reference) << " "
        << r.duration << " " << r.setup << " " << opt(r.start) << " " << opt(r.or_id) << " "
        << opt(r.finish) << "\n";
  }
  return out.str();
}

EpisodeRecord parse_record(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (header != "orlab-episode v1") throw ProtocolError("unrecognized episode header: " + header);
  EpisodeRecord rec;
  std::string key;
  in >> key >> rec.seed;
  in >> key >> std::hex >> rec.cfg_hash >> std::dec;
  in >> key >> rec.policy;
  if (rec.policy == "-") rec.policy.clear();
  in >> key >> rec.horizon >> key >> rec.num_ors >> key >> rec.num_classes;
  int fired = 0;
  in >> key >> fired >> key >> rec.emergency_slot;
  rec.emergency_fired = fired != 0;
  in >> key;  // last_finish
  for (int j = 0; j < rec.num_ors; ++j) {
    int f = 0;
    in >> f;
    rec.last_finish.push_back(f);
  }
  std::size_t count = 0;
  in >> key >> count;
  auto opt_field = [&in]() -> std::optional<int> {
    std::string tok;
    in >> tok;
    if (tok == "-") return std::nullopt;
    return std::stoi(tok);
  };
  for (std::size_t i = 0; i < count; ++i) {
    EpisodeRecord::Row r;
    in >> r.id >> r.class_id >> r.arrival;
    r.reference = opt_field();
    in >> r.duration >> r.setup;
    r.start = opt_field();
    r.or_id = opt_field();
    r.finish = opt_field();
    if (!in) throw ProtocolError("truncated episode record");
    rec.rows.push_back(r);
  }
  return rec;
}

void write_record(const EpisodeRecord& rec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ProtocolError("cannot write episode record: " + path);
  out << serialize_record(rec);
}

EpisodeRecord read_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProtocolError("cannot open episode record: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_record(ss.str());
}

EpisodeRecord run_episode_on(Episode episode, StepPolicy& policy) {
  const SimConfig& cfg = episode.config();
  while (!episode.done()) {
    const JointAction a = policy.decide(episode.state(), episode.roster(), cfg);
    episode.step(a);
  }
  episode.finalize();
  policy.episode_end(episode.state(), episode.roster(), cfg);
  return episode.record(policy.name());
}

EpisodeRecord run_episode(const SimConfig& cfg, const PreSchedule& plan, std::uint64_t seed,
                          StepPolicy& policy) {
  return run_episode_on(Episode(cfg, plan, seed), policy);
}

}  // namespace orlab
