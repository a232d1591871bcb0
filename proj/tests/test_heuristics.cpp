#include <doctest.h>

#include "orlab/heuristics.hpp"

using namespace orlab;

namespace {

const SimConfig& cfg() {
  static const SimConfig c = default_config();
  return c;
}
const PreSchedule& plan() {
  static const PreSchedule p = build_preschedule(cfg());
  return p;
}

Roster manual_roster(const SimConfig& c, std::vector<Patient> patients) {
  Roster r;
  r.arrivals_by_slot.assign(static_cast<std::size_t>(c.horizon), {});
  for (Patient& p : patients) {
    p.id = static_cast<int>(r.patients.size());
    r.patients.push_back(p);
    if (!p.elective())
      r.arrivals_by_slot[static_cast<std::size_t>(p.arrival_slot)].push_back(p.id);
  }
  return r;
}

Patient pat(int class_id, int arrival, std::optional<int> tau, int dur,
            std::optional<int> room = std::nullopt) {
  Patient p;
  p.class_id = class_id;
  p.arrival_slot = arrival;
  p.reference_slot = tau;
  p.planned_or = room;
  p.duration_slots = dur;
  p.duration_raw = dur;
  return p;
}

}  // namespace

TEST_CASE("class rankings are the frozen lexicographic orders") {
  CHECK(heuristic_rank(cfg(), HeuristicKind::SptU) == std::vector<int>{5, 1, 6, 2, 7, 3, 8, 4});
  CHECK(heuristic_rank(cfg(), HeuristicKind::LptU) == std::vector<int>{8, 4, 7, 3, 6, 2, 5, 1});
  CHECK(heuristic_rank(cfg(), HeuristicKind::NeLpt) == std::vector<int>{8, 7, 6, 5, 4, 3, 2, 1});
  CHECK(heuristic_rank(cfg(), HeuristicKind::NeSpt) == std::vector<int>{5, 6, 7, 8, 1, 2, 3, 4});
  CHECK(heuristic_rank(cfg(), HeuristicKind::ELpt) == std::vector<int>{4, 3, 2, 1, 8, 7, 6, 5});
}

TEST_CASE("policy names round-trip") {
  for (HeuristicKind k : all_heuristics())
    CHECK(heuristic_from_name(heuristic_name(k)) == k);
  CHECK_THROWS_AS(heuristic_from_name("nope"), ConfigError);
}

TEST_CASE("shortest-first prefers the urgent minor over the urgent long") {
  SimConfig c = cfg();
  c.num_ors = 1;
  Episode ep(c, manual_roster(c, {pat(7, 0, std::nullopt, 24), pat(5, 0, std::nullopt, 4)}));
  HeuristicPolicy pol(HeuristicKind::SptU, c);
  const JointAction a = pol.decide(ep.state(), ep.roster(), c);
  CHECK(a == JointAction{5});
}

TEST_CASE("sequential assignment is conflict-free under contention") {
  SimConfig c = cfg();
  c.num_ors = 3;
  // One emergency, one urgent long: rooms pick in id order without clashing.
  Episode ep(c, manual_roster(c, {pat(8, 0, std::nullopt, 30), pat(7, 0, std::nullopt, 20)}));
  HeuristicPolicy pol(HeuristicKind::NeLpt, c);
  const JointAction a = pol.decide(ep.state(), ep.roster(), c);
  CHECK(a == JointAction{8, 7, 0});  // third room finds nothing left
  ep.step(a);  // must not throw
}

TEST_CASE("busy rooms are forced to pass") {
  SimConfig c = cfg();
  c.num_ors = 2;
  Episode ep(c, manual_roster(c, {pat(8, 0, std::nullopt, 30), pat(8, 0, std::nullopt, 30),
                                  pat(8, 1, std::nullopt, 30)}));
  HeuristicPolicy pol(HeuristicKind::NeLpt, c);
  ep.step(pol.decide(ep.state(), ep.roster(), c));  // both rooms start
  const JointAction a = pol.decide(ep.state(), ep.roster(), c);
  CHECK(a == JointAction{0, 0});  // both busy, third patient waits
}

TEST_CASE("group-precedence heuristics never start an elective past a waiting non-elective") {
  for (HeuristicKind kind : {HeuristicKind::NeLpt, HeuristicKind::NeSpt}) {
    HeuristicPolicy pol(kind, cfg());
    Episode ep(cfg(), plan(), 909);
    while (!ep.done()) {
      int ne_waiting = 0;
      for (const SurgeryClass& sc : cfg().classes)
        if (sc.category != Category::Elective)
          ne_waiting += static_cast<int>(ep.state().queues[static_cast<std::size_t>(sc.id - 1)].size());
      const JointAction a = pol.decide(ep.state(), ep.roster(), cfg());
      int ne_started = 0, e_started = 0;
      for (int v : a) {
        if (v == 0) continue;
        (cfg().cls(v).category == Category::Elective ? e_started : ne_started)++;
      }
      if (e_started > 0) CHECK(ne_started == ne_waiting);  // electives only after NEs exhausted
      ep.step(a);
    }
  }
}

TEST_CASE("plan follower reproduces the plan exactly when durations match expectations") {
  // Quiet day (no non-electives), realized durations pinned to the planning
  // means: every elective starts at its planned slot on its planned room.
  SimConfig c = cfg();
  c.urgent_rate = 0.0;
  c.emergency_day_prob = 0.0;
  const PreSchedule p = build_preschedule(c);
  std::vector<Patient> patients = build_electives(c);
  for (Patient& e : patients) {
    const PlanEntry& pe = p.entries[static_cast<std::size_t>(e.id)];
    e.reference_slot = pe.tau;
    e.planned_or = pe.room;
    e.duration_slots = planning_duration(c.cls(e.class_id));
    e.duration_raw = e.duration_slots;
  }
  Episode ep(c, manual_roster(c, patients));
  HeuristicPolicy pol(HeuristicKind::PreSched, c);
  const EpisodeRecord rec = run_episode_on(std::move(ep), pol);
  for (const auto& row : rec.rows) {
    REQUIRE(row.start.has_value());
    CHECK(*row.start == *row.reference);
    CHECK(*row.or_id == p.entries[static_cast<std::size_t>(row.id)].room);
  }
}

TEST_CASE("plan follower takes non-electives immediately when capacity is free") {
  SimConfig c = cfg();
  c.num_ors = 2;
  // One far-future elective and an urgent arriving at slot 2.
  Episode ep(c, manual_roster(c, {pat(1, 0, 50, 4, 0), pat(6, 2, std::nullopt, 9)}));
  HeuristicPolicy pol(HeuristicKind::PreSched, c);
  ep.step(pol.decide(ep.state(), ep.roster(), c));  // nothing due yet
  ep.step(pol.decide(ep.state(), ep.roster(), c));
  CHECK(ep.state().queues[5].size() == 1);
  const JointAction a = pol.decide(ep.state(), ep.roster(), c);
  CHECK(a[0] == 6);  // urgent starts the moment it arrives
  ep.step(a);
  const auto& rec_row = ep.roster().patient(1);
  CHECK(rec_row.class_id == 6);
}

TEST_CASE("plan follower does not start electives before their planned slot") {
  SimConfig c = cfg();
  c.num_ors = 1;
  Episode ep(c, manual_roster(c, {pat(1, 0, 10, 4, 0)}));
  HeuristicPolicy pol(HeuristicKind::PreSched, c);
  for (int t = 0; t < 10; ++t) {
    const JointAction a = pol.decide(ep.state(), ep.roster(), c);
    CHECK(a == JointAction{0});
    ep.step(a);
  }
  const JointAction a = pol.decide(ep.state(), ep.roster(), c);
  CHECK(a == JointAction{1});  // due now
}

TEST_CASE("due elective falls back to a free room when its own room is busy") {
  SimConfig c = cfg();
  c.num_ors = 2;
  // Room 0 is tied up by an emergency; the elective due at 3 (planned room 0)
  // must start on room 1 instead of waiting.
  Episode ep(c, manual_roster(c, {pat(8, 0, std::nullopt, 30), pat(1, 0, 3, 4, 0)}));
  HeuristicPolicy pol(HeuristicKind::PreSched, c);
  ep.step(pol.decide(ep.state(), ep.roster(), c));  // emergency onto room 0
  ep.step(pol.decide(ep.state(), ep.roster(), c));
  ep.step(pol.decide(ep.state(), ep.roster(), c));
  // clock == 3 now
  const JointAction a = pol.decide(ep.state(), ep.roster(), c);
  CHECK(a == JointAction{0, 1});
}
