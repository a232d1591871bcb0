#include "orlab/preschedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace orlab {

int planning_duration(const SurgeryClass& cls) {
  return std::max(1, static_cast<int>(std::ceil(cls.mean_duration() - 1e-9)));
}

std::vector<Patient> build_electives(const SimConfig& cfg) {
  std::vector<Patient> out;
  int id = 0;
  for (int dc = 0; dc < 4; ++dc) {
    const int count = cfg.elective_counts[static_cast<std::size_t>(dc)];
    if (count == 0) continue;
    int class_id = -1;
    for (const SurgeryClass& sc : cfg.classes)
      if (sc.category == Category::Elective && static_cast<int>(sc.duration_class) == dc) {
        class_id = sc.id;
        break;
      }
    for (int i = 0; i < count; ++i) {
      Patient p;
      p.id = id++;
      p.class_id = class_id;
      p.arrival_slot = 0;
      out.push_back(p);
    }
  }
  return out;
}

namespace {

struct RoomCursor {
  int time = 0;
  std::optional<int> last_class;
};

// Start slot and updated cursor when `class_id` is appended to `rc`.
int append_cost_start(const SimConfig& cfg, RoomCursor& rc, int class_id) {
  const int tau = rc.time;
  const int eff = effective_duration(planning_duration(cfg.cls(class_id)), rc.last_class,
                                     class_id, cfg.setup);
  rc.time = tau + eff;
  rc.last_class = class_id;
  return tau;
}

double sequences_objective(const SimConfig& cfg, const std::vector<Patient>& electives,
                           const std::vector<std::vector<int>>& rooms,
                           std::vector<int>* taus_out, std::vector<int>* rooms_out) {
  double obj = 0.0;
  for (std::size_t r = 0; r < rooms.size(); ++r) {
    RoomCursor rc;
    for (int pid : rooms[r]) {
      const Patient& p = electives[static_cast<std::size_t>(pid)];
      const int tau = append_cost_start(cfg, rc, p.class_id);
      obj += cfg.cls(p.class_id).delay_coeff * static_cast<double>(tau) * tau;
      if (taus_out) (*taus_out)[static_cast<std::size_t>(pid)] = tau;
      if (rooms_out) (*rooms_out)[static_cast<std::size_t>(pid)] = static_cast<int>(r);
    }
    obj += cfg.overtime_cost * std::max(rc.time - cfg.horizon, 0);
  }
  return obj;
}

// Longest-expected-first list scheduling: each case goes to the room where
// the objective increment is smallest (ties: lowest room id).
std::vector<std::vector<int>> list_schedule(const SimConfig& cfg,
                                            const std::vector<Patient>& electives) {
  std::vector<int> order(electives.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const int da = planning_duration(cfg.cls(electives[static_cast<std::size_t>(a)].class_id));
    const int db = planning_duration(cfg.cls(electives[static_cast<std::size_t>(b)].class_id));
    if (da != db) return da > db;
    return a < b;
  });
  std::vector<std::vector<int>> rooms(static_cast<std::size_t>(cfg.num_ors));
  std::vector<RoomCursor> cursors(static_cast<std::size_t>(cfg.num_ors));
  for (int pid : order) {
    const SurgeryClass& cls = cfg.cls(electives[static_cast<std::size_t>(pid)].class_id);
    int best_room = 0;
    double best_inc = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.num_ors; ++r) {
      RoomCursor rc = cursors[static_cast<std::size_t>(r)];
      const int before_ot = std::max(rc.time - cfg.horizon, 0);
      const int tau = rc.time;
      const int eff = effective_duration(planning_duration(cls), rc.last_class, cls.id, cfg.setup);
      const int after_ot = std::max(tau + eff - cfg.horizon, 0);
      const double inc = cls.delay_coeff * static_cast<double>(tau) * tau +
                         cfg.overtime_cost * (after_ot - before_ot);
      if (inc < best_inc - 1e-12) {
        best_inc = inc;
        best_room = r;
      }
    }
    append_cost_start(cfg, cursors[static_cast<std::size_t>(best_room)], cls.id);
    rooms[static_cast<std::size_t>(best_room)].push_back(pid);
  }
  return rooms;
}

// First-improvement local search over relocate and swap moves, fixed scan
// order, repeated until a full pass finds nothing (pass count capped).
void local_search(const SimConfig& cfg, const std::vector<Patient>& electives,
                  std::vector<std::vector<int>>& rooms) {
  double best = sequences_objective(cfg, electives, rooms, nullptr, nullptr);
  const int max_passes = 200;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    // Relocate: move rooms[r][i] to rooms[s][j].
    for (std::size_t r = 0; r < rooms.size() && !improved; ++r) {
      for (std::size_t i = 0; i < rooms[r].size() && !improved; ++i) {
        const int pid = rooms[r][static_cast<std::size_t>(i)];
        for (std::size_t s = 0; s < rooms.size() && !improved; ++s) {
          const std::size_t max_j = rooms[s].size() + (s == r ? 0 : 1);
          for (std::size_t j = 0; j < max_j && !improved; ++j) {
            if (s == r && j == i) continue;
            auto cand = rooms;
            cand[r].erase(cand[r].begin() + static_cast<std::ptrdiff_t>(i));
            std::size_t jj = j;
            if (s == r && j > i) jj = j - 1;
            if (jj > cand[s].size()) continue;
            cand[s].insert(cand[s].begin() + static_cast<std::ptrdiff_t>(jj), pid);
            const double v = sequences_objective(cfg, electives, cand, nullptr, nullptr);
            if (v < best - 1e-9) {
              rooms = cand;
              best = v;
              improved = true;
            }
          }
        }
      }
    }
    if (improved) continue;
    // Swap two patients across or within rooms.
    for (std::size_t r = 0; r < rooms.size() && !improved; ++r) {
      for (std::size_t i = 0; i < rooms[r].size() && !improved; ++i) {
        for (std::size_t s = r; s < rooms.size() && !improved; ++s) {
          for (std::size_t j = (s == r ? i + 1 : 0); j < rooms[s].size() && !improved; ++j) {
            auto cand = rooms;
            std::swap(cand[r][i], cand[s][j]);
            const double v = sequences_objective(cfg, electives, cand, nullptr, nullptr);
            if (v < best - 1e-9) {
              rooms = cand;
              best = v;
              improved = true;
            }
          }
        }
      }
    }
    if (!improved) break;
  }
}

struct ExactSearch {
  const SimConfig& cfg;
  const std::vector<Patient>& electives;
  std::vector<std::vector<int>> best_rooms;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> rooms;
  std::vector<bool> used;
  std::size_t n;

  ExactSearch(const SimConfig& c, const std::vector<Patient>& e) : cfg(c), electives(e) {
    n = electives.size();
    used.assign(n, false);
    rooms.assign(static_cast<std::size_t>(cfg.num_ors), {});
  }

  // Fill rooms left to right; within the open room append any unused patient
  // or close the room. Fresh rooms are interchangeable, so the first patient
  // id per room is forced to increase, and remaining cost is bounded below
  // by pricing every unused case at the open room's cursor or at zero.
  void dfs(std::size_t room, RoomCursor rc, double cost, int first_id_floor,
           std::size_t placed) {
    if (cost >= best - 1e-12) return;
    if (placed == n) {
      double total = cost + cfg.overtime_cost * std::max(rc.time - cfg.horizon, 0);
      for (std::size_t r = room + 1; r < rooms.size(); ++r) (void)r;  // later rooms empty
      if (total < best - 1e-12) {
        best = total;
        best_rooms = rooms;
      }
      return;
    }
    if (room >= rooms.size()) return;
    // Close the current room (pay its overtime) and open the next.
    {
      const double closed = cost + cfg.overtime_cost * std::max(rc.time - cfg.horizon, 0);
      const int floor = rooms[room].empty() ? first_id_floor
                                            : rooms[room].front() + 1;
      if (room + 1 < rooms.size() && !rooms[room].empty())
        dfs(room + 1, RoomCursor{}, closed, floor, placed);
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (used[p]) continue;
      if (rooms[room].empty() && static_cast<int>(p) < first_id_floor) continue;
      const SurgeryClass& cls = cfg.cls(electives[p].class_id);
      RoomCursor next = rc;
      const int tau = append_cost_start(cfg, next, cls.id);
      const double inc = cls.delay_coeff * static_cast<double>(tau) * tau;
      used[p] = true;
      rooms[room].push_back(static_cast<int>(p));
      dfs(room, next, cost + inc, first_id_floor, placed + 1);
      rooms[room].pop_back();
      used[p] = false;
    }
  }
};

}  // namespace

double plan_objective(const SimConfig& cfg, const std::vector<Patient>& electives,
                      const std::vector<std::vector<int>>& rooms) {
  return sequences_objective(cfg, electives, rooms, nullptr, nullptr);
}

PreSchedule build_preschedule(const SimConfig& cfg, int exact_threshold) {
  const std::vector<Patient> electives = build_electives(cfg);
  PreSchedule plan;
  std::vector<std::vector<int>> rooms;
  if (static_cast<int>(electives.size()) <= exact_threshold) {
    ExactSearch search(cfg, electives);
    // Warm-start incumbent from the heuristic path so the DFS prunes early.
    auto warm = list_schedule(cfg, electives);
    local_search(cfg, electives, warm);
    search.best = sequences_objective(cfg, electives, warm, nullptr, nullptr) + 1e-9;
    search.best_rooms = warm;
    if (!electives.empty()) search.dfs(0, RoomCursor{}, 0.0, 0, 0);
    rooms = search.best_rooms;
    plan.exact = true;
  } else {
    rooms = list_schedule(cfg, electives);
    local_search(cfg, electives, rooms);
    plan.exact = false;
  }
  // Canonical relabeling: within a class, hand the sorted (tau, room) slots
  // to patient ids in ascending order. Ids are interchangeable inside a
  // class, and day-of execution serves each class FIFO (tau-then-id), so
  // this makes the plan exactly followable without changing its objective.
  {
    std::vector<int> taus_tmp(electives.size(), 0);
    std::vector<int> rooms_tmp(electives.size(), 0);
    sequences_objective(cfg, electives, rooms, &taus_tmp, &rooms_tmp);
    std::vector<std::vector<int>> by_class(cfg.classes.size());
    for (const Patient& p : electives)
      by_class[static_cast<std::size_t>(p.class_id - 1)].push_back(p.id);
    std::vector<int> remap(electives.size(), 0);
    for (auto& members : by_class) {
      std::vector<int> slots = members;  // current holders of this class's slots
      std::sort(slots.begin(), slots.end(), [&](int a, int b) {
        const std::size_t ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
        if (taus_tmp[ia] != taus_tmp[ib]) return taus_tmp[ia] < taus_tmp[ib];
        return rooms_tmp[ia] < rooms_tmp[ib];
      });
      for (std::size_t i = 0; i < members.size(); ++i)
        remap[static_cast<std::size_t>(slots[i])] = members[i];
    }
    for (auto& seq : rooms)
      for (int& pid : seq) pid = remap[static_cast<std::size_t>(pid)];
  }
  std::vector<int> taus(electives.size(), 0);
  std::vector<int> assigned(electives.size(), 0);
  plan.objective = sequences_objective(cfg, electives, rooms, &taus, &assigned);
  plan.room_sequences = rooms;
  plan.entries.resize(electives.size());
  for (std::size_t i = 0; i < electives.size(); ++i) {
    PlanEntry e;
    e.patient_id = electives[i].id;
    e.class_id = electives[i].class_id;
    e.tau = taus[i];
    e.room = assigned[i];
    plan.entries[i] = e;
  }
  return plan;
}

void write_plan(const PreSchedule& plan, const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write plan file: " + path);
  out << "orlab-plan v1\n";
  out << "config_hash " << std::hex << config_hash(cfg) << std::dec << "\n";
  out << "electives " << plan.entries.size() << "\n";
  for (const PlanEntry& e : plan.entries)
    out << e.patient_id << " " << e.class_id << " " << e.tau << " " << e.room << "\n";
}

PreSchedule read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan file: " + path);
  std::string header;
  std::getline(in, header);
  if (header != "orlab-plan v1") throw ConfigError("unrecognized plan header: " + header);
  std::string key;
  std::string hash_hex;
  in >> key >> hash_hex;
  std::size_t count = 0;
  in >> key >> count;
  PreSchedule plan;
  plan.entries.resize(count);
  int max_room = -1;
  for (std::size_t i = 0; i < count; ++i) {
    PlanEntry e;
    in >> e.patient_id >> e.class_id >> e.tau >> e.room;
    if (!in) throw ConfigError("truncated plan file: " + path);
    if (e.patient_id < 0 || e.patient_id >= static_cast<int>(count) || e.room < 0)
      throw ConfigError("plan file entry out of range: " + path);
    plan.entries[static_cast<std::size_t>(e.patient_id)] = e;
    max_room = std::max(max_room, e.room);
  }
  plan.room_sequences.assign(static_cast<std::size_t>(max_room + 1), {});
  // Rebuild per-room order by planned start.
  std::vector<const PlanEntry*> sorted;
  for (const PlanEntry& e : plan.entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const PlanEntry* a, const PlanEntry* b) {
    if (a->room != b->room) return a->room < b->room;
    if (a->tau != b->tau) return a->tau < b->tau;
    return a->patient_id < b->patient_id;
  });
  for (const PlanEntry* e : sorted)
    plan.room_sequences[static_cast<std::size_t>(e->room)].push_back(e->patient_id);
  return plan;
}

}  // namespace orlab
