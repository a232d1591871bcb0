#include "orlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "orlab/reward.hpp"
#include "orlab/rng.hpp"

namespace orlab {

OracleInstance OracleInstance::from_roster(const Roster& roster, const SimConfig& cfg) {
  OracleInstance inst;
  inst.horizon = cfg.horizon;
  inst.num_ors = cfg.num_ors;
  inst.cfg = &cfg;
  for (const Patient& p : roster.patients) {
    OracleItem it;
    it.id = p.id;
    it.class_id = p.class_id;
    it.arrival = p.arrival_slot;
    it.reference = p.reference_slot;
    it.duration = p.duration_slots;
    inst.items.push_back(it);
  }
  return inst;
}

OracleInstance OracleInstance::from_record(const EpisodeRecord& rec, const SimConfig& cfg) {
  OracleInstance inst;
  inst.horizon = rec.horizon;
  inst.num_ors = rec.num_ors;
  inst.cfg = &cfg;
  for (const EpisodeRecord::Row& row : rec.rows) {
    OracleItem it;
    it.id = row.id;
    it.class_id = row.class_id;
    it.arrival = row.arrival;
    it.reference = row.reference;
    it.duration = row.duration;
    inst.items.push_back(it);
  }
  return inst;
}

namespace {

double item_reward(const OracleInstance& inst, const OracleItem& it, int start) {
  const SurgeryClass& cls = inst.cfg->cls(it.class_id);
  const int wait = it.reference ? std::max(start - *it.reference, 0) : start - it.arrival;
  return cls.utility - cls.delay_coeff * static_cast<double>(wait) * wait;
}

}  // namespace

OracleEval evaluate_schedule(const OracleInstance& inst, const OracleSchedule& sched) {
  OracleEval ev;
  ev.start.assign(inst.items.size(), -1);
  ev.room_of.assign(inst.items.size(), -1);
  for (std::size_t r = 0; r < sched.rooms.size(); ++r) {
    int time = 0;
    std::optional<int> last;
    for (int pid : sched.rooms[r]) {
      const OracleItem& it = inst.items[static_cast<std::size_t>(pid)];
      const int beta = std::max(time, it.arrival);
      if (beta > inst.horizon - 1) {
        ev.feasible = false;
        continue;
      }
      const int sigma = inst.cfg->setup.setup(last, it.class_id);
      const SurgeryClass& cls = inst.cfg->cls(it.class_id);
      const int wait = it.reference ? std::max(beta - *it.reference, 0) : beta - it.arrival;
      ev.revenue += cls.utility;
      ev.waiting_penalty += cls.delay_coeff * static_cast<double>(wait) * wait;
      ev.start[static_cast<std::size_t>(pid)] = beta;
      ev.room_of[static_cast<std::size_t>(pid)] = static_cast<int>(r);
      time = beta + sigma + it.duration;
      last = it.class_id;
    }
    ev.overtime_slots += std::max(time - inst.horizon, 0);
  }
  ev.total = ev.revenue - ev.waiting_penalty - inst.cfg->overtime_cost * ev.overtime_slots;
  return ev;
}

double evaluate_via_reward_module(const OracleInstance& inst, const OracleSchedule& sched) {
  const OracleEval ev = evaluate_schedule(inst, sched);
  std::vector<ServedCase> served;
  std::vector<int> last_finish(static_cast<std::size_t>(inst.num_ors), 0);
  for (std::size_t r = 0; r < sched.rooms.size(); ++r) {
    int time = 0;
    std::optional<int> last;
    for (int pid : sched.rooms[r]) {
      const OracleItem& it = inst.items[static_cast<std::size_t>(pid)];
      const int beta = ev.start[static_cast<std::size_t>(pid)];
      ServedCase sc;
      sc.patient_id = it.id;
      sc.class_id = it.class_id;
      sc.arrival = it.arrival;
      sc.reference = it.reference;
      sc.start = beta;
      served.push_back(sc);
      time = beta + inst.cfg->setup.setup(last, it.class_id) + it.duration;
      last = it.class_id;
    }
    last_finish[r] = time;
  }
  return day_reward(served, last_finish, *inst.cfg).day_reward;
}

OracleSchedule schedule_from_record(const EpisodeRecord& rec) {
  OracleSchedule sched;
  sched.rooms.assign(static_cast<std::size_t>(rec.num_ors), {});
  for (const auto& row : rec.rows)
    if (row.start) sched.rooms[static_cast<std::size_t>(*row.or_id)].push_back(row.id);
  for (auto& seq : sched.rooms)
    std::sort(seq.begin(), seq.end(), [&](int a, int b) {
      return *rec.rows[static_cast<std::size_t>(a)].start <
             *rec.rows[static_cast<std::size_t>(b)].start;
    });
  return sched;
}

namespace {

// Branch and bound over room sequences. Cases are placed into room r until
// it is closed, then r+1 starts fresh; closing an empty room closes the day
// (identical fresh rooms make any schedule with a skipped room a permutation
// of one without). Upper bound: placed value so far plus every remaining
// utility, minus overtime already locked in. A dominance memo collapses
// permutations that reach the same (room, served set, last class, cursor)
// with no more accumulated value, which is what makes <=10-case instances
// millisecond-fast.
class ExactOracle {
 public:
  explicit ExactOracle(const OracleInstance& inst, long node_budget)
      : inst_(inst), budget_(node_budget) {
    remaining_utility_ = 0.0;
    for (const OracleItem& it : inst.items)
      remaining_utility_ += inst.cfg->cls(it.class_id).utility;
    used_.assign(inst.items.size(), false);
    current_.rooms.assign(static_cast<std::size_t>(inst.num_ors), {});
    best_value_ = 0.0;  // serving nobody is always feasible
    best_ = current_;
    memo_usable_ = inst.items.size() <= 24 && inst.num_ors <= 7 &&
                   inst.cfg->num_classes() <= 30;
  }

  OracleResult run() {
    dfs(0, 0, std::nullopt, -1, 0.0, 0.0);
    OracleResult res;
    res.schedule = best_;
    res.eval = evaluate_schedule(inst_, best_);
    res.optimal = nodes_ <= budget_;
    res.nodes = nodes_;
    return res;
  }

 private:
  void leaf(double acc, double ot) {
    const double total = acc - inst_.cfg->overtime_cost * ot;
    if (total > best_value_ + 1e-12) {
      best_value_ = total;
      best_ = current_;
    }
  }

  // room r with cursor (time, last); first_floor = id of the first case in
  // room r-1 (first ids increase across rooms to kill fresh-room symmetry).
  void dfs(int r, int time, std::optional<int> last, int first_floor, double acc,
           double ot_closed) {
    if (++nodes_ > budget_) return;
    const bool room_empty = current_.rooms[static_cast<std::size_t>(r)].empty();
    const double room_ot = std::max(time - inst_.horizon, 0);

    // Dominance: the subtree below depends only on (r, served set, last,
    // time, and — while the room is still empty — the symmetry floor);
    // histories differ only through acc - C_o * ot_closed, so a revisit that
    // does not strictly improve it is pruned.
    if (memo_usable_ && time < (1 << 12)) {
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < used_.size(); ++i)
        if (used_[i]) mask |= (1ULL << i);
      const std::uint64_t key =
          (static_cast<std::uint64_t>(r)) | (mask << 3) |
          (static_cast<std::uint64_t>(last ? *last : 0) << 27) |
          (static_cast<std::uint64_t>(time) << 32) |
          (static_cast<std::uint64_t>(room_empty ? first_floor + 1 : 63) << 44);
      const double value = acc - inst_.cfg->overtime_cost * ot_closed;
      auto [slot, inserted] = memo_.try_emplace(key, value);
      if (!inserted) {
        if (value <= slot->second + 1e-12) return;
        slot->second = value;
      }
    }

    // Close this room. An empty close ends the whole day (see above).
    if (r + 1 == inst_.num_ors || room_empty) {
      leaf(acc, ot_closed + room_ot);
    } else {
      dfs(r + 1, 0, std::nullopt, current_.rooms[static_cast<std::size_t>(r)].front(),
          acc, ot_closed + room_ot);
    }

    // Prune: even collecting every remaining utility cannot beat the best.
    if (acc + remaining_utility_ - inst_.cfg->overtime_cost * (ot_closed + room_ot) <=
        best_value_ + 1e-12)
      return;

    for (std::size_t i = 0; i < inst_.items.size(); ++i) {
      if (used_[i]) continue;
      const OracleItem& it = inst_.items[i];
      if (room_empty && it.id <= first_floor) continue;  // symmetry breaking
      const int beta = std::max(time, it.arrival);
      if (beta > inst_.horizon - 1) continue;
      const int sigma = inst_.cfg->setup.setup(last, it.class_id);
      const double u = inst_.cfg->cls(it.class_id).utility;
      used_[i] = true;
      remaining_utility_ -= u;
      current_.rooms[static_cast<std::size_t>(r)].push_back(it.id);
      dfs(r, beta + sigma + it.duration, it.class_id, first_floor,
          acc + item_reward(inst_, it, beta), ot_closed);
      current_.rooms[static_cast<std::size_t>(r)].pop_back();
      remaining_utility_ += u;
      used_[i] = false;
    }
  }

  const OracleInstance& inst_;
  long budget_;
  long nodes_ = 0;
  double remaining_utility_;
  std::vector<bool> used_;
  OracleSchedule current_, best_;
  double best_value_;
  bool memo_usable_ = false;
  std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace

OracleResult solve_exact(const OracleInstance& inst, long node_budget) {
  ExactOracle solver(inst, node_budget);
  return solver.run();
}

OracleResult solve_search(const OracleInstance& inst, const OracleSchedule& warm,
                          std::uint64_t seed, long iterations) {
  Rng rng(seed);
  OracleSchedule cur = warm;
  cur.rooms.resize(static_cast<std::size_t>(inst.num_ors));
  OracleEval cur_ev = evaluate_schedule(inst, cur);

  std::vector<int> unserved;
  {
    std::vector<bool> in(inst.items.size(), false);
    for (const auto& seq : cur.rooms)
      for (int pid : seq) in[static_cast<std::size_t>(pid)] = true;
    for (const OracleItem& it : inst.items)
      if (!in[static_cast<std::size_t>(it.id)]) unserved.push_back(it.id);
  }

  OracleResult res;
  res.schedule = cur;
  res.eval = cur_ev;
  res.nodes = iterations;

  const double t0 = 5.0, t_end = 0.01;
  const double alpha =
      iterations > 1 ? std::pow(t_end / t0, 1.0 / static_cast<double>(iterations - 1)) : 1.0;
  double temp = t0;

  auto pick_room = [&]() { return static_cast<std::size_t>(rng.uniform_int(
                               static_cast<std::uint64_t>(inst.num_ors))); };

  for (long it = 0; it < iterations; ++it, temp *= alpha) {
    OracleSchedule cand = cur;
    std::vector<int> cand_unserved = unserved;
    const int move = static_cast<int>(rng.uniform_int(4));
    bool built = false;
    switch (move) {
      case 0: {  // relocate a served case to a random position
        std::size_t r = pick_room();
        if (cand.rooms[r].empty()) break;
        const std::size_t i = static_cast<std::size_t>(rng.uniform_int(cand.rooms[r].size()));
        const int pid = cand.rooms[r][i];
        cand.rooms[r].erase(cand.rooms[r].begin() + static_cast<std::ptrdiff_t>(i));
        const std::size_t s = pick_room();
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(cand.rooms[s].size() + 1));
        cand.rooms[s].insert(cand.rooms[s].begin() + static_cast<std::ptrdiff_t>(j), pid);
        built = true;
        break;
      }
      case 1: {  // swap two served cases
        std::size_t r = pick_room(), s = pick_room();
        if (cand.rooms[r].empty() || cand.rooms[s].empty()) break;
        const std::size_t i = static_cast<std::size_t>(rng.uniform_int(cand.rooms[r].size()));
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(cand.rooms[s].size()));
        if (r == s && i == j) break;
        std::swap(cand.rooms[r][i], cand.rooms[s][j]);
        built = true;
        break;
      }
      case 2: {  // drop a served case
        std::size_t r = pick_room();
        if (cand.rooms[r].empty()) break;
        const std::size_t i = static_cast<std::size_t>(rng.uniform_int(cand.rooms[r].size()));
        cand_unserved.push_back(cand.rooms[r][i]);
        cand.rooms[r].erase(cand.rooms[r].begin() + static_cast<std::ptrdiff_t>(i));
        built = true;
        break;
      }
      case 3: {  // serve a dropped case
        if (cand_unserved.empty()) break;
        const std::size_t u = static_cast<std::size_t>(rng.uniform_int(cand_unserved.size()));
        const int pid = cand_unserved[static_cast<std::size_t>(u)];
        cand_unserved.erase(cand_unserved.begin() + static_cast<std::ptrdiff_t>(u));
        const std::size_t s = pick_room();
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(cand.rooms[s].size() + 1));
        cand.rooms[s].insert(cand.rooms[s].begin() + static_cast<std::ptrdiff_t>(j), pid);
        built = true;
        break;
      }
    }
    if (!built) continue;
    const OracleEval cand_ev = evaluate_schedule(inst, cand);
    if (!cand_ev.feasible) continue;
    const double delta = cand_ev.total - cur_ev.total;
    if (delta >= 0.0 || rng.uniform() < std::exp(delta / temp)) {
      cur = std::move(cand);
      cur_ev = cand_ev;
      unserved = std::move(cand_unserved);
      if (cur_ev.total > res.eval.total) {
        res.schedule = cur;
        res.eval = cur_ev;
      }
    }
  }
  return res;
}

std::string format_gap_report(const std::string& policy,
                              const std::vector<OracleGapRow>& rows) {
  std::ostringstream out;
  out << "oracle gap report: policy=" << policy << " days=" << rows.size() << "\n";
  out << "seed policy_total oracle_total gap mode\n";
  double gap_sum = 0.0, policy_sum = 0.0, oracle_sum = 0.0;
  for (const OracleGapRow& r : rows) {
    const double gap = r.oracle_total - r.policy_total;
    gap_sum += gap;
    policy_sum += r.policy_total;
    oracle_sum += r.oracle_total;
    out << r.day_seed << ' ' << r.policy_total << ' ' << r.oracle_total << ' ' << gap
        << ' ' << (r.optimal ? "exact" : "search") << "\n";
  }
  if (!rows.empty()) {
    const double n = static_cast<double>(rows.size());
    out << "mean policy " << policy_sum / n << " mean oracle " << oracle_sum / n
        << " mean gap " << gap_sum / n << "\n";
  }
  return out.str();
}

}  // namespace orlab
