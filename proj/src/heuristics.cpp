#include "orlab/heuristics.hpp"

#include <algorithm>

namespace orlab {

const std::vector<HeuristicKind>& all_heuristics() {
  static const std::vector<HeuristicKind> kinds = {
      HeuristicKind::SptU,  HeuristicKind::LptU, HeuristicKind::NeLpt,
      HeuristicKind::ELpt,  HeuristicKind::NeSpt, HeuristicKind::PreSched};
  return kinds;
}

std::string heuristic_name(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::SptU: return "spt_u";
    case HeuristicKind::LptU: return "lpt_u";
    case HeuristicKind::NeLpt: return "ne_lpt";
    case HeuristicKind::ELpt: return "e_lpt";
    case HeuristicKind::NeSpt: return "ne_spt";
    case HeuristicKind::PreSched: return "presched";
  }
  return "?";
}

HeuristicKind heuristic_from_name(const std::string& name) {
  for (HeuristicKind k : all_heuristics())
    if (heuristic_name(k) == name) return k;
  throw ConfigError("unknown policy name: " + name);
}

std::vector<int> heuristic_rank(const SimConfig& cfg, HeuristicKind kind) {
  std::vector<int> ids;
  for (const SurgeryClass& sc : cfg.classes) ids.push_back(sc.id);
  auto mean = [&](int id) { return cfg.cls(id).mean_duration(); };
  auto elective = [&](int id) { return cfg.cls(id).category == Category::Elective; };
  switch (kind) {
    case HeuristicKind::SptU:
      std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (mean(a) != mean(b)) return mean(a) < mean(b);
        if (elective(a) != elective(b)) return !elective(a);
        return a < b;
      });
      break;
    case HeuristicKind::LptU:
      std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (mean(a) != mean(b)) return mean(a) > mean(b);
        if (elective(a) != elective(b)) return !elective(a);
        return a < b;
      });
      break;
    case HeuristicKind::NeLpt:
      std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (elective(a) != elective(b)) return !elective(a);
        if (mean(a) != mean(b)) return mean(a) > mean(b);
        return a < b;
      });
      break;
    case HeuristicKind::NeSpt:
      std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (elective(a) != elective(b)) return !elective(a);
        if (mean(a) != mean(b)) return mean(a) < mean(b);
        return a < b;
      });
      break;
    case HeuristicKind::ELpt:
      std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (elective(a) != elective(b)) return elective(a);
        if (mean(a) != mean(b)) return mean(a) > mean(b);
        return a < b;
      });
      break;
    case HeuristicKind::PreSched:
      throw ConfigError("presched has no static rank");
  }
  return ids;
}

QueueView::QueueView(const GlobalState& state)
    : state_(&state), taken_(state.queues.size(), 0) {}

int QueueView::count(int class_id) const {
  const auto& q = state_->queues[static_cast<std::size_t>(class_id - 1)];
  return static_cast<int>(q.size()) - taken_[static_cast<std::size_t>(class_id - 1)];
}

int QueueView::head(int class_id) const {
  const auto& q = state_->queues[static_cast<std::size_t>(class_id - 1)];
  const int off = taken_[static_cast<std::size_t>(class_id - 1)];
  if (off >= static_cast<int>(q.size())) return -1;
  return q[static_cast<std::size_t>(off)];
}

void QueueView::consume(int class_id) { ++taken_[static_cast<std::size_t>(class_id - 1)]; }

JointAction sequential_assign(const GlobalState& state, const SimConfig& cfg,
                              const ClassChooser& chooser) {
  JointAction action(static_cast<std::size_t>(cfg.num_ors), 0);
  QueueView view(state);
  for (int j = 0; j < cfg.num_ors; ++j) {
    if (state.ors[static_cast<std::size_t>(j)].busy(state.clock)) continue;
    for (int k : chooser(j, view, action)) {
      if (view.count(k) > 0) {
        action[static_cast<std::size_t>(j)] = k;
        view.consume(k);
        break;
      }
    }
  }
  return action;
}

HeuristicPolicy::HeuristicPolicy(HeuristicKind kind, const SimConfig& cfg) : kind_(kind) {
  if (kind != HeuristicKind::PreSched) {
    static_rank_ = heuristic_rank(cfg, kind);
  } else {
    // Non-electives ranked by delay weight (desc), then class id: the most
    // delay-sensitive arrivals take free capacity first.
    for (const SurgeryClass& sc : cfg.classes)
      if (sc.category != Category::Elective) nonelective_rank_.push_back(sc.id);
    std::stable_sort(nonelective_rank_.begin(), nonelective_rank_.end(), [&](int a, int b) {
      if (cfg.cls(a).delay_coeff != cfg.cls(b).delay_coeff)
        return cfg.cls(a).delay_coeff > cfg.cls(b).delay_coeff;
      return a < b;
    });
  }
}

JointAction HeuristicPolicy::decide(const GlobalState& state, const Roster& roster,
                                    const SimConfig& cfg) {
  if (kind_ != HeuristicKind::PreSched) {
    return sequential_assign(state, cfg,
                             [&](int, const QueueView&, const JointAction&) {
                               return static_rank_;
                             });
  }
  return sequential_assign(state, cfg, [&](int j, const QueueView& view,
                                           const JointAction& partial) {
    std::vector<int> prefs = nonelective_rank_;
    // Due electives: earliest planned slot first; a case may leave its
    // planned room once that room is busy or has had its turn this epoch.
    struct Cand {
      int tau;
      int own;  // 0 when planned for this room
      int id;
      int class_id;
    };
    std::vector<Cand> cands;
    for (const SurgeryClass& sc : cfg.classes) {
      if (sc.category != Category::Elective || view.count(sc.id) == 0) continue;
      const int pid = view.head(sc.id);
      const Patient& p = roster.patient(pid);
      if (!p.reference_slot || *p.reference_slot > state.clock) continue;
      const int planned = p.planned_or.value_or(j);
      const bool planned_here = planned == j;
      const bool planned_unavailable =
          planned_here || planned >= cfg.num_ors ||
          state.ors[static_cast<std::size_t>(planned)].busy(state.clock) || planned < j;
      (void)partial;
      if (!planned_unavailable) continue;  // leave it for its own (free, later) room
      cands.push_back({*p.reference_slot, planned_here ? 0 : 1, pid, sc.id});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.tau != b.tau) return a.tau < b.tau;
      if (a.own != b.own) return a.own < b.own;
      return a.id < b.id;
    });
    for (const Cand& c : cands) prefs.push_back(c.class_id);
    return prefs;
  });
}

}  // namespace orlab
