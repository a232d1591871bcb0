#pragma once
// The six dispatch heuristics and the within-epoch sequential assignment all
// policies share: free rooms act in ascending OR order, each picking its
// top-ranked class whose queue is non-empty after earlier picks (so joint
// actions are conflict-free by construction). "Processing time" always means
// the expected class duration (Gamma mean), never the realized draw.
//
// Rankings (lexicographic):
//   spt_u / lpt_u : expected duration asc/desc, non-elective before elective
//                   inside equal-duration pairs, then class id
//   ne_lpt/ne_spt : non-electives first, duration desc/asc inside each
//                   group, then class id
//   e_lpt         : electives first, duration desc inside each group
//   presched      : follow the pre-day plan; non-electives take free
//                   capacity immediately, due electives (tau <= clock) start
//                   earliest-tau-first, preferring their planned room but
//                   falling back to any free room once the planned room is
//                   busy or has already acted this epoch
#include <functional>
#include <string>
#include <vector>

#include "orlab/simenv.hpp"

namespace orlab {

enum class HeuristicKind { SptU, LptU, NeLpt, ELpt, NeSpt, PreSched };

const std::vector<HeuristicKind>& all_heuristics();
std::string heuristic_name(HeuristicKind kind);
// Throws ConfigError on unknown names ("spt_u", "lpt_u", "ne_lpt", "e_lpt",
// "ne_spt", "presched").
HeuristicKind heuristic_from_name(const std::string& name);

// Static class ranking for the five non-plan heuristics.
std::vector<int> heuristic_rank(const SimConfig& cfg, HeuristicKind kind);

// View of the queues during one epoch's sequential assignment: counts and
// heads as seen after the picks of earlier rooms.
class QueueView {
 public:
  explicit QueueView(const GlobalState& state);
  int count(int class_id) const;
  // Patient id currently at the (depleted) head; -1 if empty.
  int head(int class_id) const;
  void consume(int class_id);

 private:
  const GlobalState* state_;
  std::vector<int> taken_;
};

// chooser(or_id, view, partial joint action) -> ranked class preference.
using ClassChooser =
    std::function<std::vector<int>(int, const QueueView&, const JointAction&)>;

// Runs the shared sequential protocol; busy rooms get 0.
JointAction sequential_assign(const GlobalState& state, const SimConfig& cfg,
                              const ClassChooser& chooser);

class HeuristicPolicy : public StepPolicy {
 public:
  HeuristicPolicy(HeuristicKind kind, const SimConfig& cfg);
  JointAction decide(const GlobalState& state, const Roster& roster,
                     const SimConfig& cfg) override;
  std::string name() const override { return heuristic_name(kind_); }

 private:
  HeuristicKind kind_;
  std::vector<int> static_rank_;        // non-plan heuristics
  std::vector<int> nonelective_rank_;   // presched: NE priority order
};

}  // namespace orlab
