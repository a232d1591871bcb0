#pragma once
// Observation encoding, masked action distribution, and the actor-critic
// bundle for the learned dispatcher. One actor network is shared by all
// rooms (the agent id is part of the observation); the critic scores the
// epoch-start state with the agent-specific fields zeroed.
//
// Observation layout (frozen; dim = 1 + 2K + J*(K+3) + J + (K+1)):
//   [0]                 clock / T
//   per class k=1..K    queue length / 10
//                       head gap / T   (elective head: reference - clock,
//                       negative when overdue; urgent/emergency head:
//                       clock - arrival; 0 when the queue is empty)
//   per room j=0..J-1   busy flag,
//                       expected residual / T (changeover + expected
//                       duration - elapsed, floored at one slot while busy),
//                       last-class one-hot (K+1; slot 0 = fresh room)
//   agent one-hot (J)   zeroed in the critic view
//   action histogram    (K+1) counts of this epoch's earlier room actions
//                       (busy rooms count as idle) / J; zeroed in the critic
//
// Rooms decide in ascending id within an epoch; each sees the queues after
// earlier picks, so infeasible classes are masked to probability exactly
// zero and joint actions stay conflict-free. Idling is always feasible.

#include <cstdint>
#include <string>
#include <vector>

#include "orlab/domain.hpp"
#include "orlab/heuristics.hpp"
#include "orlab/marl/net.hpp"
#include "orlab/rng.hpp"
#include "orlab/simenv.hpp"

namespace orlab {

class Encoder {
 public:
  explicit Encoder(const SimConfig& cfg);

  int dim() const { return dim_; }
  int num_actions() const { return num_classes_ + 1; }

  // Epoch-start state for the critic: agent one-hot and histogram zeroed.
  void encode_critic(const GlobalState& state, const Roster& roster,
                     std::vector<double>& out) const;

  // Room or_id's view given earlier picks this epoch (partial holds actions
  // of rooms with id < or_id; later entries are ignored).
  void encode_agent(const GlobalState& state, const Roster& roster, int or_id,
                    const QueueView& view, const JointAction& partial,
                    std::vector<double>& out) const;

  // Feasibility over {0..K}: idle always, class k iff its (depleted) queue
  // is non-empty.
  std::vector<std::uint8_t> mask(const QueueView& view) const;

 private:
  void encode_base(const GlobalState& state, const Roster& roster,
                   const QueueView* view, std::vector<double>& out) const;

  int num_classes_, num_ors_, horizon_, dim_;
  std::vector<int> expected_slots_;  // ceil of each class's mean duration
};

// Probabilities over actions with infeasible entries exactly zero; logps
// computed from the shifted logits so ratios stay stable.
struct MaskedCategorical {
  std::vector<double> probs;
  std::vector<double> logps;  // large negative on masked entries, never read
};

MaskedCategorical masked_categorical(const std::vector<double>& logits,
                                     const std::vector<std::uint8_t>& mask);
int sample_action(const MaskedCategorical& dist, Rng& rng);
int argmax_action(const MaskedCategorical& dist);
double entropy(const MaskedCategorical& dist);

struct ActorCritic {
  Mlp actor;
  Mlp critic;
  ActorCritic(int obs_dim, int num_actions, const PpoConfig& ppo, std::uint64_t seed);
};

// StepPolicy adapter so trained weights run through the same evaluation
// pipeline as the heuristics. Greedy mode takes the modal action; sampling
// mode draws from the masked distribution (seeded, for training rollouts).
class MarlStepPolicy : public StepPolicy {
 public:
  MarlStepPolicy(const ActorCritic& ac, const SimConfig& cfg, bool greedy,
                 std::uint64_t sample_seed = 0);

  JointAction decide(const GlobalState& state, const Roster& roster,
                     const SimConfig& cfg) override;
  std::string name() const override { return "marl"; }

 private:
  const ActorCritic* ac_;
  Encoder enc_;
  bool greedy_;
  Rng rng_;
};

}  // namespace orlab
