#pragma once
// Discrete-time multi-OR day simulator. Slots 0..T-1 are decision epochs; at
// each epoch every free room receives an action (0 = idle, k = start the
// FIFO head of class-k's queue). Service is non-preemptive; a case started
// at beta with realized duration xi after a changeover sigma occupies
// [beta, beta+sigma+xi) and may spill past T (overtime). All randomness is
// pre-sampled into the Roster at reset from the episode seed, so the day's
// arrivals and durations are identical under every policy (common random
// numbers) and two runs with the same seed are bit-identical.

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orlab/domain.hpp"
#include "orlab/preschedule.hpp"
#include "orlab/reward.hpp"

namespace orlab {

struct ProtocolError : std::runtime_error {
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

struct ORStatus {
  int busy_until = 0;                // room is busy at clock c iff c < busy_until
  std::optional<int> last_class;     // class of the most recent case on this room
  int current_patient = -1;          // -1 when no case in progress
  int current_start = 0;
  int current_setup = 0;
  int last_finish = 0;               // running max of completion times
  bool busy(int clock) const { return clock < busy_until; }
};

struct GlobalState {
  int clock = 0;
  std::vector<std::deque<int>> queues;  // per class, FIFO of patient ids
  std::vector<ORStatus> ors;
};

using JointAction = std::vector<int>;  // per OR; 0 idle, k starts class k

struct Roster {
  std::vector<Patient> patients;                 // indexed by patient id
  std::vector<std::vector<int>> arrivals_by_slot;  // non-electives (and slot 0)
  bool emergency_fired = false;
  int emergency_slot = -1;
  double raw_workload = 0.0;  // sum of pre-rounding duration draws
  std::uint64_t seed = 0;
  const Patient& patient(int id) const { return patients[static_cast<std::size_t>(id)]; }
};

// Sample one day's roster: the fixed electives (reference slots and rooms
// from the plan) plus urgent Poisson arrivals, at most one emergency batch
// (per-slot hazard equivalent to the day-level probability), and realized
// Gamma durations rounded up to whole slots.
Roster make_roster(const SimConfig& cfg, const PreSchedule& plan, std::uint64_t seed);

struct StepResult {
  double team_reward = 0.0;
  std::vector<double> agent_rewards;  // per OR; idle/busy contribute 0
  std::vector<int> started_patients;  // ids started this epoch, OR order
};

struct EpisodeRecord {
  struct Row {
    int id = 0;
    int class_id = 0;
    int arrival = 0;
    std::optional<int> reference;
    int duration = 1;
    int setup = 0;                 // changeover paid at the start (0 if unserved)
    std::optional<int> start;      // beta; absent = never started
    std::optional<int> or_id;
    std::optional<int> finish;     // beta + setup + duration
  };
  std::uint64_t seed = 0;
  std::uint64_t cfg_hash = 0;
  std::string policy;
  int horizon = 0;
  int num_ors = 0;
  int num_classes = 0;
  bool emergency_fired = false;
  int emergency_slot = -1;
  std::vector<Row> rows;             // by patient id
  std::vector<int> last_finish;      // per OR
  std::vector<double> team_rewards;  // per epoch, length horizon
  double terminal_reward = 0.0;
  double streamed_total = 0.0;       // sum of team rewards + terminal
};

// Line-oriented record file (header + one patient per line); used by the
// oracle, analytics and Gantt tooling.
std::string serialize_record(const EpisodeRecord& rec);
EpisodeRecord parse_record(const std::string& text);
void write_record(const EpisodeRecord& rec, const std::string& path);
EpisodeRecord read_record(const std::string& path);

// Batch recomputation of the day reward from a finished record; must agree
// with the streamed total to 1e-9.
DayOutcome record_day_outcome(const EpisodeRecord& rec, const SimConfig& cfg);

class Episode {
 public:
  // Roster sampled from seed (normal path) or injected directly (tiny
  // hand-built instances).
  Episode(const SimConfig& cfg, const PreSchedule& plan, std::uint64_t seed);
  Episode(const SimConfig& cfg, Roster roster);

  const GlobalState& state() const { return state_; }
  const Roster& roster() const { return roster_; }
  const SimConfig& config() const { return *cfg_; }
  bool done() const { return state_.clock >= cfg_->horizon; }

  // Applies a conflict-free joint action at the current epoch, credits
  // immediate rewards, advances the clock and releases new arrivals. Throws
  // ProtocolError on actions for busy rooms, empty queues, or after T.
  StepResult step(const JointAction& action);

  // After the last epoch: completes in-progress cases (overtime) and applies
  // the terminal overtime penalty.
  void finalize();
  bool finalized() const { return finalized_; }

  double overtime_total() const { return overtime_; }
  double terminal() const { return terminal_; }
  const std::vector<double>& team_rewards() const { return team_rewards_; }

  EpisodeRecord record(const std::string& policy_name) const;

 private:
  void settle();          // mark rooms whose case completed as free
  void admit(int slot);   // push arrivals for `slot` into their queues

  const SimConfig* cfg_;
  Roster roster_;
  GlobalState state_;
  struct Outcome {
    int start = -1, or_id = -1, setup = 0, finish = -1;
  };
  std::vector<Outcome> outcomes_;
  std::vector<double> team_rewards_;
  double overtime_ = 0.0;
  double terminal_ = 0.0;
  bool finalized_ = false;
};

// Per-epoch action provider (heuristics, trained policies, ...).
struct StepPolicy {
  virtual ~StepPolicy() = default;
  virtual JointAction decide(const GlobalState& state, const Roster& roster,
                             const SimConfig& cfg) = 0;
  // Called once after finalize(); lets learners bootstrap off the final state.
  virtual void episode_end(const GlobalState& /*state*/, const Roster& /*roster*/,
                           const SimConfig& /*cfg*/) {}
  virtual std::string name() const = 0;
};

EpisodeRecord run_episode(const SimConfig& cfg, const PreSchedule& plan, std::uint64_t seed,
                          StepPolicy& policy);
EpisodeRecord run_episode_on(Episode episode, StepPolicy& policy);

}  // namespace orlab
