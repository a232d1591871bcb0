#pragma once
// Core vocabulary for the intraday operating-room scheduling lab: surgery
// classes, the sequence-dependent setup matrix, patients, and the validated
// simulation configuration (including PPO hyperparameters, so one config
// file pins an entire experiment).

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orlab {

enum class Category { Elective, Urgent, Emergency };
enum class DurationClass { Minor = 0, Moderate = 1, Long = 2, Complex = 3 };

std::string to_string(Category c);
std::string to_string(DurationClass d);

struct SurgeryClass {
  int id = 0;  // 1-based; action k>0 starts the head of queue k
  std::string name;
  Category category = Category::Elective;
  DurationClass duration_class = DurationClass::Minor;
  double utility = 0.0;      // credited once when the case starts
  double delay_coeff = 0.0;  // quadratic waiting-cost weight
  double gamma_shape = 1.0;  // duration law Gamma(shape, scale), slots
  double gamma_scale = 1.0;
  double mean_duration() const { return gamma_shape * gamma_scale; }
};

// K x K changeover matrix plus a fresh-room row (first case of the day on a
// room pays the fresh entry, zero by default). Diagonal is zero: repeating a
// class needs no changeover.
struct SetupMatrix {
  int num_classes = 0;
  std::vector<int> cells;  // row-major [prev][next], class ids - 1
  std::vector<int> fresh;  // [next]

  int setup(std::optional<int> prev_class_id, int next_class_id) const {
    if (!prev_class_id) return fresh[static_cast<std::size_t>(next_class_id - 1)];
    return cells[static_cast<std::size_t>(*prev_class_id - 1) * num_classes +
                 static_cast<std::size_t>(next_class_id - 1)];
  }
};

// Total slots a room is occupied when a case of `next_class` follows
// `prev_class` (absent prev = fresh room): realized duration + changeover.
int effective_duration(int duration_slots, std::optional<int> prev_class_id,
                       int next_class_id, const SetupMatrix& setup);

struct Patient {
  int id = 0;
  int class_id = 0;
  int arrival_slot = 0;                  // electives 0, others their arrival
  std::optional<int> reference_slot;     // planned start; electives only
  std::optional<int> planned_or;         // pre-day room; electives only
  int duration_slots = 1;                // realized Gamma draw, ceiled to >= 1
  double duration_raw = 1.0;             // pre-rounding draw (calibration only)
  bool elective() const { return arrival_slot == 0 && reference_slot.has_value(); }
};

struct PpoConfig {
  double discount = 1.0;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double entropy_coeff = 0.01;  // decays linearly to 0 over the iterations
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  double reward_scale = 0.01;  // critic-side scaling; advantages are normalized
  int hidden1 = 128;
  int hidden2 = 128;
  int iterations = 400;
  int episodes_per_iteration = 16;
  int updates_per_iteration = 10;
  int minibatch_size = 256;
  int validation_interval = 10;  // iterations between greedy validation passes
  int validation_episodes = 24;
};

struct SimConfig {
  int horizon = 100;  // decision slots 0..horizon-1
  int num_ors = 6;
  std::vector<SurgeryClass> classes;        // ids 1..K in order
  std::array<int, 4> elective_counts{};     // per DurationClass
  double urgent_rate = 0.08;                // Poisson rate per slot
  double emergency_day_prob = 0.40;         // chance the batch fires at all
  int emergency_batch = 5;
  double overtime_cost = 0.005;
  SetupMatrix setup;
  PpoConfig ppo;

  int num_classes() const { return static_cast<int>(classes.size()); }
  const SurgeryClass& cls(int class_id) const {
    return classes[static_cast<std::size_t>(class_id - 1)];
  }
  // Per-slot hazard equivalent to the day-level emergency probability:
  // 1 - (1-p)^horizon == emergency_day_prob.
  double emergency_slot_hazard() const;
  int total_electives() const {
    return elective_counts[0] + elective_counts[1] + elective_counts[2] + elective_counts[3];
  }
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Default desk-scale configuration (6 rooms, 100 slots, 8 classes, 55
// electives, the Gamma duration laws and cost weights used throughout).
SimConfig default_config();

// Parse + validate a JSON config text; throws ConfigError naming the first
// offending field. Fields omitted in the file keep their defaults.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::string& path);
std::string serialize_config(const SimConfig& cfg);  // canonical (sorted keys)
void save_config(const SimConfig& cfg, const std::string& path);

// FNV-1a over the canonical serialization; stamped into run manifests,
// checkpoints and episode records so artifacts can be traced to a config.
std::uint64_t config_hash(const SimConfig& cfg);

}  // namespace orlab
