#pragma once
// PPO with clipped surrogate and GAE for the shared-policy dispatcher.
//
// Epoch-level credit: the day is one trajectory of team rewards r_1..r_T
// plus the terminal overtime penalty treated as one extra pseudo-step with
// no action. The critic scores epoch-start states s_0..s_T (value after the
// pseudo-step is zero), GAE runs over those T+1 steps, and every room that
// made a free-room decision in epoch t shares the epoch's advantage. Rewards
// are scaled (PpoConfig::reward_scale) before GAE so critic targets stay
// O(1); advantages are normalized per minibatch so the policy side is
// scale-free either way.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "orlab/domain.hpp"
#include "orlab/marl/net.hpp"
#include "orlab/marl/policy.hpp"
#include "orlab/preschedule.hpp"
#include "orlab/rng.hpp"

namespace orlab {

// advantages[t] = sum_l (gamma*lambda)^l delta_{t+l},
// delta_t = rewards[t] + gamma*values[t+1] - values[t]; values has one more
// entry than rewards (the value after the last step, zero at episode end).
std::vector<double> compute_gae(const std::vector<double>& rewards,
                                const std::vector<double>& values, double gamma,
                                double lambda);

struct PolicySample {
  std::vector<double> obs;
  std::vector<std::uint8_t> mask;
  int action = 0;
  double logp_old = 0.0;
  double advantage = 0.0;  // epoch-level GAE, shared across the epoch's agents
};

struct CriticSample {
  std::vector<double> obs;
  double target = 0.0;  // advantage + old value, in scaled units
};

struct RolloutBatch {
  std::vector<PolicySample> policy;
  std::vector<CriticSample> critic;
  double mean_day_reward = 0.0;  // raw (unscaled) units, averaged over episodes
  int episodes = 0;
};

// Plays `episodes` days with the sampling policy; roster/action randomness
// derive from the two seed bases so a training run is reproducible.
RolloutBatch collect_rollouts(const SimConfig& cfg, const PreSchedule& plan,
                              const ActorCritic& ac, int episodes,
                              std::uint64_t roster_seed_base,
                              std::uint64_t action_seed_base);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// updates_per_iteration passes of minibatch Adam over both datasets;
// advantages are normalized within each minibatch.
UpdateStats ppo_update(ActorCritic& ac, Adam& actor_opt, Adam& critic_opt,
                       const RolloutBatch& batch, const PpoConfig& ppo,
                       double entropy_coeff, Rng& shuffle_rng);

struct Checkpoint {
  ActorCritic ac;
  Adam actor_opt;
  Adam critic_opt;
  int iteration = 0;
};

void save_checkpoint(const std::string& path, const ActorCritic& ac, Adam& actor_opt,
                     Adam& critic_opt, int iteration, const SimConfig& cfg);
// Throws ConfigError if the file's config hash or dimensions do not match.
Checkpoint load_checkpoint(const std::string& path, const SimConfig& cfg);

struct TrainOptions {
  std::string outdir;
  std::uint64_t seed = 1;
  int iterations_override = 0;  // 0: use cfg.ppo.iterations
  std::ostream* log = nullptr;  // per-iteration progress lines
};

struct TrainResult {
  int iterations = 0;
  double final_train_reward = 0.0;
  double best_val_reward = 0.0;
  std::string best_path, last_path, curves_path;
};

// Full training loop: collect / update / entropy decay / periodic greedy
// validation on a fixed common-random-number seed set. Writes curves.csv,
// best.ckpt (highest validation day reward) and last.ckpt under outdir.
TrainResult train(const SimConfig& cfg, const TrainOptions& opt);

}  // namespace orlab
