#include "orlab/marl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "orlab/simenv.hpp"

namespace orlab {

std::vector<double> compute_gae(const std::vector<double>& rewards,
                                const std::vector<double>& values, double gamma,
                                double lambda) {
  if (values.size() != rewards.size() + 1)
    throw std::invalid_argument("compute_gae: values must have one extra entry");
  std::vector<double> adv(rewards.size(), 0.0);
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    const double delta = rewards[t] + gamma * values[t + 1] - values[t];
    running = delta + gamma * lambda * running;
    adv[t] = running;
  }
  return adv;
}

RolloutBatch collect_rollouts(const SimConfig& cfg, const PreSchedule& plan,
                              const ActorCritic& ac, int episodes,
                              std::uint64_t roster_seed_base,
                              std::uint64_t action_seed_base) {
  RolloutBatch batch;
  batch.episodes = episodes;
  const Encoder enc(cfg);
  const double scale = cfg.ppo.reward_scale;
  std::vector<double> obs;

  for (int e = 0; e < episodes; ++e) {
    Episode ep(cfg, plan, derive_seed(roster_seed_base, static_cast<std::uint64_t>(e)));
    Rng action_rng(derive_seed(action_seed_base, static_cast<std::uint64_t>(e)));

    const std::size_t first_sample = batch.policy.size();
    std::vector<int> sample_epoch;           // parallel to new policy samples
    std::vector<std::vector<double>> critic_obs;
    critic_obs.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    std::vector<double> rewards;
    rewards.reserve(static_cast<std::size_t>(cfg.horizon) + 1);

    while (!ep.done()) {
      const int t = ep.state().clock;
      critic_obs.emplace_back();
      enc.encode_critic(ep.state(), ep.roster(), critic_obs.back());

      JointAction action(static_cast<std::size_t>(cfg.num_ors), 0);
      QueueView view(ep.state());
      for (int j = 0; j < cfg.num_ors; ++j) {
        if (ep.state().ors[static_cast<std::size_t>(j)].busy(t)) continue;
        enc.encode_agent(ep.state(), ep.roster(), j, view, action, obs);
        auto mask = enc.mask(view);
        const auto dist = masked_categorical(ac.actor.forward(obs), mask);
        const int a = sample_action(dist, action_rng);
        action[static_cast<std::size_t>(j)] = a;
        if (a > 0) view.consume(a);
        PolicySample s;
        s.obs = obs;
        s.mask = std::move(mask);
        s.action = a;
        s.logp_old = dist.logps[static_cast<std::size_t>(a)];
        batch.policy.push_back(std::move(s));
        sample_epoch.push_back(t);
      }
      const StepResult sr = ep.step(action);
      rewards.push_back(sr.team_reward * scale);
    }
    // Encode the end-of-day state before finalize() so room occupancy still
    // carries the in-progress cases the terminal penalty will charge for.
    critic_obs.emplace_back();
    enc.encode_critic(ep.state(), ep.roster(), critic_obs.back());
    ep.finalize();
    rewards.push_back(ep.terminal() * scale);  // terminal pseudo-step

    std::vector<double> values(critic_obs.size() + 1, 0.0);
    for (std::size_t i = 0; i < critic_obs.size(); ++i)
      values[i] = ac.critic.forward(critic_obs[i])[0];
    const std::vector<double> adv = compute_gae(rewards, values, cfg.ppo.discount,
                                                cfg.ppo.gae_lambda);

    for (std::size_t i = 0; i < sample_epoch.size(); ++i)
      batch.policy[first_sample + i].advantage =
          adv[static_cast<std::size_t>(sample_epoch[i])];
    for (std::size_t i = 0; i < critic_obs.size(); ++i) {
      CriticSample c;
      c.obs = std::move(critic_obs[i]);
      c.target = adv[i] + values[i];
      batch.critic.push_back(std::move(c));
    }

    double day = ep.terminal();
    for (double r : ep.team_rewards()) day += r;
    batch.mean_day_reward += day;
  }
  if (episodes > 0) batch.mean_day_reward /= static_cast<double>(episodes);
  return batch;
}

namespace {

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
}

}  // namespace

UpdateStats ppo_update(ActorCritic& ac, Adam& actor_opt, Adam& critic_opt,
                       const RolloutBatch& batch, const PpoConfig& ppo,
                       double entropy_coeff, Rng& shuffle_rng) {
  UpdateStats stats;
  long policy_terms = 0, value_terms = 0, clip_terms = 0;
  const std::size_t B = static_cast<std::size_t>(std::max(1, ppo.minibatch_size));

  std::vector<std::size_t> pidx(batch.policy.size());
  std::iota(pidx.begin(), pidx.end(), 0u);
  std::vector<std::size_t> cidx(batch.critic.size());
  std::iota(cidx.begin(), cidx.end(), 0u);

  Mlp::Cache cache;
  std::vector<double> dout;

  for (int pass = 0; pass < ppo.updates_per_iteration; ++pass) {
    shuffle_indices(pidx, shuffle_rng);
    for (std::size_t lo = 0; lo < pidx.size(); lo += B) {
      const std::size_t hi = std::min(lo + B, pidx.size());
      const double n = static_cast<double>(hi - lo);
      // Per-minibatch advantage normalization.
      double mean = 0.0;
      for (std::size_t i = lo; i < hi; ++i) mean += batch.policy[pidx[i]].advantage;
      mean /= n;
      double var = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double d = batch.policy[pidx[i]].advantage - mean;
        var += d * d;
      }
      const double sd = std::sqrt(var / n) + 1e-8;

      ac.actor.zero_grad();
      for (std::size_t i = lo; i < hi; ++i) {
        const PolicySample& s = batch.policy[pidx[i]];
        const double a_norm = (s.advantage - mean) / sd;
        const auto logits = ac.actor.forward(s.obs, &cache);
        const auto dist = masked_categorical(logits, s.mask);
        const double logp = dist.logps[static_cast<std::size_t>(s.action)];
        const double ratio = std::exp(logp - s.logp_old);
        const double unclipped = ratio * a_norm;
        const double clipped =
            std::clamp(ratio, 1.0 - ppo.clip_eps, 1.0 + ppo.clip_eps) * a_norm;
        const double h = entropy(dist);
        stats.policy_loss += -std::min(unclipped, clipped);
        stats.entropy += h;
        ++policy_terms;
        // min picks the clipped branch => zero gradient through the ratio.
        const bool active = unclipped <= clipped;
        if (!active) ++clip_terms;
        const double coef = active ? -a_norm * ratio : 0.0;
        dout.assign(logits.size(), 0.0);
        for (std::size_t k = 0; k < logits.size(); ++k) {
          if (!s.mask[k]) continue;
          const double pk = dist.probs[k];
          const double logpk = dist.logps[k];
          double g = coef * ((static_cast<int>(k) == s.action ? 1.0 : 0.0) - pk);
          g += entropy_coeff * pk * (logpk + h);  // d(-coeff*H)/dz_k
          dout[k] = g / n;
        }
        ac.actor.backward(cache, dout);
      }
      actor_opt.step(ac.actor.params(), ac.actor.grads());
    }

    shuffle_indices(cidx, shuffle_rng);
    for (std::size_t lo = 0; lo < cidx.size(); lo += B) {
      const std::size_t hi = std::min(lo + B, cidx.size());
      const double n = static_cast<double>(hi - lo);
      ac.critic.zero_grad();
      for (std::size_t i = lo; i < hi; ++i) {
        const CriticSample& s = batch.critic[cidx[i]];
        const double v = ac.critic.forward(s.obs, &cache)[0];
        const double err = v - s.target;
        stats.value_loss += err * err;
        ++value_terms;
        dout.assign(1, 2.0 * err / n);
        ac.critic.backward(cache, dout);
      }
      critic_opt.step(ac.critic.params(), ac.critic.grads());
    }
  }

  if (policy_terms > 0) {
    stats.policy_loss /= static_cast<double>(policy_terms);
    stats.entropy /= static_cast<double>(policy_terms);
    stats.clip_fraction = static_cast<double>(clip_terms) / static_cast<double>(policy_terms);
  }
  if (value_terms > 0) stats.value_loss /= static_cast<double>(value_terms);
  return stats;
}

namespace {

void write_doubles(std::ofstream& out, const std::vector<double>& xs) {
  char buf[64];
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
}

void read_doubles(std::ifstream& in, std::vector<double>& xs, std::size_t n,
                  const char* what) {
  xs.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(in >> xs[i]))
      throw ConfigError(std::string("checkpoint: truncated ") + what + " section");
}

}  // namespace

void save_checkpoint(const std::string& path, const ActorCritic& ac, Adam& actor_opt,
                     Adam& critic_opt, int iteration, const SimConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("checkpoint: cannot write " + path);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  out << "orlab-checkpoint v1\n";
  out << "config " << hash << "\n";
  out << "dims " << ac.actor.input_dim() << ' ' << ac.actor.output_dim() << ' '
      << cfg.ppo.hidden1 << ' ' << cfg.ppo.hidden2 << "\n";
  out << "iteration " << iteration << "\n";
  out << "actor " << ac.actor.params().size() << "\n";
  write_doubles(out, ac.actor.params());
  out << "critic " << ac.critic.params().size() << "\n";
  write_doubles(out, ac.critic.params());
  out << "adam_actor " << actor_opt.t() << ' ' << actor_opt.m().size() << "\n";
  write_doubles(out, actor_opt.m());
  write_doubles(out, actor_opt.v());
  out << "adam_critic " << critic_opt.t() << ' ' << critic_opt.m().size() << "\n";
  write_doubles(out, critic_opt.m());
  write_doubles(out, critic_opt.v());
  out << "end\n";
  if (!out) throw ConfigError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path, const SimConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("checkpoint: cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (line != "orlab-checkpoint v1")
    throw ConfigError("checkpoint: bad magic in " + path);

  std::string word, hash;
  in >> word >> hash;
  if (word != "config") throw ConfigError("checkpoint: missing config line");
  char expect[32];
  std::snprintf(expect, sizeof expect, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  if (hash != expect)
    throw ConfigError("checkpoint: config hash mismatch (file " + hash +
                      ", current config " + expect + ")");

  int obs = 0, actions = 0, h1 = 0, h2 = 0;
  in >> word >> obs >> actions >> h1 >> h2;
  if (word != "dims") throw ConfigError("checkpoint: missing dims line");
  const Encoder enc(cfg);
  if (obs != enc.dim() || actions != enc.num_actions() || h1 != cfg.ppo.hidden1 ||
      h2 != cfg.ppo.hidden2)
    throw ConfigError("checkpoint: network dimensions do not match the config");

  Checkpoint ck{ActorCritic(obs, actions, cfg.ppo, 0),
                Adam(0, cfg.ppo.actor_lr), Adam(0, cfg.ppo.critic_lr), 0};
  in >> word >> ck.iteration;
  if (word != "iteration") throw ConfigError("checkpoint: missing iteration line");

  std::size_t n = 0;
  in >> word >> n;
  if (word != "actor" || n != ck.ac.actor.params().size())
    throw ConfigError("checkpoint: bad actor section");
  read_doubles(in, ck.ac.actor.params(), n, "actor");
  in >> word >> n;
  if (word != "critic" || n != ck.ac.critic.params().size())
    throw ConfigError("checkpoint: bad critic section");
  read_doubles(in, ck.ac.critic.params(), n, "critic");

  long t = 0;
  in >> word >> t >> n;
  if (word != "adam_actor" || n != ck.ac.actor.params().size())
    throw ConfigError("checkpoint: bad adam_actor section");
  ck.actor_opt = Adam(n, cfg.ppo.actor_lr);
  ck.actor_opt.t() = t;
  read_doubles(in, ck.actor_opt.m(), n, "adam_actor.m");
  read_doubles(in, ck.actor_opt.v(), n, "adam_actor.v");

  in >> word >> t >> n;
  if (word != "adam_critic" || n != ck.ac.critic.params().size())
    throw ConfigError("checkpoint: bad adam_critic section");
  ck.critic_opt = Adam(n, cfg.ppo.critic_lr);
  ck.critic_opt.t() = t;
  read_doubles(in, ck.critic_opt.m(), n, "adam_critic.m");
  read_doubles(in, ck.critic_opt.v(), n, "adam_critic.v");

  in >> word;
  if (word != "end") throw ConfigError("checkpoint: missing end marker");
  return ck;
}

TrainResult train(const SimConfig& cfg, const TrainOptions& opt) {
  const PreSchedule plan = build_preschedule(cfg);
  const Encoder enc(cfg);
  const int iterations =
      opt.iterations_override > 0 ? opt.iterations_override : cfg.ppo.iterations;

  ActorCritic ac(enc.dim(), enc.num_actions(), cfg.ppo, derive_seed(opt.seed, 11));
  Adam actor_opt(ac.actor.params().size(), cfg.ppo.actor_lr);
  Adam critic_opt(ac.critic.params().size(), cfg.ppo.critic_lr);

  TrainResult res;
  res.iterations = iterations;
  res.best_val_reward = -1e300;
  res.curves_path = opt.outdir + "/curves.csv";
  res.best_path = opt.outdir + "/best.ckpt";
  res.last_path = opt.outdir + "/last.ckpt";

  std::ofstream curves(res.curves_path);
  if (!curves) throw ConfigError("train: cannot write " + res.curves_path);
  curves << "iteration,entropy_coeff,train_day_reward,policy_loss,value_loss,"
            "entropy,clip_fraction,val_day_reward\n";

  // Fixed validation days (common random numbers across the whole run).
  std::vector<std::uint64_t> val_seeds;
  for (int v = 0; v < cfg.ppo.validation_episodes; ++v)
    val_seeds.push_back(derive_seed(derive_seed(opt.seed, 77), static_cast<std::uint64_t>(v)));

  Rng shuffle_rng(derive_seed(opt.seed, 13));
  for (int it = 0; it < iterations; ++it) {
    const double ent = cfg.ppo.entropy_coeff *
                       (1.0 - static_cast<double>(it) / static_cast<double>(iterations));
    const RolloutBatch batch =
        collect_rollouts(cfg, plan, ac, cfg.ppo.episodes_per_iteration,
                         derive_seed(opt.seed, 1000003ULL + static_cast<std::uint64_t>(it)),
                         derive_seed(opt.seed, 2000003ULL + static_cast<std::uint64_t>(it)));
    const UpdateStats st =
        ppo_update(ac, actor_opt, critic_opt, batch, cfg.ppo, ent, shuffle_rng);
    res.final_train_reward = batch.mean_day_reward;

    const bool validate =
        (it + 1) % cfg.ppo.validation_interval == 0 || it + 1 == iterations;
    double val = 0.0;
    if (validate) {
      MarlStepPolicy greedy(ac, cfg, /*greedy=*/true);
      for (std::uint64_t s : val_seeds)
        val += run_episode(cfg, plan, s, greedy).streamed_total;
      val /= static_cast<double>(val_seeds.size());
      if (val > res.best_val_reward) {
        res.best_val_reward = val;
        save_checkpoint(res.best_path, ac, actor_opt, critic_opt, it + 1, cfg);
      }
    }

    curves << it + 1 << ',' << ent << ',' << batch.mean_day_reward << ','
           << st.policy_loss << ',' << st.value_loss << ',' << st.entropy << ','
           << st.clip_fraction << ',';
    if (validate) curves << val;
    curves << '\n';
    curves.flush();
    if (opt.log) {
      (*opt.log) << "iter " << it + 1 << "/" << iterations << " reward "
                 << batch.mean_day_reward << " ploss " << st.policy_loss << " vloss "
                 << st.value_loss << " ent " << st.entropy;
      if (validate) (*opt.log) << " val " << val;
      (*opt.log) << std::endl;
    }
  }
  save_checkpoint(res.last_path, ac, actor_opt, critic_opt, iterations, cfg);
  return res;
}

}  // namespace orlab
