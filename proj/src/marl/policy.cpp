#include "orlab/marl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orlab {

Encoder::Encoder(const SimConfig& cfg)
    : num_classes_(cfg.num_classes()),
      num_ors_(cfg.num_ors),
      horizon_(cfg.horizon) {
  dim_ = 1 + 2 * num_classes_ + num_ors_ * (num_classes_ + 3) + num_ors_ +
         (num_classes_ + 1);
  expected_slots_.resize(static_cast<std::size_t>(num_classes_) + 1, 0);
  for (int k = 1; k <= num_classes_; ++k)
    expected_slots_[static_cast<std::size_t>(k)] =
        std::max(1, static_cast<int>(std::ceil(cfg.cls(k).mean_duration())));
}

void Encoder::encode_base(const GlobalState& state, const Roster& roster,
                          const QueueView* view, std::vector<double>& out) const {
  out.assign(static_cast<std::size_t>(dim_), 0.0);
  const double T = static_cast<double>(horizon_);
  out[0] = static_cast<double>(state.clock) / T;
  for (int k = 1; k <= num_classes_; ++k) {
    const std::size_t qi = static_cast<std::size_t>(k - 1);
    const int cnt = view ? view->count(k) : static_cast<int>(state.queues[qi].size());
    const int head = view ? view->head(k)
                          : (state.queues[qi].empty() ? -1 : state.queues[qi].front());
    out[static_cast<std::size_t>(1 + 2 * (k - 1))] = static_cast<double>(cnt) / 10.0;
    double gap = 0.0;
    if (head >= 0) {
      const Patient& p = roster.patient(head);
      gap = p.elective() ? static_cast<double>(*p.reference_slot - state.clock)
                         : static_cast<double>(state.clock - p.arrival_slot);
    }
    out[static_cast<std::size_t>(2 + 2 * (k - 1))] = gap / T;
  }
  const int stride = num_classes_ + 3;
  const int base = 1 + 2 * num_classes_;
  for (int j = 0; j < num_ors_; ++j) {
    const ORStatus& st = state.ors[static_cast<std::size_t>(j)];
    const std::size_t off = static_cast<std::size_t>(base + j * stride);
    if (st.busy(state.clock)) {
      out[off] = 1.0;
      int resid;
      if (st.current_patient >= 0) {
        // The realized duration is not observable mid-case; estimate the
        // residual from the expected class duration, at least one slot.
        const int k = roster.patient(st.current_patient).class_id;
        const int elapsed = state.clock - st.current_start;
        resid = std::max(
            st.current_setup + expected_slots_[static_cast<std::size_t>(k)] - elapsed, 1);
      } else {
        resid = st.busy_until - state.clock;  // post-finalize states only
      }
      out[off + 1] = static_cast<double>(resid) / T;
    }
    const int last = st.last_class ? *st.last_class : 0;  // 0 = fresh
    out[off + 2 + static_cast<std::size_t>(last)] = 1.0;
  }
}

void Encoder::encode_critic(const GlobalState& state, const Roster& roster,
                            std::vector<double>& out) const {
  encode_base(state, roster, nullptr, out);
}

void Encoder::encode_agent(const GlobalState& state, const Roster& roster, int or_id,
                           const QueueView& view, const JointAction& partial,
                           std::vector<double>& out) const {
  encode_base(state, roster, &view, out);
  const std::size_t agents = static_cast<std::size_t>(1 + 2 * num_classes_ +
                                                      num_ors_ * (num_classes_ + 3));
  out[agents + static_cast<std::size_t>(or_id)] = 1.0;
  const std::size_t hist = agents + static_cast<std::size_t>(num_ors_);
  for (int r = 0; r < or_id; ++r)
    out[hist + static_cast<std::size_t>(partial[static_cast<std::size_t>(r)])] +=
        1.0 / static_cast<double>(num_ors_);
}

std::vector<std::uint8_t> Encoder::mask(const QueueView& view) const {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(num_classes_) + 1, 0);
  m[0] = 1;
  for (int k = 1; k <= num_classes_; ++k)
    m[static_cast<std::size_t>(k)] = view.count(k) > 0 ? 1 : 0;
  return m;
}

MaskedCategorical masked_categorical(const std::vector<double>& logits,
                                     const std::vector<std::uint8_t>& mask) {
  MaskedCategorical dist;
  const std::size_t n = logits.size();
  dist.probs.assign(n, 0.0);
  dist.logps.assign(n, -std::numeric_limits<double>::infinity());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i] && logits[i] > mx) mx = logits[i];
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) z += std::exp(logits[i] - mx);
  const double logz = std::log(z);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;  // masked entries stay exactly zero
    dist.logps[i] = logits[i] - mx - logz;
    dist.probs[i] = std::exp(dist.logps[i]);
  }
  return dist;
}

int sample_action(const MaskedCategorical& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_feasible = 0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    last_feasible = static_cast<int>(i);
    acc += dist.probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return last_feasible;  // u landed in the rounding sliver at the top
}

int argmax_action(const MaskedCategorical& dist) {
  int best = 0;
  double bp = -1.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i)
    if (dist.probs[i] > bp) {
      bp = dist.probs[i];
      best = static_cast<int>(i);
    }
  return best;
}

double entropy(const MaskedCategorical& dist) {
  double h = 0.0;
  for (double p : dist.probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

ActorCritic::ActorCritic(int obs_dim, int num_actions, const PpoConfig& ppo,
                         std::uint64_t seed)
    : actor({obs_dim, ppo.hidden1, ppo.hidden2, num_actions}, derive_seed(seed, 1), 0.01),
      critic({obs_dim, ppo.hidden1, ppo.hidden2, 1}, derive_seed(seed, 2)) {}

MarlStepPolicy::MarlStepPolicy(const ActorCritic& ac, const SimConfig& cfg, bool greedy,
                               std::uint64_t sample_seed)
    : ac_(&ac), enc_(cfg), greedy_(greedy), rng_(sample_seed) {}

JointAction MarlStepPolicy::decide(const GlobalState& state, const Roster& roster,
                                   const SimConfig& cfg) {
  JointAction action(static_cast<std::size_t>(cfg.num_ors), 0);
  QueueView view(state);
  std::vector<double> obs;
  for (int j = 0; j < cfg.num_ors; ++j) {
    if (state.ors[static_cast<std::size_t>(j)].busy(state.clock)) continue;
    enc_.encode_agent(state, roster, j, view, action, obs);
    const auto dist = masked_categorical(ac_->actor.forward(obs), enc_.mask(view));
    const int a = greedy_ ? argmax_action(dist) : sample_action(dist, rng_);
    action[static_cast<std::size_t>(j)] = a;
    if (a > 0) view.consume(a);
  }
  return action;
}

}  // namespace orlab
