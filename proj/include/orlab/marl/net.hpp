#pragma once
// Minimal dense-network core for the learned dispatcher: a tanh MLP with
// hand-written reverse-mode gradients and an Adam optimizer. Parameters and
// gradients live in single flat vectors so tests can finite-difference any
// coordinate and checkpoints can stream them out verbatim. Forward/backward
// work on one sample at a time (the nets are ~30k parameters; per-sample
// loops vectorize fine and keep the cache code obvious).

#include <cstdint>
#include <vector>

#include "orlab/rng.hpp"

namespace orlab {

class Mlp {
 public:
  // sizes = {in, hidden..., out}; tanh on every layer except the last.
  // final_scale shrinks the last layer's init (0.01 for the actor head keeps
  // the initial policy near uniform over feasible actions).
  Mlp(std::vector<int> sizes, std::uint64_t seed, double final_scale = 1.0);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& grads() { return grads_; }
  void zero_grad();

  // Activations kept for the backward pass: acts[0] is the input, acts[l]
  // for hidden layers is the post-tanh output, acts.back() the raw output.
  struct Cache {
    std::vector<std::vector<double>> acts;
  };

  std::vector<double> forward(const std::vector<double>& x, Cache* cache = nullptr) const;

  // Accumulates dLoss/dparam into grads() given dLoss/doutput; call
  // zero_grad() at minibatch start, not between samples.
  void backward(const Cache& cache, const std::vector<double>& dout);

 private:
  std::size_t weight_offset(std::size_t layer) const { return w_off_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return b_off_[layer]; }

  std::vector<int> sizes_;
  std::vector<std::size_t> w_off_, b_off_;  // per layer into the flat vectors
  std::vector<double> params_, grads_;
};

class Adam {
 public:
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(std::vector<double>& params, const std::vector<double>& grads);

  double lr() const { return lr_; }
  // Exposed for checkpointing so training resumes with intact moments.
  std::vector<double>& m() { return m_; }
  std::vector<double>& v() { return v_; }
  long& t() { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace orlab
