#include "orlab/marl/net.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace orlab {

Mlp::Mlp(std::vector<int> sizes, std::uint64_t seed, double final_scale)
    : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least in/out sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_off_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l + 1]);
    b_off_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]);
  }
  params_.assign(total, 0.0);
  grads_.assign(total, 0.0);

  // Xavier-uniform; biases zero. The last layer optionally scaled down.
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    if (l + 2 == sizes_.size()) a *= final_scale;
    double* w = params_.data() + w_off_[l];
    const std::size_t n = static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out);
    for (std::size_t i = 0; i < n; ++i) w[i] = a * (2.0 * rng.uniform() - 1.0);
  }
}

void Mlp::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

std::vector<double> Mlp::forward(const std::vector<double>& x, Cache* cache) const {
  if (static_cast<int>(x.size()) != sizes_.front())
    throw std::invalid_argument("Mlp::forward: bad input dim");
  if (cache) {
    cache->acts.clear();
    cache->acts.push_back(x);
  }
  std::vector<double> cur = x;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + w_off_[l];
    const double* b = params_.data() + b_off_[l];
    std::vector<double> next(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      double acc = b[o];
      for (int i = 0; i < in; ++i) acc += row[i] * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = acc;
    }
    if (l + 2 < sizes_.size())
      for (double& v : next) v = std::tanh(v);
    if (cache) cache->acts.push_back(next);
    cur = std::move(next);
  }
  return cur;
}

void Mlp::backward(const Cache& cache, const std::vector<double>& dout) {
  if (cache.acts.size() != sizes_.size())
    throw std::invalid_argument("Mlp::backward: cache does not match net");
  std::vector<double> dz = dout;  // gradient w.r.t. the layer's pre-activation
  for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    // Hidden layers stored post-tanh: fold in the activation derivative.
    if (l + 2 < sizes_.size()) {
      const std::vector<double>& y = cache.acts[l + 1];
      for (int o = 0; o < out; ++o)
        dz[static_cast<std::size_t>(o)] *= 1.0 - y[static_cast<std::size_t>(o)] * y[static_cast<std::size_t>(o)];
    }
    const std::vector<double>& x = cache.acts[l];
    double* dw = grads_.data() + w_off_[l];
    double* db = grads_.data() + b_off_[l];
    const double* w = params_.data() + w_off_[l];
    std::vector<double> dx(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double g = dz[static_cast<std::size_t>(o)];
      if (g == 0.0) continue;
      double* dwrow = dw + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      const double* wrow = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      for (int i = 0; i < in; ++i) {
        dwrow[i] += g * x[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(i)] += g * wrow[i];
      }
      db[o] += g;
    }
    dz = std::move(dx);
  }
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

}  // namespace orlab
