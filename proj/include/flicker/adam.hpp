#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace flicker {

// Adam (Kingma & Ba) over a fixed list of parameter tensors. Owns its
// moment estimates; the caller owns the parameters.
class Adam {
 public:
  struct Options {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam(std::vector<std::size_t> tensor_sizes, Options opt) : opt_(opt) {
    for (std::size_t n : tensor_sizes) {
      m_.emplace_back(n, 0.0);
      v_.emplace_back(n, 0.0);
    }
  }

  template <class Params, class Grads>
  void step(Params&& params, const Grads& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < m_.size(); ++k) {
      auto p = params[k];
      auto g = grads[k];
      for (std::size_t i = 0; i < m_[k].size(); ++i) {
        m_[k][i] = opt_.beta1 * m_[k][i] + (1.0 - opt_.beta1) * g[i];
        v_[k][i] = opt_.beta2 * v_[k][i] + (1.0 - opt_.beta2) * g[i] * g[i];
        p[i] -= opt_.learning_rate * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + opt_.epsilon);
      }
    }
  }

  std::size_t steps() const { return t_; }

 private:
  Options opt_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace flicker
