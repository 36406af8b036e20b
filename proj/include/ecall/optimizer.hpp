#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecall {

// Adaptive-moment optimizer with decoupled weight decay:
//   p <- p - lr * ( m^ / (sqrt(v^) + eps) + weight_decay * p ).
struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

class AdamW {
 public:
  AdamW() = default;
  AdamW(std::size_t parameter_count, AdamWConfig cfg);

  void step(std::span<double> params, std::span<const double> grads);

  long step_count() const { return step_; }
  const AdamWConfig& config() const { return cfg_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamWConfig cfg_;
  std::vector<double> m_, v_;
  long step_ = 0;
};

}  // namespace ecall
