#include "ecall/optimizer.hpp"

#include <cmath>

#include "ecall/errors.hpp"

namespace ecall {

AdamW::AdamW(std::size_t parameter_count, AdamWConfig cfg)
    : cfg_(cfg), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DimensionMismatch("optimizer state does not match parameter count");
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g * g;
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= cfg_.learning_rate *
                 (m_hat / (std::sqrt(v_hat) + cfg_.epsilon) + cfg_.weight_decay * params[i]);
  }
}

}  // namespace ecall
