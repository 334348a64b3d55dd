#include "nlcoh/nn/adam.hpp"

#include <cmath>
#include <string>

#include "nlcoh/error.hpp"

namespace nlcoh {

void adam_step(AdamState& s, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size() || s.m.size() != params.size() || s.v.size() != params.size())
    throw InvalidInput("adam_step: parameter, gradient and moment sizes differ");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      throw DivergenceError("non-finite gradient at parameter " + std::to_string(i));

  const AdamConfig& c = s.config;
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * g;
    s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = s.m[i] / correction1;
    const double v_hat = s.v[i] / correction2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace nlcoh
