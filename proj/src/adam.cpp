#include "uncle/adam.hpp"

#include <cmath>

namespace uncle {

std::vector<AdamState> make_adam_states(std::span<const Var> params) {
  std::vector<AdamState> states(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    states[i].first_moment.assign(params[i]->values.size(), 0.0);
    states[i].second_moment.assign(params[i]->values.size(), 0.0);
  }
  return states;
}

void adam_step(std::span<const Var> params, std::span<AdamState> states, const AdamOptions& opt) {
  if (params.size() != states.size()) contract_violation("adam param/state count mismatch");
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    AdamState& s = states[p];
    if (t.grad.size() != t.values.size()) contract_violation("adam_step on param with missing grad");
    if (s.first_moment.size() != t.values.size() || s.second_moment.size() != t.values.size())
      contract_violation("adam state length does not match param");
    s.step_count += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(s.step_count));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(s.step_count));
    const std::size_t n = t.values.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = t.grad[i];
      s.first_moment[i] = opt.beta1 * s.first_moment[i] + (1.0 - opt.beta1) * g;
      s.second_moment[i] = opt.beta2 * s.second_moment[i] + (1.0 - opt.beta2) * g * g;
      const double m_hat = s.first_moment[i] / bc1;
      const double v_hat = s.second_moment[i] / bc2;
      t.values[i] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
    }
  }
}

}  // namespace uncle
