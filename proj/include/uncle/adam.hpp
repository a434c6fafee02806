#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uncle/tensor.hpp"

namespace uncle {

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update over all params. Gradients must be
// populated and are left untouched; the caller zeroes them.
void adam_step(std::span<const Var> params, std::span<AdamState> states, const AdamOptions& opt);

std::vector<AdamState> make_adam_states(std::span<const Var> params);

}  // namespace uncle
