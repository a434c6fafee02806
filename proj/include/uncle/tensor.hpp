#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uncle/rng.hpp"

namespace uncle {

class Tensor;
using Var = std::shared_ptr<Tensor>;

// A dense multi-dimensional array of doubles participating in a reverse-mode
// computation graph. Values are immutable once produced by an op; only grad
// is mutated (accumulated) during backward().
class Tensor {
 public:
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;  // allocated lazily, same length as values
  bool requires_grad = false;

  // Graph edges; empty for leaves/constants.
  std::vector<Var> inputs;
  std::function<void(Tensor&)> backprop;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

  void ensure_grad();
  void zero_grad();
};

// Leaf constructors.
Var make_param(std::vector<int> shape, std::vector<double> values);
Var make_const(std::vector<int> shape, std::vector<double> values);
Var zeros_param(std::vector<int> shape);

// --- Forward ops (all differentiable w.r.t. inputs with requires_grad) ---

// Causal 1-D convolution with left zero-padding of (K-1)*dilation so the
// output length equals T. Input is [C_in, T] or [B, C_in, T]; weight is
// [C_out, C_in, K] with taps in time order (weight[..., K-1] is the
// current-time tap); bias is [C_out].
Var causal_conv1d(const Var& input, const Var& weight, const Var& bias, int dilation);

Var relu(const Var& x);
Var add(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double c);

// Inverted dropout: in training mode zeroes elements with probability rate
// and scales survivors by 1/(1-rate); identity in eval mode.
Var dropout(const Var& x, double rate, bool training, Rng& rng);

// matrix [N, N] times vector [N].
Var matvec(const Var& matrix, const Var& vector);

// Mean over all elements of squared difference.
Var mse(const Var& pred, const Var& target);

// Sum of |v| over all elements of all tensors; subgradient 0 at exact zeros.
Var l1_sum(std::span<const Var> tensors);

// Lagged channel-wise linear mixing across variables (a batched matvec):
// z is [N, C, T], psi is [C, L, N, N]; output [N, C, T-L] with
//   out[i, c, t] = sum_{l=1..L} sum_j psi[c, l-1, i, j] * z[j, c, t+L-l],
// i.e. output index t predicts time t+L from the L preceding latent steps.
Var lagged_mix(const Var& z, const Var& psi);

// Stacks N tensors of shape [C, T] into [N, C, T].
Var stack_rows(std::span<const Var> rows);

// Extracts row b of a [B, C, T] tensor as [C, T].
Var take_row(const Var& x, int b);

// Slice along the last (time) axis: columns [t0, t0 + len).
Var slice_time(const Var& x, int t0, int len);

// Reverse-mode sweep from a scalar loss; gradients accumulate into every
// reachable tensor with requires_grad.
void backward(const Var& loss);

void zero_grads(std::span<const Var> params);

// Throws std::invalid_argument on violated op contracts.
[[noreturn]] void contract_violation(const std::string& what);

}  // namespace uncle
