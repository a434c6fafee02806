#include "uncle/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace uncle {

namespace {

std::int64_t shape_size(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) contract_violation("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

Var make_op(std::vector<int> shape, std::vector<Var> inputs) {
  auto out = std::make_shared<Tensor>(std::move(shape));
  out->inputs = std::move(inputs);
  for (const Var& in : out->inputs) {
    if (in->requires_grad) out->requires_grad = true;
  }
  return out;
}

}  // namespace

void contract_violation(const std::string& what) {
  throw std::invalid_argument("contract violation: " + what);
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  values.assign(static_cast<std::size_t>(shape_size(shape)), 0.0);
}

void Tensor::ensure_grad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() {
  std::fill(grad.begin(), grad.end(), 0.0);
}

Var make_param(std::vector<int> shape, std::vector<double> values) {
  auto t = std::make_shared<Tensor>();
  if (shape_size(shape) != static_cast<std::int64_t>(values.size()))
    contract_violation("value count does not match shape");
  t->shape = std::move(shape);
  t->values = std::move(values);
  t->requires_grad = true;
  return t;
}

Var make_const(std::vector<int> shape, std::vector<double> values) {
  Var t = make_param(std::move(shape), std::move(values));
  t->requires_grad = false;
  return t;
}

Var zeros_param(std::vector<int> shape) {
  auto t = std::make_shared<Tensor>(std::move(shape));
  t->requires_grad = true;
  return t;
}

Var causal_conv1d(const Var& input, const Var& weight, const Var& bias, int dilation) {
  if (weight->rank() != 3) contract_violation("conv weight must be [C_out, C_in, K]");
  const int c_out = weight->dim(0);
  const int c_in = weight->dim(1);
  const int k = weight->dim(2);
  if (k < 1 || dilation < 1) contract_violation("conv requires K >= 1 and dilation >= 1");
  if (bias->rank() != 1 || bias->dim(0) != c_out) contract_violation("conv bias must be [C_out]");

  int batch = 1;
  int t_len = 0;
  std::vector<int> out_shape;
  if (input->rank() == 2) {
    if (input->dim(0) != c_in) contract_violation("conv input channels do not match weight");
    t_len = input->dim(1);
    out_shape = {c_out, t_len};
  } else if (input->rank() == 3) {
    if (input->dim(1) != c_in) contract_violation("conv input channels do not match weight");
    batch = input->dim(0);
    t_len = input->dim(2);
    out_shape = {batch, c_out, t_len};
  } else {
    contract_violation("conv input must be [C_in, T] or [B, C_in, T]");
  }

  Var out = make_op(std::move(out_shape), {input, weight, bias});
  const double* in = input->values.data();
  const double* w = weight->values.data();
  const double* bs = bias->values.data();
  double* o = out->values.data();
  const int t_n = t_len;
  for (int b = 0; b < batch; ++b) {
    for (int co = 0; co < c_out; ++co) {
      double* orow = o + (static_cast<std::size_t>(b) * c_out + co) * t_n;
      std::fill(orow, orow + t_n, bs[co]);
      for (int ci = 0; ci < c_in; ++ci) {
        const double* irow = in + (static_cast<std::size_t>(b) * c_in + ci) * t_n;
        const double* wrow = w + (static_cast<std::size_t>(co) * c_in + ci) * k;
        for (int tap = 0; tap < k; ++tap) {
          const double wv = wrow[tap];
          if (wv == 0.0) continue;
          const int off = (k - 1 - tap) * dilation;
          const int start = std::min(off, t_n);
          for (int t = start; t < t_n; ++t) orow[t] += wv * irow[t - off];
        }
      }
    }
  }

  out->backprop = [batch, c_out, c_in, k, t_n, dilation](Tensor& node) {
    const Var& xin = node.inputs[0];
    const Var& wvar = node.inputs[1];
    const Var& bvar = node.inputs[2];
    const double* g = node.grad.data();
    if (xin->requires_grad) {
      xin->ensure_grad();
      const double* w = wvar->values.data();
      double* gx = xin->grad.data();
      for (int b = 0; b < batch; ++b) {
        for (int co = 0; co < c_out; ++co) {
          const double* grow = g + (static_cast<std::size_t>(b) * c_out + co) * t_n;
          for (int ci = 0; ci < c_in; ++ci) {
            double* gxrow = gx + (static_cast<std::size_t>(b) * c_in + ci) * t_n;
            const double* wrow = w + (static_cast<std::size_t>(co) * c_in + ci) * k;
            for (int tap = 0; tap < k; ++tap) {
              const double wv = wrow[tap];
              if (wv == 0.0) continue;
              const int off = (k - 1 - tap) * dilation;
              const int start = std::min(off, t_n);
              for (int t = start; t < t_n; ++t) gxrow[t - off] += wv * grow[t];
            }
          }
        }
      }
    }
    if (wvar->requires_grad) {
      wvar->ensure_grad();
      const double* in = xin->values.data();
      double* gw = wvar->grad.data();
      for (int b = 0; b < batch; ++b) {
        for (int co = 0; co < c_out; ++co) {
          const double* grow = g + (static_cast<std::size_t>(b) * c_out + co) * t_n;
          for (int ci = 0; ci < c_in; ++ci) {
            const double* irow = in + (static_cast<std::size_t>(b) * c_in + ci) * t_n;
            double* gwrow = gw + (static_cast<std::size_t>(co) * c_in + ci) * k;
            for (int tap = 0; tap < k; ++tap) {
              const int off = (k - 1 - tap) * dilation;
              const int start = std::min(off, t_n);
              double acc = 0.0;
              for (int t = start; t < t_n; ++t) acc += grow[t] * irow[t - off];
              gwrow[tap] += acc;
            }
          }
        }
      }
    }
    if (bvar->requires_grad) {
      bvar->ensure_grad();
      double* gb = bvar->grad.data();
      for (int b = 0; b < batch; ++b) {
        for (int co = 0; co < c_out; ++co) {
          const double* grow = g + (static_cast<std::size_t>(b) * c_out + co) * t_n;
          double acc = 0.0;
          for (int t = 0; t < t_n; ++t) acc += grow[t];
          gb[co] += acc;
        }
      }
    }
  };
  return out;
}

Var relu(const Var& x) {
  Var out = make_op(x->shape, {x});
  const std::size_t n = x->values.size();
  for (std::size_t i = 0; i < n; ++i) out->values[i] = x->values[i] > 0.0 ? x->values[i] : 0.0;
  out->backprop = [](Tensor& node) {
    const Var& xin = node.inputs[0];
    if (!xin->requires_grad) return;
    xin->ensure_grad();
    const std::size_t n = node.values.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (xin->values[i] > 0.0) xin->grad[i] += node.grad[i];
    }
  };
  return out;
}

Var add(const Var& a, const Var& b) {
  if (!same_shape(*a, *b)) contract_violation("add requires matching shapes");
  Var out = make_op(a->shape, {a, b});
  const std::size_t n = a->values.size();
  for (std::size_t i = 0; i < n; ++i) out->values[i] = a->values[i] + b->values[i];
  out->backprop = [](Tensor& node) {
    for (const Var& in : node.inputs) {
      if (!in->requires_grad) continue;
      in->ensure_grad();
      const std::size_t n = node.values.size();
      for (std::size_t i = 0; i < n; ++i) in->grad[i] += node.grad[i];
    }
  };
  return out;
}

Var mul(const Var& a, const Var& b) {
  if (!same_shape(*a, *b)) contract_violation("mul requires matching shapes");
  Var out = make_op(a->shape, {a, b});
  const std::size_t n = a->values.size();
  for (std::size_t i = 0; i < n; ++i) out->values[i] = a->values[i] * b->values[i];
  out->backprop = [](Tensor& node) {
    const Var& a = node.inputs[0];
    const Var& b = node.inputs[1];
    const std::size_t n = node.values.size();
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) a->grad[i] += node.grad[i] * b->values[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) b->grad[i] += node.grad[i] * a->values[i];
    }
  };
  return out;
}

Var scale(const Var& x, double c) {
  Var out = make_op(x->shape, {x});
  const std::size_t n = x->values.size();
  for (std::size_t i = 0; i < n; ++i) out->values[i] = c * x->values[i];
  out->backprop = [c](Tensor& node) {
    const Var& xin = node.inputs[0];
    if (!xin->requires_grad) return;
    xin->ensure_grad();
    const std::size_t n = node.values.size();
    for (std::size_t i = 0; i < n; ++i) xin->grad[i] += c * node.grad[i];
  };
  return out;
}

Var dropout(const Var& x, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) contract_violation("dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) {
    // Eval mode is the identity; still a node so graph structure is uniform.
    return scale(x, 1.0);
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  const std::size_t n = x->values.size();
  auto mask = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i)
    (*mask)[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  Var out = make_op(x->shape, {x});
  for (std::size_t i = 0; i < n; ++i) out->values[i] = x->values[i] * (*mask)[i];
  out->backprop = [mask](Tensor& node) {
    const Var& xin = node.inputs[0];
    if (!xin->requires_grad) return;
    xin->ensure_grad();
    const std::size_t n = node.values.size();
    for (std::size_t i = 0; i < n; ++i) xin->grad[i] += node.grad[i] * (*mask)[i];
  };
  return out;
}

Var matvec(const Var& matrix, const Var& vector) {
  if (matrix->rank() != 2 || vector->rank() != 1 || matrix->dim(1) != vector->dim(0) ||
      matrix->dim(0) != matrix->dim(1))
    contract_violation("matvec requires [N, N] matrix and [N] vector");
  const int n = matrix->dim(0);
  Var out = make_op({n}, {matrix, vector});
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += matrix->values[static_cast<std::size_t>(i) * n + j] * vector->values[j];
    out->values[i] = acc;
  }
  out->backprop = [n](Tensor& node) {
    const Var& m = node.inputs[0];
    const Var& v = node.inputs[1];
    if (m->requires_grad) {
      m->ensure_grad();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          m->grad[static_cast<std::size_t>(i) * n + j] += node.grad[i] * v->values[j];
    }
    if (v->requires_grad) {
      v->ensure_grad();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          v->grad[j] += node.grad[i] * m->values[static_cast<std::size_t>(i) * n + j];
    }
  };
  return out;
}

Var mse(const Var& pred, const Var& target) {
  if (!same_shape(*pred, *target)) contract_violation("mse requires matching shapes");
  const std::size_t n = pred->values.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred->values[i] - target->values[i];
    acc += d * d;
  }
  Var out = make_op({1}, {pred, target});
  out->values[0] = acc / static_cast<double>(n);
  out->backprop = [](Tensor& node) {
    const Var& p = node.inputs[0];
    const Var& t = node.inputs[1];
    const std::size_t n = p->values.size();
    const double g = node.grad[0] * 2.0 / static_cast<double>(n);
    if (p->requires_grad) {
      p->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) p->grad[i] += g * (p->values[i] - t->values[i]);
    }
    if (t->requires_grad) {
      t->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) t->grad[i] -= g * (p->values[i] - t->values[i]);
    }
  };
  return out;
}

Var l1_sum(std::span<const Var> tensors) {
  double acc = 0.0;
  std::vector<Var> inputs(tensors.begin(), tensors.end());
  for (const Var& t : inputs)
    for (double v : t->values) acc += std::abs(v);
  Var out = make_op({1}, std::move(inputs));
  out->values[0] = acc;
  out->backprop = [](Tensor& node) {
    const double g = node.grad[0];
    for (const Var& in : node.inputs) {
      if (!in->requires_grad) continue;
      in->ensure_grad();
      const std::size_t n = in->values.size();
      for (std::size_t i = 0; i < n; ++i) {
        const double v = in->values[i];
        if (v > 0.0)
          in->grad[i] += g;
        else if (v < 0.0)
          in->grad[i] -= g;
        // subgradient 0 at exact zeros
      }
    }
  };
  return out;
}

Var lagged_mix(const Var& z, const Var& psi) {
  if (z->rank() != 3 || psi->rank() != 4) contract_violation("lagged_mix requires z [N,C,T] and psi [C,L,N,N]");
  const int n = z->dim(0);
  const int c_n = z->dim(1);
  const int t_n = z->dim(2);
  const int lag = psi->dim(1);
  if (psi->dim(0) != c_n || psi->dim(2) != n || psi->dim(3) != n)
    contract_violation("lagged_mix psi dims do not match z");
  if (t_n <= lag) contract_violation("lagged_mix requires T > L");
  const int t_out = t_n - lag;

  Var out = make_op({n, c_n, t_out}, {z, psi});
  const double* zv = z->values.data();
  const double* pv = psi->values.data();
  double* ov = out->values.data();
  for (int c = 0; c < c_n; ++c) {
    for (int l = 0; l < lag; ++l) {  // l = 0 is lag 1 (most recent step)
      const double* pmat = pv + (static_cast<std::size_t>(c) * lag + l) * n * n;
      const int z_off = lag - 1 - l;  // z time index offset for output index 0
      for (int i = 0; i < n; ++i) {
        double* orow = ov + (static_cast<std::size_t>(i) * c_n + c) * t_out;
        for (int j = 0; j < n; ++j) {
          const double w = pmat[static_cast<std::size_t>(i) * n + j];
          if (w == 0.0) continue;
          const double* zrow = zv + (static_cast<std::size_t>(j) * c_n + c) * t_n + z_off;
          for (int t = 0; t < t_out; ++t) orow[t] += w * zrow[t];
        }
      }
    }
  }

  out->backprop = [n, c_n, t_n, lag, t_out](Tensor& node) {
    const Var& z = node.inputs[0];
    const Var& psi = node.inputs[1];
    const double* g = node.grad.data();
    if (z->requires_grad) {
      z->ensure_grad();
      const double* pv = psi->values.data();
      double* gz = z->grad.data();
      for (int c = 0; c < c_n; ++c) {
        for (int l = 0; l < lag; ++l) {
          const double* pmat = pv + (static_cast<std::size_t>(c) * lag + l) * n * n;
          const int z_off = lag - 1 - l;
          for (int i = 0; i < n; ++i) {
            const double* grow = g + (static_cast<std::size_t>(i) * c_n + c) * t_out;
            for (int j = 0; j < n; ++j) {
              const double w = pmat[static_cast<std::size_t>(i) * n + j];
              if (w == 0.0) continue;
              double* gzrow = gz + (static_cast<std::size_t>(j) * c_n + c) * t_n + z_off;
              for (int t = 0; t < t_out; ++t) gzrow[t] += w * grow[t];
            }
          }
        }
      }
    }
    if (psi->requires_grad) {
      psi->ensure_grad();
      const double* zv = z->values.data();
      double* gp = psi->grad.data();
      for (int c = 0; c < c_n; ++c) {
        for (int l = 0; l < lag; ++l) {
          double* pmat = gp + (static_cast<std::size_t>(c) * lag + l) * n * n;
          const int z_off = lag - 1 - l;
          for (int i = 0; i < n; ++i) {
            const double* grow = g + (static_cast<std::size_t>(i) * c_n + c) * t_out;
            for (int j = 0; j < n; ++j) {
              const double* zrow = zv + (static_cast<std::size_t>(j) * c_n + c) * t_n + z_off;
              double acc = 0.0;
              for (int t = 0; t < t_out; ++t) acc += grow[t] * zrow[t];
              pmat[static_cast<std::size_t>(i) * n + j] += acc;
            }
          }
        }
      }
    }
  };
  return out;
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) contract_violation("stack_rows requires at least one row");
  const auto& first = rows.front();
  if (first->rank() != 2) contract_violation("stack_rows expects [C, T] rows");
  for (const Var& r : rows)
    if (r->shape != first->shape) contract_violation("stack_rows requires identical row shapes");
  const int n = static_cast<int>(rows.size());
  const std::size_t row_len = first->values.size();
  Var out = make_op({n, first->dim(0), first->dim(1)}, {rows.begin(), rows.end()});
  for (int b = 0; b < n; ++b)
    std::copy(rows[b]->values.begin(), rows[b]->values.end(),
              out->values.begin() + static_cast<std::ptrdiff_t>(b * row_len));
  out->backprop = [row_len](Tensor& node) {
    for (std::size_t b = 0; b < node.inputs.size(); ++b) {
      const Var& in = node.inputs[b];
      if (!in->requires_grad) continue;
      in->ensure_grad();
      const double* g = node.grad.data() + b * row_len;
      for (std::size_t i = 0; i < row_len; ++i) in->grad[i] += g[i];
    }
  };
  return out;
}

Var take_row(const Var& x, int b) {
  if (x->rank() != 3) contract_violation("take_row expects a [B, C, T] tensor");
  if (b < 0 || b >= x->dim(0)) contract_violation("take_row index out of range");
  const std::size_t row_len = static_cast<std::size_t>(x->dim(1)) * x->dim(2);
  Var out = make_op({x->dim(1), x->dim(2)}, {x});
  std::copy(x->values.begin() + static_cast<std::ptrdiff_t>(b * row_len),
            x->values.begin() + static_cast<std::ptrdiff_t>((b + 1) * row_len), out->values.begin());
  out->backprop = [b, row_len](Tensor& node) {
    const Var& in = node.inputs[0];
    if (!in->requires_grad) return;
    in->ensure_grad();
    double* g = in->grad.data() + static_cast<std::size_t>(b) * row_len;
    for (std::size_t i = 0; i < row_len; ++i) g[i] += node.grad[i];
  };
  return out;
}

Var slice_time(const Var& x, int t0, int len) {
  if (x->rank() < 1) contract_violation("slice_time needs a tensor");
  const int t_n = x->shape.back();
  if (t0 < 0 || len < 1 || t0 + len > t_n) contract_violation("slice_time range out of bounds");
  std::vector<int> out_shape = x->shape;
  out_shape.back() = len;
  const std::size_t n_rows = static_cast<std::size_t>(x->size() / t_n);
  Var out = make_op(std::move(out_shape), {x});
  for (std::size_t r = 0; r < n_rows; ++r)
    std::copy(x->values.begin() + static_cast<std::ptrdiff_t>(r * t_n + t0),
              x->values.begin() + static_cast<std::ptrdiff_t>(r * t_n + t0 + len),
              out->values.begin() + static_cast<std::ptrdiff_t>(r * len));
  out->backprop = [t0, len, t_n, n_rows](Tensor& node) {
    const Var& in = node.inputs[0];
    if (!in->requires_grad) return;
    in->ensure_grad();
    for (std::size_t r = 0; r < n_rows; ++r) {
      double* g = in->grad.data() + r * t_n + t0;
      const double* og = node.grad.data() + r * len;
      for (int i = 0; i < len; ++i) g[i] += og[i];
    }
  };
  return out;
}

void backward(const Var& loss) {
  if (loss->size() != 1) contract_violation("backward requires a scalar loss");
  // Iterative post-order DFS to get a topological order.
  std::vector<Tensor*> order;
  std::unordered_set<Tensor*> visited;
  std::vector<std::pair<Tensor*, std::size_t>> stack;
  stack.emplace_back(loss.get(), 0);
  visited.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->inputs.size()) {
      Tensor* child = node->inputs[idx].get();
      ++idx;
      if (child->requires_grad && visited.insert(child).second)
        stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss->ensure_grad();
  loss->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Tensor* node = *it;
    if (node->backprop && node->requires_grad) node->backprop(*node);
  }
}

void zero_grads(std::span<const Var> params) {
  for (const Var& p : params) {
    p->ensure_grad();
    p->zero_grad();
  }
}

}  // namespace uncle
