#include "uncle/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "uncle/rng.hpp"

namespace uncle {

namespace {

constexpr double kPi = 3.14159265358979323846;

void lorenz96_deriv(const std::vector<double>& x, double forcing, std::vector<double>& dx) {
  const int p = static_cast<int>(x.size());
  for (int i = 0; i < p; ++i) {
    const int ip1 = (i + 1) % p;
    const int im1 = (i - 1 + p) % p;
    const int im2 = (i - 2 + p) % p;
    dx[i] = (x[ip1] - x[im2]) * x[im1] - x[i] + forcing;
  }
}

}  // namespace

GeneratedData gen_lorenz96(const Lorenz96Params& p, std::uint64_t seed) {
  if (p.num_vars < 4) throw std::invalid_argument("lorenz96 requires p >= 4 (neighbor indices collide)");
  if (p.num_steps < 1 || p.subsample < 1 || p.dt <= 0.0)
    throw std::invalid_argument("lorenz96: bad steps/subsample/dt");
  Rng rng(seed);
  const int n = p.num_vars;
  std::vector<double> x(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int i = 0; i < n; ++i) x[i] = p.forcing + rng.normal(0.0, 0.01);

  GeneratedData out;
  out.data.num_vars = n;
  out.data.num_steps = p.num_steps;
  out.data.values.resize(static_cast<std::size_t>(n) * p.num_steps);
  out.data.seed = seed;
  for (int i = 0; i < n; ++i) out.data.var_names.push_back("x" + std::to_string(i));

  auto rk4_step = [&]() {
    lorenz96_deriv(x, p.forcing, k1);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * p.dt * k1[i];
    lorenz96_deriv(tmp, p.forcing, k2);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * p.dt * k2[i];
    lorenz96_deriv(tmp, p.forcing, k3);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + p.dt * k3[i];
    lorenz96_deriv(tmp, p.forcing, k4);
    for (int i = 0; i < n; ++i) x[i] += p.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  for (int s = 0; s < p.burn_in; ++s) rk4_step();
  for (int t = 0; t < p.num_steps; ++t) {
    for (int s = 0; s < p.subsample; ++s) rk4_step();
    for (int i = 0; i < n; ++i) out.data.at(i, t) = x[i] + rng.normal(0.0, p.obs_noise);
  }

  out.truth.kind = GroundTruth::Kind::kStatic;
  out.truth.static_adj = Adjacency::zeros(n);
  for (int i = 0; i < n; ++i) {
    out.truth.static_adj.set((i - 2 + n) % n, i, 1.0);
    out.truth.static_adj.set((i - 1 + n) % n, i, 1.0);
    out.truth.static_adj.set(i, i, 1.0);
    out.truth.static_adj.set((i + 1) % n, i, 1.0);
  }
  return out;
}

GeneratedData gen_tvsem(int num_steps, std::uint64_t seed) {
  if (num_steps < 1) throw std::invalid_argument("tvsem: T must be positive");
  Rng rng(seed);
  const double noise_std = std::sqrt(0.1);
  GeneratedData out;
  out.data.num_vars = 2;
  out.data.num_steps = num_steps;
  out.data.values.resize(2 * static_cast<std::size_t>(num_steps));
  out.data.var_names = {"X", "Y"};
  out.data.seed = seed;

  double x_prev = 0.0, y_prev = 0.0;
  for (int t = 1; t <= num_steps; ++t) {
    const bool even_segment = ((t - 1) / 400) % 2 == 0;
    const double a = even_segment ? 0.8 : 0.2;
    const double b = even_segment ? 0.1 : 0.7;
    const double x = a * y_prev + rng.normal(0.0, noise_std);
    const double y = b * x_prev + rng.normal(0.0, noise_std);
    out.data.at(0, t - 1) = x;
    out.data.at(1, t - 1) = y;
    x_prev = x;
    y_prev = y;
  }

  out.truth.kind = GroundTruth::Kind::kDynamic;
  for (int start = 1; start <= num_steps; start += 400) {
    TruthSegment seg;
    seg.t_start = start;
    seg.t_end = std::min(start + 399, num_steps);
    seg.adj = Adjacency::zeros(2);
    const bool even_segment = ((start - 1) / 400) % 2 == 0;
    if (even_segment)
      seg.adj.set(1, 0, 1.0);  // Y -> X dominant
    else
      seg.adj.set(0, 1, 1.0);  // X -> Y dominant
    out.truth.segments.push_back(std::move(seg));
  }
  return out;
}

namespace {

// Shared machinery for NC8/ND8. Variable order: x y z w a b c o.
enum { kX = 0, kY, kZ, kW, kA, kB, kC, kO, kNumVars8 };
constexpr int kWarmup = 32;  // covers the max lag of 16 with settled history

struct Series8 {
  std::vector<std::vector<double>> v;  // v[var][idx], idx 0 is time 1-kWarmup
  int total = 0;

  explicit Series8(int num_steps) : total(num_steps + kWarmup) {
    v.assign(kNumVars8, std::vector<double>(total, 0.0));
  }
  // lagged value, zero before recorded history
  double lag(int var, int idx, int l) const { return idx - l >= 0 ? v[var][idx - l] : 0.0; }
};

double cube(double x) { return x * x * x; }

double sin_driver_x(double t) {
  return 0.45 * std::sin(t / (4.0 * kPi)) + 0.45 * std::sin(t / (9.0 * kPi)) +
         0.25 * std::sin(t / (3.0 * kPi));
}

double sin_driver_a(double t) {
  return 0.15 * std::sin(t / 6.0) + 0.35 * std::sin(t / 80.0) + 0.65 * std::sin(t / 125.0);
}

// The four equations shared by NC8 and both ND8 regimes.
void step_zwco(Series8& s, int idx, Rng& rng, double ez, double ew, double ec, double eo) {
  s.v[kZ][idx] = 3.0 * cube(0.6 * s.lag(kX, idx, 1)) + 3.0 * cube(0.4 * s.lag(kX, idx, 2)) +
                 3.0 * cube(0.2 * s.lag(kX, idx, 3)) + 3.0 * cube(0.5 * s.lag(kX, idx, 4)) +
                 0.02 * ez;
  s.v[kW][idx] = 0.8 * cube(0.4 * s.lag(kZ, idx, 1)) + 0.8 * cube(0.5 * s.lag(kZ, idx, 2)) +
                 0.64 * s.lag(kZ, idx, 3) + 0.48 * s.lag(kZ, idx, 4) + 0.02 * ew;
  s.v[kC][idx] = std::max(0.24 * s.lag(kA, idx, 13) + 0.3 * s.lag(kA, idx, 14), -0.2) +
                 1.2 * std::sqrt(std::abs(0.2 * s.lag(kA, idx, 15) + 0.5 * s.lag(kX, idx, 16))) +
                 0.02 * ec;
  s.v[kO][idx] = 0.39 * s.lag(kX, idx, 13) - 0.65 * s.lag(kX, idx, 14) + 0.52 * s.lag(kX, idx, 15) +
                 0.13 * s.lag(kX, idx, 16) + 0.52 * s.lag(kA, idx, 1) - 0.65 * s.lag(kA, idx, 2) +
                 0.26 * s.lag(kA, idx, 3) + 0.52 * s.lag(kA, idx, 4) + 0.02 * eo;
  (void)rng;
}

// x, y, a, b in the NC8 regime (also ND8's initial regime).
void step_xyab_forward(Series8& s, int idx, double t, double ex, double ey, double ea, double eb) {
  s.v[kX][idx] = sin_driver_x(t) + 0.1 * ex;
  s.v[kY][idx] = 0.24 * s.lag(kX, idx, 1) - 0.28 * s.lag(kX, idx, 2) + 0.08 * s.lag(kX, idx, 3) +
                 0.2 * s.lag(kX, idx, 4) + 0.2 * s.lag(kY, idx, 1) - 0.12 * s.lag(kY, idx, 2) +
                 0.16 * s.lag(kY, idx, 3) + 0.04 * s.lag(kY, idx, 4) + 0.02 * ey;
  s.v[kA][idx] = sin_driver_a(t) + 0.1 * ea;
  s.v[kB][idx] = 0.54 * s.lag(kA, idx, 13) - 0.63 * s.lag(kA, idx, 14) + 0.18 * s.lag(kA, idx, 15) +
                 0.45 * s.lag(kA, idx, 16) + 0.36 * s.lag(kB, idx, 13) + 0.27 * s.lag(kB, idx, 14) -
                 0.36 * s.lag(kB, idx, 15) + 0.18 * s.lag(kB, idx, 16) + 0.02 * eb;
}

// x, y, a, b in ND8's reversed regime (y drives x, b drives a).
void step_xyab_reversed(Series8& s, int idx, double t, double ex, double ey, double ea, double eb) {
  s.v[kX][idx] = 0.08 * s.lag(kX, idx, 1) - 0.08 * s.lag(kX, idx, 2) + 0.04 * s.lag(kX, idx, 3) +
                 0.04 * s.lag(kX, idx, 4) + 0.04 * s.lag(kY, idx, 1) + 0.28 * s.lag(kY, idx, 2) -
                 0.08 * s.lag(kY, idx, 3) - 0.04 * s.lag(kY, idx, 4) + 0.1 * ex;
  s.v[kY][idx] = sin_driver_x(t) + 0.2 * s.lag(kY, idx, 1) - 0.12 * s.lag(kY, idx, 2) +
                 0.16 * s.lag(kY, idx, 3) + 0.04 * s.lag(kY, idx, 4) + 0.02 * ey;
  s.v[kA][idx] = 0.09 * s.lag(kA, idx, 13) - 0.18 * s.lag(kA, idx, 14) + 0.09 * s.lag(kA, idx, 15) +
                 0.09 * s.lag(kA, idx, 16) + 0.72 * s.lag(kB, idx, 13) + 0.27 * s.lag(kA, idx, 14) -
                 0.63 * s.lag(kA, idx, 15) + 0.18 * s.lag(kA, idx, 16) + 0.1 * ea;
  s.v[kB][idx] = sin_driver_a(t) + 0.36 * s.lag(kB, idx, 13) + 0.27 * s.lag(kB, idx, 14) -
                 0.36 * s.lag(kB, idx, 15) + 0.18 * s.lag(kB, idx, 16) + 0.02 * eb;
}

TimeSeriesDataset series8_to_dataset(const Series8& s, int num_steps, std::uint64_t seed) {
  TimeSeriesDataset d;
  d.num_vars = kNumVars8;
  d.num_steps = num_steps;
  d.values.resize(static_cast<std::size_t>(kNumVars8) * num_steps);
  d.var_names = {"x", "y", "z", "w", "a", "b", "c", "o"};
  d.seed = seed;
  for (int v = 0; v < kNumVars8; ++v)
    for (int t = 0; t < num_steps; ++t) d.at(v, t) = s.v[v][t + kWarmup];
  return d;
}

Adjacency nc8_adjacency(bool reversed) {
  Adjacency adj = Adjacency::zeros(kNumVars8);
  adj.set(kX, kZ, 1.0);
  adj.set(kZ, kW, 1.0);
  adj.set(kA, kC, 1.0);
  adj.set(kX, kC, 1.0);
  adj.set(kX, kO, 1.0);
  adj.set(kA, kO, 1.0);
  if (!reversed) {
    adj.set(kX, kY, 1.0);
    adj.set(kA, kB, 1.0);
    adj.set(kY, kY, 1.0);
    adj.set(kB, kB, 1.0);
  } else {
    adj.set(kY, kX, 1.0);
    adj.set(kB, kA, 1.0);
    adj.set(kX, kX, 1.0);
    adj.set(kY, kY, 1.0);
    adj.set(kA, kA, 1.0);
    adj.set(kB, kB, 1.0);
  }
  return adj;
}

}  // namespace

GeneratedData gen_nc8(int num_steps, int t0, std::uint64_t seed) {
  if (num_steps < 1) throw std::invalid_argument("nc8: T must be positive");
  Rng rng(seed);
  Series8 s(num_steps);
  for (int idx = 0; idx < s.total; ++idx) {
    const double t = static_cast<double>(idx + 1 - kWarmup + t0);
    double eps[kNumVars8];
    for (double& e : eps) e = rng.normal();
    step_xyab_forward(s, idx, t, eps[kX], eps[kY], eps[kA], eps[kB]);
    step_zwco(s, idx, rng, eps[kZ], eps[kW], eps[kC], eps[kO]);
  }
  GeneratedData out;
  out.data = series8_to_dataset(s, num_steps, seed);
  out.truth.kind = GroundTruth::Kind::kStatic;
  out.truth.static_adj = nc8_adjacency(/*reversed=*/false);
  return out;
}

GeneratedData gen_nd8(int num_steps, std::uint64_t seed) {
  if (num_steps < 1) throw std::invalid_argument("nd8: T must be positive");
  Rng rng(seed);
  Series8 s(num_steps);
  for (int idx = 0; idx < s.total; ++idx) {
    const int t_int = idx + 1 - kWarmup;  // warmup runs in the initial regime
    const double t = static_cast<double>(t_int);
    double eps[kNumVars8];
    for (double& e : eps) e = rng.normal();
    const bool reversed = t_int >= 1 && ((t_int - 1) / 500) % 2 == 1;
    if (reversed)
      step_xyab_reversed(s, idx, t, eps[kX], eps[kY], eps[kA], eps[kB]);
    else
      step_xyab_forward(s, idx, t, eps[kX], eps[kY], eps[kA], eps[kB]);
    step_zwco(s, idx, rng, eps[kZ], eps[kW], eps[kC], eps[kO]);
  }
  GeneratedData out;
  out.data = series8_to_dataset(s, num_steps, seed);
  out.truth.kind = GroundTruth::Kind::kDynamic;
  for (int start = 1; start <= num_steps; start += 500) {
    TruthSegment seg;
    seg.t_start = start;
    seg.t_end = std::min(start + 499, num_steps);
    seg.adj = nc8_adjacency(/*reversed=*/((start - 1) / 500) % 2 == 1);
    out.truth.segments.push_back(std::move(seg));
  }
  return out;
}

}  // namespace uncle
