#include "uncle/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uncle {

PerturbStrategy parse_strategy(const std::string& name) {
  if (name == "permutation") return PerturbStrategy::kPermutation;
  if (name == "zero_mask") return PerturbStrategy::kZeroMask;
  if (name == "noise_injection") return PerturbStrategy::kNoiseInjection;
  if (name == "none") return PerturbStrategy::kNone;
  throw std::invalid_argument("unknown perturbation strategy: " + name);
}

std::string strategy_name(PerturbStrategy s) {
  switch (s) {
    case PerturbStrategy::kPermutation: return "permutation";
    case PerturbStrategy::kZeroMask: return "zero_mask";
    case PerturbStrategy::kNoiseInjection: return "noise_injection";
    case PerturbStrategy::kNone: return "none";
  }
  return "?";
}

TimeSeriesDataset perturb_series(const TimeSeriesDataset& x, int j, const PerturbationConfig& cfg,
                                 Rng& rng) {
  if (j < 0 || j >= x.num_vars) contract_violation("perturb_series: variable index out of range");
  if (cfg.repeats < 1) contract_violation("perturb_series: repeats must be >= 1");
  TimeSeriesDataset out = x;
  switch (cfg.strategy) {
    case PerturbStrategy::kPermutation: {
      std::vector<double> row(out.values.begin() + static_cast<std::ptrdiff_t>(j) * out.num_steps,
                              out.values.begin() + static_cast<std::ptrdiff_t>(j + 1) * out.num_steps);
      rng.shuffle(row);
      std::copy(row.begin(), row.end(),
                out.values.begin() + static_cast<std::ptrdiff_t>(j) * out.num_steps);
      break;
    }
    case PerturbStrategy::kZeroMask:
      for (int t = 0; t < out.num_steps; ++t) out.at(j, t) = 0.0;
      break;
    case PerturbStrategy::kNoiseInjection:
      for (int t = 0; t < out.num_steps; ++t) out.at(j, t) += rng.normal(0.0, cfg.noise_sigma);
      break;
    case PerturbStrategy::kNone:
      break;
  }
  return out;
}

DynamicCausalGraph dynamic_graph(const UncleModel& model, const TimeSeriesDataset& x,
                                 const PerturbationConfig& cfg) {
  if (model.config.num_vars != x.num_vars) contract_violation("model/data variable count mismatch");
  if (cfg.repeats < 1) contract_violation("repeats must be >= 1");
  const int n = x.num_vars;
  const int t_n = x.num_steps;
  const int lag = model.config.lag;
  if (t_n <= lag) contract_violation("dynamic_graph requires T > lag");
  const int horizon = t_n - lag;

  const std::vector<double> x_norm = model.normalize(x);
  const std::vector<double> base_pred = model.predict_values(x_norm, t_n);

  auto target = [&](int i, int t) { return x_norm[static_cast<std::size_t>(i) * t_n + lag + t]; };
  std::vector<double> base_err(static_cast<std::size_t>(n) * horizon);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < horizon; ++t) {
      const double d = base_pred[static_cast<std::size_t>(i) * horizon + t] - target(i, t);
      base_err[static_cast<std::size_t>(i) * horizon + t] = d * d;
    }

  DynamicCausalGraph g;
  g.num_vars = n;
  g.t_start = lag + 1;
  g.horizon = horizon;
  g.strengths.assign(static_cast<std::size_t>(horizon) * n * n, 0.0);

  const double inv_repeats = 1.0 / cfg.repeats;
  for (int j = 0; j < n; ++j) {
    for (int r = 0; r < cfg.repeats; ++r) {
      Rng stream(Rng::derive(cfg.seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(r)));
      const TimeSeriesDataset perturbed = perturb_series(x, j, cfg, stream);
      const std::vector<double> pert_pred = model.predict_values(model.normalize(perturbed), t_n);
      for (int i = 0; i < n; ++i) {
        for (int t = 0; t < horizon; ++t) {
          const double d = pert_pred[static_cast<std::size_t>(i) * horizon + t] - target(i, t);
          const double gain = d * d - base_err[static_cast<std::size_t>(i) * horizon + t];
          if (gain > 0.0)
            g.strengths[(static_cast<std::size_t>(t) * n + j) * n + i] += inv_repeats * gain;
        }
      }
    }
  }
  return g;
}

Adjacency summarize_dynamic(const DynamicCausalGraph& g, SummaryMode mode,
                            std::optional<std::pair<int, int>> window) {
  int lo = g.t_start;
  int hi = g.t_start + g.horizon - 1;
  if (window) {
    lo = std::max(lo, window->first);
    hi = std::min(hi, window->second);
  }
  if (lo > hi) contract_violation("summarize_dynamic: empty window");
  const int n = g.num_vars;
  Adjacency out = Adjacency::zeros(n);
  for (int t = lo; t <= hi; ++t) {
    const int t_idx = t - g.t_start;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out.entries[static_cast<std::size_t>(j) * n + i] += g.at(t_idx, j, i);
  }
  if (mode == SummaryMode::kMean) {
    const double inv = 1.0 / (hi - lo + 1);
    for (double& v : out.entries) v *= inv;
  }
  return out;
}

std::vector<double> smooth_gaussian(const std::vector<double>& series, double sigma) {
  if (sigma <= 0.0) contract_violation("smooth_gaussian requires sigma > 0");
  const int n = static_cast<int>(series.size());
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
  std::vector<double> out(series.size());
  for (int t = 0; t < n; ++t) {
    double acc = 0.0, norm = 0.0;
    const int k_lo = std::max(-radius, -t);
    const int k_hi = std::min(radius, n - 1 - t);
    for (int k = k_lo; k <= k_hi; ++k) {
      acc += kernel[k + radius] * series[t + k];
      norm += kernel[k + radius];
    }
    out[t] = acc / norm;
  }
  return out;
}

Adjacency aggregate_dependencies(const UncleModel& model) {
  if (!model.psi) contract_violation("dependency matrices are disabled for this model");
  const int n = model.config.num_vars;
  const int c_n = model.config.channels;
  const int lag = model.config.lag;
  Adjacency out = Adjacency::zeros(n);
  const double* psi = model.psi->values.data();
  for (int c = 0; c < c_n; ++c)
    for (int l = 0; l < lag; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double v = psi[((static_cast<std::size_t>(c) * lag + l) * n + i) * n + j];
          // psi row i, column j is the influence j -> i
          out.entries[static_cast<std::size_t>(j) * n + i] += v * v;
        }
  const double inv = 1.0 / (static_cast<double>(c_n) * lag);
  for (double& v : out.entries) v = std::sqrt(v * inv);
  return out;
}

void write_dynamic_graph(const DynamicCausalGraph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "strengths.bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "strengths.bin").string());
  out << "UNCLG1\n"
      << "num_vars=" << g.num_vars << " t_start=" << g.t_start << " horizon=" << g.horizon << "\n";
  out.write(reinterpret_cast<const char*>(g.strengths.data()),
            static_cast<std::streamsize>(g.strengths.size() * sizeof(double)));
  write_matrix_csv(summarize_dynamic(g, SummaryMode::kMean), dir / "summary.csv");
}

DynamicCausalGraph read_dynamic_graph(const std::filesystem::path& dir) {
  std::ifstream in(dir / "strengths.bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + (dir / "strengths.bin").string());
  std::string magic, header;
  std::getline(in, magic);
  if (magic != "UNCLG1") throw std::runtime_error("bad strengths.bin magic");
  std::getline(in, header);
  DynamicCausalGraph g;
  if (std::sscanf(header.c_str(), "num_vars=%d t_start=%d horizon=%d", &g.num_vars, &g.t_start,
                  &g.horizon) != 3)
    throw std::runtime_error("bad strengths.bin header");
  g.strengths.resize(static_cast<std::size_t>(g.horizon) * g.num_vars * g.num_vars);
  in.read(reinterpret_cast<char*>(g.strengths.data()),
          static_cast<std::streamsize>(g.strengths.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated strengths.bin");
  return g;
}

void write_edge_series_csv(const DynamicCausalGraph& g, const std::filesystem::path& file,
                           double smooth_sigma) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(12);
  const int n = g.num_vars;
  out << "t";
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j) out << ",s" << j << "->s" << i;
  out << "\n";
  std::vector<std::vector<double>> cols;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      std::vector<double> series(g.horizon);
      for (int t = 0; t < g.horizon; ++t) series[t] = g.at(t, j, i);
      if (smooth_sigma > 0.0) series = smooth_gaussian(series, smooth_sigma);
      cols.push_back(std::move(series));
    }
  for (int t = 0; t < g.horizon; ++t) {
    out << (g.t_start + t);
    for (const auto& col : cols) out << "," << col[t];
    out << "\n";
  }
}

}  // namespace uncle
