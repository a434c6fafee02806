#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "uncle/dataset.hpp"
#include "uncle/model.hpp"

namespace uncle {

enum class PerturbStrategy { kPermutation, kZeroMask, kNoiseInjection, kNone };

struct PerturbationConfig {
  PerturbStrategy strategy = PerturbStrategy::kPermutation;
  double noise_sigma = 1.0;
  int repeats = 3;
  std::uint64_t seed = 0;
};

PerturbStrategy parse_strategy(const std::string& name);
std::string strategy_name(PerturbStrategy s);

// Per-timestep error gains. strengths[(t - t_start) * N * N + j * N + i] is
// the gain for edge j -> i when predicting time t (1-indexed, t in
// [t_start, t_start + horizon - 1], t_start = lag + 1).
struct DynamicCausalGraph {
  int num_vars = 0;
  int t_start = 0;
  int horizon = 0;
  std::vector<double> strengths;

  double at(int t_idx, int j, int i) const {
    return strengths[(static_cast<std::size_t>(t_idx) * num_vars + j) * num_vars + i];
  }
};

// Copy of x with only row j perturbed according to cfg.
TimeSeriesDataset perturb_series(const TimeSeriesDataset& x, int j, const PerturbationConfig& cfg,
                                 Rng& rng);

// Temporal-perturbation causal discovery: datapoint-wise error gains
// max(0, eps_perturbed - eps) averaged over cfg.repeats independent draws.
DynamicCausalGraph dynamic_graph(const UncleModel& model, const TimeSeriesDataset& x,
                                 const PerturbationConfig& cfg);

// Per-edge aggregation over timesteps. Window is 1-indexed inclusive over
// predicted times; defaults to the full horizon.
enum class SummaryMode { kMean, kSum };
Adjacency summarize_dynamic(const DynamicCausalGraph& g, SummaryMode mode,
                            std::optional<std::pair<int, int>> window = std::nullopt);

// Gaussian moving average, kernel truncated at +-4 sigma and renormalized
// at the boundaries; length-preserving.
std::vector<double> smooth_gaussian(const std::vector<double>& series, double sigma);

// RMS of dependency-matrix entries over channels and lags.
Adjacency aggregate_dependencies(const UncleModel& model);

// Persistence: strengths.bin (header + little-endian f64) plus summary.csv.
void write_dynamic_graph(const DynamicCausalGraph& g, const std::filesystem::path& dir);
DynamicCausalGraph read_dynamic_graph(const std::filesystem::path& dir);

// Per-edge strength time series as CSV columns "j->i" for plotting.
void write_edge_series_csv(const DynamicCausalGraph& g, const std::filesystem::path& file,
                           double smooth_sigma = 0.0);

}  // namespace uncle
