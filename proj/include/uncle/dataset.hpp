#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uncle {

// N variables by T timesteps, row-major: values[i * T + t].
struct TimeSeriesDataset {
  int num_vars = 0;
  int num_steps = 0;
  std::vector<double> values;
  std::vector<std::string> var_names;
  int replica_id = 0;
  std::uint64_t seed = 0;

  double at(int i, int t) const { return values[static_cast<std::size_t>(i) * num_steps + t]; }
  double& at(int i, int t) { return values[static_cast<std::size_t>(i) * num_steps + t]; }
};

// Binary adjacency, row-major: adj[j * N + i] == 1  <=>  j causes i.
struct Adjacency {
  int num_vars = 0;
  std::vector<double> entries;

  static Adjacency zeros(int n) { return {n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)}; }
  double at(int j, int i) const { return entries[static_cast<std::size_t>(j) * num_vars + i]; }
  void set(int j, int i, double v) { entries[static_cast<std::size_t>(j) * num_vars + i] = v; }
};

struct TruthSegment {
  int t_start = 0;  // 1-indexed, inclusive
  int t_end = 0;    // inclusive
  Adjacency adj;
};

struct GroundTruth {
  enum class Kind { kStatic, kDynamic };
  Kind kind = Kind::kStatic;
  Adjacency static_adj;                // present iff static
  std::vector<TruthSegment> segments;  // present iff dynamic; tiles [1, T]
};

// --- CSV I/O ---

void write_dataset_csv(const TimeSeriesDataset& d, const std::filesystem::path& file);
TimeSeriesDataset read_dataset_csv(const std::filesystem::path& file);

void write_matrix_csv(const Adjacency& m, const std::filesystem::path& file);
Adjacency read_matrix_csv(const std::filesystem::path& file);

// Dynamic truth: manifest rows (t_start, t_end, adjacency_file) with one
// adjacency CSV per segment next to the manifest.
void write_truth(const GroundTruth& g, const std::filesystem::path& dir, const std::string& stem);
GroundTruth read_static_truth(const std::filesystem::path& adj_file);
GroundTruth read_dynamic_truth(const std::filesystem::path& manifest_file);

}  // namespace uncle
