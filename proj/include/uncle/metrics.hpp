#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uncle/dataset.hpp"
#include "uncle/discovery.hpp"

namespace uncle {

// Thrown when a metric has no defined value (e.g. no positive labels).
struct MetricUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SegmentScore {
  int index = 0;
  int t_start = 0, t_end = 0;
  double auroc = 0.0, auprc = 0.0, acc = 0.0;
};

struct ReplicaCi {
  double auroc = 0.0, auprc = 0.0, acc = 0.0;  // 95% half-widths
  int n = 0;
};

struct EvalReport {
  double auroc = 0.0;
  double auprc = 0.0;
  double acc = 0.0;
  double threshold_used = 0.0;
  std::vector<SegmentScore> per_segment;
  std::vector<std::string> warnings;
  std::optional<ReplicaCi> ci95;
};

// All three metrics consider off-diagonal entries only (diagonal masked).
double auroc(const Adjacency& scores, const Adjacency& truth);
double auprc(const Adjacency& scores, const Adjacency& truth);
std::pair<double, double> acc_best_threshold(const Adjacency& scores, const Adjacency& truth);

EvalReport evaluate_static(const Adjacency& scores, const GroundTruth& truth);

// Per-segment evaluation of a dynamic graph: time-averaged strengths within
// each ground-truth segment, scored against that segment's adjacency.
// Segments without off-diagonal positives (or outside the horizon) are
// skipped with a warning. Top-level metrics are unweighted segment means.
EvalReport evaluate_dynamic(const DynamicCausalGraph& g, const GroundTruth& truth);

// Best metrics attainable by a single time-invariant score matrix against
// dynamic truth. Heuristic search: per-segment adjacencies, the
// time-weighted edge-frequency matrix, and a greedy value-swap refinement
// of the frequency matrix. auroc/auprc bounds are maximized independently.
std::pair<double, double> static_best(const GroundTruth& truth);

// Mean and 95% CI half-width (t distribution, n-1 dof; zero when n == 1).
EvalReport aggregate_replicas(std::span<const EvalReport> reports);

void write_report(const EvalReport& r, const std::filesystem::path& file);
std::string report_csv_header();
std::string report_csv_row(const std::string& method, const std::string& dataset, const EvalReport& r);

}  // namespace uncle
