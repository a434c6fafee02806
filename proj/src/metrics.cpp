#include "uncle/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace uncle {

namespace {

struct LabeledScores {
  std::vector<double> score;
  std::vector<int> label;
  int positives = 0, negatives = 0;
};

LabeledScores off_diagonal(const Adjacency& scores, const Adjacency& truth) {
  if (scores.num_vars != truth.num_vars) contract_violation("scores/truth shape mismatch");
  LabeledScores out;
  const int n = scores.num_vars;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      out.score.push_back(scores.at(j, i));
      const int lab = truth.at(j, i) != 0.0 ? 1 : 0;
      out.label.push_back(lab);
      (lab ? out.positives : out.negatives) += 1;
    }
  return out;
}

// Sorted descending by score; stable within ties.
std::vector<std::size_t> desc_order(const LabeledScores& s) {
  std::vector<std::size_t> order(s.score.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.score[a] > s.score[b]; });
  return order;
}

// Two-sided 95% critical values of Student's t.
double t_critical_95(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) contract_violation("t_critical_95 requires dof >= 1");
  if (dof <= 30) return table[dof - 1];
  if (dof <= 40) return 2.021;
  if (dof <= 60) return 2.000;
  if (dof <= 120) return 1.980;
  return 1.960;
}

}  // namespace

double auroc(const Adjacency& scores, const Adjacency& truth) {
  LabeledScores s = off_diagonal(scores, truth);
  if (s.positives == 0 || s.negatives == 0)
    throw MetricUndefined("AUROC needs at least one positive and one negative off-diagonal entry");
  // Mann-Whitney with midranks (ties count 0.5).
  auto order = desc_order(s);
  const std::size_t n = order.size();
  double pos_rank_sum = 0.0;
  std::size_t k = 0;
  while (k < n) {
    std::size_t k2 = k;
    while (k2 + 1 < n && s.score[order[k2 + 1]] == s.score[order[k]]) ++k2;
    const double midrank = 0.5 * static_cast<double>(k + k2) + 1.0;  // 1-based
    for (std::size_t p = k; p <= k2; ++p)
      if (s.label[order[p]]) pos_rank_sum += midrank;
    k = k2 + 1;
  }
  // Ranks above were assigned in descending score order; convert to the
  // ascending convention of the Mann-Whitney U statistic.
  const double p_cnt = s.positives, n_cnt = s.negatives;
  const double ascending_sum = p_cnt * (static_cast<double>(n) + 1.0) - pos_rank_sum;
  const double u_stat = ascending_sum - p_cnt * (p_cnt + 1) / 2.0;
  return u_stat / (p_cnt * n_cnt);
}

double auprc(const Adjacency& scores, const Adjacency& truth) {
  LabeledScores s = off_diagonal(scores, truth);
  if (s.positives == 0) throw MetricUndefined("AUPRC needs at least one positive off-diagonal entry");
  auto order = desc_order(s);
  const std::size_t n = order.size();
  double area = 0.0;
  std::size_t k = 0;
  long tp = 0, fp = 0;
  while (k < n) {
    std::size_t k2 = k;
    long d_tp = 0, d_fp = 0;
    while (true) {
      (s.label[order[k2]] ? d_tp : d_fp) += 1;
      if (k2 + 1 < n && s.score[order[k2 + 1]] == s.score[order[k]])
        ++k2;
      else
        break;
    }
    tp += d_tp;
    fp += d_fp;
    if (d_tp > 0) {
      const double precision = static_cast<double>(tp) / (tp + fp);
      area += precision * static_cast<double>(d_tp) / s.positives;
    }
    k = k2 + 1;
  }
  return area;
}

std::pair<double, double> acc_best_threshold(const Adjacency& scores, const Adjacency& truth) {
  LabeledScores s = off_diagonal(scores, truth);
  const std::size_t n = s.score.size();
  if (n == 0) throw MetricUndefined("accuracy needs off-diagonal entries");
  std::vector<double> uniq = s.score;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<double> candidates;
  candidates.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i)
    candidates.push_back(0.5 * (uniq[i] + uniq[i + 1]));
  candidates.push_back(std::numeric_limits<double>::infinity());

  double best_acc = -1.0;
  double best_thr = candidates.front();
  for (double thr : candidates) {
    long correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int pred = s.score[i] > thr ? 1 : 0;
      if (pred == s.label[i]) ++correct;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(n);
    if (acc > best_acc || (acc == best_acc && thr < best_thr)) {
      best_acc = acc;
      best_thr = thr;
    }
  }
  return {best_acc, best_thr};
}

EvalReport evaluate_static(const Adjacency& scores, const GroundTruth& truth) {
  if (truth.kind != GroundTruth::Kind::kStatic) contract_violation("evaluate_static needs static truth");
  EvalReport r;
  r.auroc = auroc(scores, truth.static_adj);
  r.auprc = auprc(scores, truth.static_adj);
  std::tie(r.acc, r.threshold_used) = acc_best_threshold(scores, truth.static_adj);
  return r;
}

namespace {

// Shared by evaluate_dynamic and static_best: score a fixed per-segment
// score matrix supplier against dynamic truth.
template <typename ScoreFn>
EvalReport evaluate_segments(const GroundTruth& truth, int t_lo, int t_hi, ScoreFn&& segment_scores) {
  EvalReport r;
  double sum_auroc = 0.0, sum_auprc = 0.0, sum_acc = 0.0;
  int counted = 0;
  for (std::size_t si = 0; si < truth.segments.size(); ++si) {
    const TruthSegment& seg = truth.segments[si];
    const int lo = std::max(seg.t_start, t_lo);
    const int hi = std::min(seg.t_end, t_hi);
    if (lo > hi) {
      r.warnings.push_back("segment " + std::to_string(si) + " outside graph horizon; skipped");
      continue;
    }
    const Adjacency scores = segment_scores(si, lo, hi);
    SegmentScore ss;
    ss.index = static_cast<int>(si);
    ss.t_start = seg.t_start;
    ss.t_end = seg.t_end;
    try {
      ss.auroc = auroc(scores, seg.adj);
      ss.auprc = auprc(scores, seg.adj);
      ss.acc = acc_best_threshold(scores, seg.adj).first;
    } catch (const MetricUndefined&) {
      r.warnings.push_back("segment " + std::to_string(si) + " has no scorable off-diagonal truth; skipped");
      continue;
    }
    r.per_segment.push_back(ss);
    sum_auroc += ss.auroc;
    sum_auprc += ss.auprc;
    sum_acc += ss.acc;
    ++counted;
  }
  if (counted == 0) throw MetricUndefined("no evaluable segments");
  r.auroc = sum_auroc / counted;
  r.auprc = sum_auprc / counted;
  r.acc = sum_acc / counted;
  return r;
}

double mean_segment_auroc(const Adjacency& scores, const GroundTruth& truth) {
  double sum = 0.0;
  int counted = 0;
  for (const TruthSegment& seg : truth.segments) {
    try {
      sum += auroc(scores, seg.adj);
      ++counted;
    } catch (const MetricUndefined&) {
    }
  }
  return counted ? sum / counted : 0.0;
}

double mean_segment_auprc(const Adjacency& scores, const GroundTruth& truth) {
  double sum = 0.0;
  int counted = 0;
  for (const TruthSegment& seg : truth.segments) {
    try {
      sum += auprc(scores, seg.adj);
      ++counted;
    } catch (const MetricUndefined&) {
    }
  }
  return counted ? sum / counted : 0.0;
}

}  // namespace

EvalReport evaluate_dynamic(const DynamicCausalGraph& g, const GroundTruth& truth) {
  if (truth.kind != GroundTruth::Kind::kDynamic) contract_violation("evaluate_dynamic needs dynamic truth");
  const int t_lo = g.t_start;
  const int t_hi = g.t_start + g.horizon - 1;
  return evaluate_segments(truth, t_lo, t_hi, [&](std::size_t, int lo, int hi) {
    return summarize_dynamic(g, SummaryMode::kMean, std::make_pair(lo, hi));
  });
}

std::pair<double, double> static_best(const GroundTruth& truth) {
  if (truth.kind != GroundTruth::Kind::kDynamic) contract_violation("static_best needs dynamic truth");
  const int n = truth.segments.front().adj.num_vars;

  std::vector<Adjacency> candidates;
  for (const TruthSegment& seg : truth.segments) candidates.push_back(seg.adj);

  // Time-weighted edge frequency.
  Adjacency freq = Adjacency::zeros(n);
  double total_len = 0.0;
  for (const TruthSegment& seg : truth.segments) {
    const double len = seg.t_end - seg.t_start + 1;
    total_len += len;
    for (std::size_t e = 0; e < freq.entries.size(); ++e) freq.entries[e] += len * seg.adj.entries[e];
  }
  for (double& v : freq.entries) v /= total_len;
  candidates.push_back(freq);

  // Greedy refinement: swap pairs of off-diagonal score values while the
  // mean per-segment AUROC improves.
  Adjacency cur = freq;
  double cur_score = mean_segment_auroc(cur, truth);
  bool improved = true;
  int rounds = 0;
  while (improved && rounds++ < 16) {
    improved = false;
    for (int j1 = 0; j1 < n; ++j1)
      for (int i1 = 0; i1 < n; ++i1) {
        if (i1 == j1) continue;
        for (int j2 = 0; j2 < n; ++j2)
          for (int i2 = 0; i2 < n; ++i2) {
            if (i2 == j2) continue;
            if (cur.at(j1, i1) == cur.at(j2, i2)) continue;
            Adjacency trial = cur;
            const double a = trial.at(j1, i1);
            trial.set(j1, i1, trial.at(j2, i2));
            trial.set(j2, i2, a);
            const double s = mean_segment_auroc(trial, truth);
            if (s > cur_score + 1e-12) {
              cur = std::move(trial);
              cur_score = s;
              improved = true;
            }
          }
      }
  }
  candidates.push_back(cur);

  double best_auroc = 0.0, best_auprc = 0.0;
  for (const Adjacency& cand : candidates) {
    best_auroc = std::max(best_auroc, mean_segment_auroc(cand, truth));
    best_auprc = std::max(best_auprc, mean_segment_auprc(cand, truth));
  }
  return {best_auroc, best_auprc};
}

EvalReport aggregate_replicas(std::span<const EvalReport> reports) {
  if (reports.empty()) contract_violation("aggregate_replicas needs at least one report");
  const int n = static_cast<int>(reports.size());
  EvalReport out;
  auto mean_and_hw = [n](auto&& get) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += get(i);
    mean /= n;
    double hw = 0.0;
    if (n > 1) {
      double ss = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = get(i) - mean;
        ss += d * d;
      }
      const double s = std::sqrt(ss / (n - 1));
      hw = t_critical_95(n - 1) * s / std::sqrt(static_cast<double>(n));
    }
    return std::make_pair(mean, hw);
  };
  ReplicaCi ci;
  ci.n = n;
  std::tie(out.auroc, ci.auroc) = mean_and_hw([&](int i) { return reports[i].auroc; });
  std::tie(out.auprc, ci.auprc) = mean_and_hw([&](int i) { return reports[i].auprc; });
  std::tie(out.acc, ci.acc) = mean_and_hw([&](int i) { return reports[i].acc; });
  out.threshold_used = reports[0].threshold_used;
  out.ci95 = ci;
  return out;
}

void write_report(const EvalReport& r, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(12);
  out << "auroc=" << r.auroc << "\n"
      << "auprc=" << r.auprc << "\n"
      << "acc=" << r.acc << "\n"
      << "threshold_used=" << r.threshold_used << "\n";
  for (const SegmentScore& s : r.per_segment)
    out << "segment" << s.index << "=" << s.t_start << ":" << s.t_end << " auroc=" << s.auroc
        << " auprc=" << s.auprc << " acc=" << s.acc << "\n";
  if (r.ci95)
    out << "ci95_auroc=" << r.ci95->auroc << "\nci95_auprc=" << r.ci95->auprc
        << "\nci95_acc=" << r.ci95->acc << "\nreplicas=" << r.ci95->n << "\n";
  for (const std::string& w : r.warnings) out << "warning=" << w << "\n";
}

std::string report_csv_header() { return "method,dataset,auroc,auroc_ci95,auprc,auprc_ci95,acc,acc_ci95"; }

std::string report_csv_row(const std::string& method, const std::string& dataset, const EvalReport& r) {
  std::ostringstream out;
  out.precision(12);
  const double ca = r.ci95 ? r.ci95->auroc : 0.0;
  const double cp = r.ci95 ? r.ci95->auprc : 0.0;
  const double cc = r.ci95 ? r.ci95->acc : 0.0;
  out << method << "," << dataset << "," << r.auroc << "," << ca << "," << r.auprc << "," << cp << ","
      << r.acc << "," << cc;
  return out.str();
}

}  // namespace uncle
