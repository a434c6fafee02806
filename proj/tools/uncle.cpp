// uncle: synthetic causal time-series generation, model training, causal
// discovery, and evaluation from one binary.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "uncle/datagen.hpp"
#include "uncle/dataset.hpp"
#include "uncle/discovery.hpp"
#include "uncle/metrics.hpp"
#include "uncle/model.hpp"
#include "uncle/recipe.hpp"

namespace fs = std::filesystem;
using namespace uncle;

namespace {

constexpr const char* kToolVersion = "0.1.0";

int generator_default_steps(const std::string& gen) { return gen == "lorenz96" ? 250 : 2000; }

GeneratedData generate_one(const DatasetSpec& spec, int replica) {
  const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(replica);
  const int steps = spec.num_steps > 0 ? spec.num_steps : generator_default_steps(spec.generator);
  GeneratedData g;
  if (spec.generator == "lorenz96") {
    Lorenz96Params p;
    p.num_vars = spec.num_vars;
    p.num_steps = steps;
    p.forcing = spec.forcing;
    g = gen_lorenz96(p, seed);
  } else if (spec.generator == "tvsem") {
    g = gen_tvsem(steps, seed);
  } else if (spec.generator == "nc8") {
    g = gen_nc8(steps, replica * spec.t0_step, seed);
  } else if (spec.generator == "nd8") {
    g = gen_nd8(steps, seed);
  } else {
    throw std::invalid_argument("unknown generator: " + spec.generator +
                                " (expected lorenz96, tvsem, nc8, or nd8)");
  }
  g.data.replica_id = replica;
  return g;
}

void write_provenance(const fs::path& file, const DatasetSpec& spec) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "tool_version=" << kToolVersion << "\n"
      << "generator=" << spec.generator << "\n"
      << "num_steps=" << (spec.num_steps > 0 ? spec.num_steps : generator_default_steps(spec.generator))
      << "\n"
      << "replicas=" << spec.replicas << "\n"
      << "seed=" << spec.seed << "\n";
  if (spec.generator == "lorenz96")
    out << "num_vars=" << spec.num_vars << "\n"
        << "forcing=" << spec.forcing << "\n";
  if (spec.generator == "nc8") out << "t0_step=" << spec.t0_step << "\n";
}

bool truth_is_dynamic(const std::string& gen) { return gen == "tvsem" || gen == "nd8"; }

// Mean per-segment metrics for a time-invariant score matrix against
// dynamic truth.
EvalReport evaluate_static_vs_dynamic(const Adjacency& scores, const GroundTruth& truth) {
  EvalReport r;
  double sa = 0.0, sp = 0.0, sc = 0.0;
  int counted = 0;
  for (std::size_t si = 0; si < truth.segments.size(); ++si) {
    const TruthSegment& seg = truth.segments[si];
    SegmentScore ss;
    ss.index = static_cast<int>(si);
    ss.t_start = seg.t_start;
    ss.t_end = seg.t_end;
    try {
      ss.auroc = auroc(scores, seg.adj);
      ss.auprc = auprc(scores, seg.adj);
      ss.acc = acc_best_threshold(scores, seg.adj).first;
    } catch (const MetricUndefined&) {
      r.warnings.push_back("segment " + std::to_string(si) + " has no scorable truth; skipped");
      continue;
    }
    r.per_segment.push_back(ss);
    sa += ss.auroc;
    sp += ss.auprc;
    sc += ss.acc;
    ++counted;
  }
  if (counted == 0) throw MetricUndefined("no evaluable segments");
  r.auroc = sa / counted;
  r.auprc = sp / counted;
  r.acc = sc / counted;
  return r;
}

struct EvalInputs {
  std::vector<fs::path> score_files;  // static score matrices
  std::vector<fs::path> graph_dirs;   // dynamic graph directories
};

EvalReport evaluate_one(const std::optional<fs::path>& score_file, const std::optional<fs::path>& graph_dir,
                        const GroundTruth& truth) {
  if (score_file) {
    const Adjacency scores = read_matrix_csv(*score_file);
    if (truth.kind == GroundTruth::Kind::kStatic) {
      if (scores.num_vars != truth.static_adj.num_vars)
        throw std::runtime_error("score matrix is " + std::to_string(scores.num_vars) + "x" +
                                 std::to_string(scores.num_vars) + " but truth is " +
                                 std::to_string(truth.static_adj.num_vars) + "x" +
                                 std::to_string(truth.static_adj.num_vars));
      return evaluate_static(scores, truth);
    }
    if (scores.num_vars != truth.segments.front().adj.num_vars)
      throw std::runtime_error("score matrix and truth segment sizes differ");
    return evaluate_static_vs_dynamic(scores, truth);
  }
  const DynamicCausalGraph g = read_dynamic_graph(*graph_dir);
  if (truth.kind == GroundTruth::Kind::kStatic)
    return evaluate_static(summarize_dynamic(g, SummaryMode::kMean), truth);
  if (g.num_vars != truth.segments.front().adj.num_vars)
    throw std::runtime_error("dynamic graph and truth segment sizes differ");
  return evaluate_dynamic(g, truth);
}

GroundTruth load_truth(const std::optional<fs::path>& truth_file, const std::optional<fs::path>& manifest) {
  if (manifest) return read_dynamic_truth(*manifest);
  if (!truth_file) throw std::runtime_error("pass --truth (static) or --segments (dynamic manifest)");
  std::ifstream probe(*truth_file);
  std::string first;
  std::getline(probe, first);
  if (first.rfind("t_start", 0) == 0)
    throw std::runtime_error(truth_file->string() +
                             " is a dynamic truth manifest; pass it via --segments instead of --truth");
  return read_static_truth(*truth_file);
}

// ---- subcommand payloads ----

struct GenerateArgs {
  DatasetSpec spec;
  fs::path out;
};

int run_generate(const GenerateArgs& a) {
  fs::create_directories(a.out);
  for (int r = 0; r < a.spec.replicas; ++r) {
    GeneratedData g = generate_one(a.spec, r);
    write_dataset_csv(g.data, a.out / ("replica" + std::to_string(r) + ".csv"));
    if (r == 0) write_truth(g.truth, a.out, "");
  }
  write_provenance(a.out / "provenance.txt", a.spec);
  return 0;
}

struct TrainArgs {
  fs::path data;
  fs::path out;
  fs::path trace;  // empty -> <out>.trace.csv
  ModelConfig config;
};

int run_train(const TrainArgs& a) {
  const TimeSeriesDataset data = read_dataset_csv(a.data);
  TrainResult result;
  try {
    result = train(data, a.config);
  } catch (const TrainingDiverged& e) {
    std::cerr << "error: training loss became non-finite at epoch " << e.epoch << "\n";
    return 1;
  }
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  save_checkpoint(result.model, a.out);
  const fs::path trace = a.trace.empty() ? fs::path(a.out.string() + ".trace.csv") : a.trace;
  write_loss_trace_csv(result.trace, trace);
  return 0;
}

struct DiscoverArgs {
  fs::path model;
  fs::path data;
  fs::path out;
  std::string mode = "perturb";
  PerturbationConfig perturbation;
  bool edge_series = false;
  double smooth_sigma = 0.0;
};

int run_discover(const DiscoverArgs& a) {
  const UncleModel model = load_checkpoint(a.model);
  fs::create_directories(a.out);
  if (a.mode == "aggregate") {
    if (!model.psi) {
      std::cerr << "error: this checkpoint was trained with dependency matrices disabled; "
                   "aggregation mode is unavailable (use --mode perturb)\n";
      return 1;
    }
    write_matrix_csv(aggregate_dependencies(model), a.out / "summary.csv");
    return 0;
  }
  if (a.data.empty()) throw std::runtime_error("--mode perturb requires --data");
  const TimeSeriesDataset data = read_dataset_csv(a.data);
  const DynamicCausalGraph g = dynamic_graph(model, data, a.perturbation);
  write_dynamic_graph(g, a.out);
  if (a.edge_series) write_edge_series_csv(g, a.out / "edge_series.csv", a.smooth_sigma);
  return 0;
}

struct EvalArgs {
  EvalInputs inputs;
  std::optional<fs::path> truth_file;
  std::optional<fs::path> segments;
  fs::path out;
  std::string method = "UnCLe(P)";
  std::string dataset = "dataset";
};

int run_eval(const EvalArgs& a) {
  const GroundTruth truth = load_truth(a.truth_file, a.segments);
  fs::create_directories(a.out);
  std::vector<EvalReport> reports;
  int k = 0;
  for (const fs::path& f : a.inputs.score_files)
    reports.push_back(evaluate_one(f, std::nullopt, truth)), ++k;
  for (const fs::path& d : a.inputs.graph_dirs)
    reports.push_back(evaluate_one(std::nullopt, d, truth)), ++k;
  if (reports.empty()) throw std::runtime_error("pass at least one --scores or --graph input");
  for (std::size_t i = 0; i < reports.size(); ++i)
    write_report(reports[i], a.out / ("report" + std::to_string(i) + ".txt"));
  const EvalReport final_report =
      reports.size() == 1 ? reports.front() : aggregate_replicas(reports);
  write_report(final_report, a.out / "report.txt");
  std::ofstream csv(a.out / "results.csv");
  csv << report_csv_header() << "\n" << report_csv_row(a.method, a.dataset, final_report) << "\n";
  std::cout << a.method << " " << a.dataset << ": auroc=" << final_report.auroc
            << " auprc=" << final_report.auprc << " acc=" << final_report.acc << "\n";
  return 0;
}

// ---- run: full recipe pipeline ----

int worker_pool_size(int replicas, int flag_threads) {
  int n = flag_threads;
  if (const char* env = std::getenv("UNCLE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, std::min(n, replicas));
}

struct RunArgs {
  fs::path recipe_file;
  fs::path out_override;
  int threads = 1;
};

int run_recipe(const RunArgs& a) {
  Recipe recipe = parse_recipe(a.recipe_file);
  if (!a.out_override.empty()) recipe.out_dir = a.out_override;
  if (recipe.out_dir.empty()) throw std::runtime_error("recipe has no out= and no --out flag given");
  const fs::path out = recipe.out_dir;
  const fs::path data_dir = out / "data";
  const fs::path model_dir = out / "models";
  const fs::path disc_dir = out / "discover";
  fs::create_directories(data_dir);
  fs::create_directories(model_dir);
  fs::create_directories(disc_dir);

  const int replicas = recipe.dataset.replicas;
  const bool dynamic_truth = truth_is_dynamic(recipe.dataset.generator);
  const bool want_perturb = recipe.eval.mode != "aggregate";
  const bool want_aggregate = recipe.eval.mode != "perturb";

  std::atomic<int> next{0};
  std::mutex fail_mu;
  std::string failure;

  auto pipeline = [&](int r) {
    const std::string tag = "replica" + std::to_string(r);
    const fs::path data_file = data_dir / (tag + ".csv");
    const fs::path truth_file = data_dir / (dynamic_truth ? "truth_manifest.csv" : "truth.csv");
    std::string stage = "generate";
    try {
      if (!fs::exists(data_file) || (r == 0 && !fs::exists(truth_file))) {
        GeneratedData g = generate_one(recipe.dataset, r);
        write_dataset_csv(g.data, data_file);
        if (r == 0) write_truth(g.truth, data_dir, "");
      }
      stage = "train";
      const fs::path ckpt = model_dir / (tag + ".ckpt");
      if (!fs::exists(ckpt)) {
        const TimeSeriesDataset data = read_dataset_csv(data_file);
        ModelConfig cfg = recipe.model;
        cfg.seed = recipe.model.seed + static_cast<std::uint64_t>(r);
        TrainResult result = train(data, cfg);
        save_checkpoint(result.model, ckpt);
        write_loss_trace_csv(result.trace, model_dir / (tag + ".trace.csv"));
      }
      stage = "discover";
      const fs::path g_dir = disc_dir / tag;
      if (want_perturb && !fs::exists(g_dir / "summary.csv")) {
        const UncleModel model = load_checkpoint(ckpt);
        const TimeSeriesDataset data = read_dataset_csv(data_file);
        PerturbationConfig pc = recipe.perturbation;
        pc.seed = recipe.perturbation.seed + static_cast<std::uint64_t>(r);
        const DynamicCausalGraph g = dynamic_graph(model, data, pc);
        write_dynamic_graph(g, g_dir);
        if (recipe.eval.smooth_sigma > 0.0)
          write_edge_series_csv(g, g_dir / "edge_series.csv", recipe.eval.smooth_sigma);
      }
      const fs::path agg_file = disc_dir / (tag + "_aggregate.csv");
      if (want_aggregate && !fs::exists(agg_file)) {
        const UncleModel model = load_checkpoint(ckpt);
        write_matrix_csv(aggregate_dependencies(model), agg_file);
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(fail_mu);
      if (failure.empty())
        failure = "stage " + stage + " failed for replica " + std::to_string(r) + ": " + e.what();
    }
  };

  const int pool = worker_pool_size(replicas, a.threads);
  std::vector<std::thread> workers;
  for (int w = 0; w < pool; ++w)
    workers.emplace_back([&] {
      for (int r; (r = next.fetch_add(1)) < replicas;) {
        {
          std::lock_guard<std::mutex> lock(fail_mu);
          if (!failure.empty()) return;
        }
        pipeline(r);
      }
    });
  for (std::thread& t : workers) t.join();
  if (!failure.empty()) throw std::runtime_error(failure);

  // Evaluation + results table.
  const GroundTruth truth = dynamic_truth ? read_dynamic_truth(data_dir / "truth_manifest.csv")
                                          : read_static_truth(data_dir / "truth.csv");
  std::ofstream table(out / "results.csv");
  table << report_csv_header() << "\n";
  const std::string dataset_name = recipe.dataset.generator;
  auto emit = [&](const std::string& method, const std::vector<EvalReport>& reps, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < reps.size(); ++i)
      write_report(reps[i], dir / ("report" + std::to_string(i) + ".txt"));
    const EvalReport agg = reps.size() == 1 ? reps.front() : aggregate_replicas(reps);
    write_report(agg, dir / "report.txt");
    table << report_csv_row(method, dataset_name, agg) << "\n";
    std::cout << method << " " << dataset_name << ": auroc=" << agg.auroc << " auprc=" << agg.auprc
              << " acc=" << agg.acc << "\n";
  };
  if (want_perturb) {
    std::vector<EvalReport> reps;
    for (int r = 0; r < replicas; ++r)
      reps.push_back(
          evaluate_one(std::nullopt, disc_dir / ("replica" + std::to_string(r)), truth));
    emit("UnCLe(P)", reps, out / "eval_perturb");
  }
  if (want_aggregate) {
    std::vector<EvalReport> reps;
    for (int r = 0; r < replicas; ++r)
      reps.push_back(
          evaluate_one(disc_dir / ("replica" + std::to_string(r) + "_aggregate.csv"), std::nullopt, truth));
    emit("UnCLe(A)", reps, out / "eval_aggregate");
  }
  write_provenance(out / "provenance.txt", recipe.dataset);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal causal discovery via uncoupled latent prediction"};
  app.set_version_flag("--version", std::string("uncle ") + kToolVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a synthetic corpus with ground truth");
  cmd_gen->add_option("--gen", gen.spec.generator, "lorenz96 | tvsem | nc8 | nd8")->required();
  cmd_gen->add_option("--T", gen.spec.num_steps, "timesteps (0 = generator default)");
  cmd_gen->add_option("--seed", gen.spec.seed, "base seed; replica r uses seed + r");
  cmd_gen->add_option("--replicas", gen.spec.replicas, "number of replicas");
  cmd_gen->add_option("--p", gen.spec.num_vars, "lorenz96 variable count");
  cmd_gen->add_option("--F", gen.spec.forcing, "lorenz96 forcing constant");
  cmd_gen->add_option("--t0-step", gen.spec.t0_step, "nc8 sinusoid offset per replica");
  cmd_gen->add_option("--out", gen.out, "output directory")->required();

  TrainArgs tr;
  std::string preset;
  auto* cmd_tr = app.add_subcommand("train", "Train a model on a dataset CSV");
  cmd_tr->add_option("--data", tr.data, "dataset CSV")->required()->check(CLI::ExistingFile);
  cmd_tr->add_option("--preset", preset, "hyperparameter preset name");
  cmd_tr->add_option("--channels,--filters", tr.config.channels);
  cmd_tr->add_option("--kernel-size", tr.config.kernel_size);
  cmd_tr->add_option("--num-blocks", tr.config.num_blocks);
  cmd_tr->add_option("--lag", tr.config.lag);
  cmd_tr->add_option("--dropout", tr.config.dropout_rate);
  cmd_tr->add_option("--alpha", tr.config.alpha);
  cmd_tr->add_option("--lambda1", tr.config.lambda1);
  cmd_tr->add_option("--lr", tr.config.lr);
  cmd_tr->add_option("--recon-epochs", tr.config.recon_epochs);
  cmd_tr->add_option("--joint-epochs", tr.config.joint_epochs);
  cmd_tr->add_option("--seed", tr.config.seed);
  cmd_tr->add_flag("--no-share-params", [&](std::int64_t) { tr.config.share_params = false; },
                   "independent TCN weights per variable");
  cmd_tr->add_flag("--disable-dependency-matrices", tr.config.disable_dependency_matrices);
  cmd_tr->add_option("--out", tr.out, "checkpoint output path")->required();
  cmd_tr->add_option("--trace", tr.trace, "loss trace CSV (default <out>.trace.csv)");

  DiscoverArgs di;
  std::string strategy = "permutation";
  auto* cmd_di = app.add_subcommand("discover", "Infer causal graphs from a trained model");
  cmd_di->add_option("--model", di.model, "checkpoint path")->required()->check(CLI::ExistingFile);
  cmd_di->add_option("--data", di.data, "dataset CSV (perturb mode)")->check(CLI::ExistingFile);
  cmd_di->add_option("--mode", di.mode, "perturb | aggregate")
      ->check(CLI::IsMember({"perturb", "aggregate"}));
  cmd_di->add_option("--strategy", strategy, "permutation | zero_mask | noise_injection | none");
  cmd_di->add_option("--repeats", di.perturbation.repeats);
  cmd_di->add_option("--noise-sigma", di.perturbation.noise_sigma);
  cmd_di->add_option("--seed", di.perturbation.seed);
  cmd_di->add_flag("--edge-series", di.edge_series, "also write per-edge strength time series");
  cmd_di->add_option("--smooth-sigma", di.smooth_sigma, "Gaussian smoothing for the edge series");
  cmd_di->add_option("--out", di.out, "output directory")->required();

  EvalArgs ev;
  auto* cmd_ev = app.add_subcommand("eval", "Score predictions against ground truth");
  cmd_ev->add_option("--scores", ev.inputs.score_files, "static score matrix CSV(s)");
  cmd_ev->add_option("--graph", ev.inputs.graph_dirs, "dynamic graph directory(ies)");
  cmd_ev->add_option("--truth", ev.truth_file, "static truth adjacency CSV");
  cmd_ev->add_option("--segments", ev.segments, "dynamic truth manifest CSV");
  cmd_ev->add_option("--method", ev.method, "method label for the CSV row");
  cmd_ev->add_option("--dataset", ev.dataset, "dataset label for the CSV row");
  cmd_ev->add_option("--out", ev.out, "output directory")->required();

  RunArgs ru;
  auto* cmd_ru = app.add_subcommand("run", "Execute a full recipe");
  cmd_ru->add_option("recipe", ru.recipe_file, "recipe file")->required()->check(CLI::ExistingFile);
  cmd_ru->add_option("--out", ru.out_override, "output directory (overrides recipe out=)");
  cmd_ru->add_option("--threads", ru.threads, "worker pool size (capped by UNCLE_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_gen) return run_generate(gen);
    if (*cmd_tr) {
      if (!preset.empty()) {
        // Preset supplies defaults; keep any value the user set explicitly.
        ModelConfig cfg = preset_config(preset);
        auto keep = [&](const char* flag, auto member) {
          if (cmd_tr->count(flag) == 0) tr.config.*member = cfg.*member;
        };
        keep("--channels", &ModelConfig::channels);
        keep("--kernel-size", &ModelConfig::kernel_size);
        keep("--num-blocks", &ModelConfig::num_blocks);
        keep("--lag", &ModelConfig::lag);
        keep("--lr", &ModelConfig::lr);
        keep("--recon-epochs", &ModelConfig::recon_epochs);
        keep("--joint-epochs", &ModelConfig::joint_epochs);
      }
      return run_train(tr);
    }
    if (*cmd_di) {
      di.perturbation.strategy = parse_strategy(strategy);
      return run_discover(di);
    }
    if (*cmd_ev) return run_eval(ev);
    if (*cmd_ru) return run_recipe(ru);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
