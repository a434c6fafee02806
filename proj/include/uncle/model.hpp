#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uncle/adam.hpp"
#include "uncle/dataset.hpp"
#include "uncle/rng.hpp"
#include "uncle/tensor.hpp"

namespace uncle {

struct ModelConfig {
  int num_vars = 0;  // filled from the dataset when 0
  int channels = 8;  // kernel filters C
  int kernel_size = 3;
  int num_blocks = 4;
  int lag = 1;
  double dropout_rate = 0.2;
  double alpha = 1.0;
  double lambda1 = 3e-4;
  double lr = 2e-3;
  int recon_epochs = 500;
  int joint_epochs = 2500;
  bool share_params = true;
  bool disable_dependency_matrices = false;
  std::uint64_t seed = 0;

  int receptive_field() const;  // of one TCN stack
  void validate() const;
};

struct ConvParams {
  Var weight;  // [C_out, C_in, K]
  Var bias;    // [C_out]
  int dilation = 1;
};

struct TcnBlockParams {
  ConvParams conv1, conv2;
  std::optional<ConvParams> proj;  // 1x1, present when channel counts differ
};

// One dilated causal TCN stack: blocks with dilation 2^l, optionally
// followed by a linear 1x1 output convolution.
struct TcnParams {
  std::vector<TcnBlockParams> blocks;
  std::optional<ConvParams> head;  // recoupler's C -> 1 output conv
};

// Uncoupler/Recoupler pair plus the C x L dependency matrices.
class UncleModel {
 public:
  ModelConfig config;
  std::vector<TcnParams> uncoupler;  // one entry when share_params, else N
  std::vector<TcnParams> recoupler;
  Var psi;  // [C, L, N, N]; null when dependency matrices are disabled
  std::vector<double> norm_mean, norm_std;  // per-variable z-score stats

  static UncleModel init(const ModelConfig& config);

  // All learnable tensors in checkpoint declaration order.
  std::vector<Var> parameters() const;
  std::vector<Var> tcn_parameters() const;

  // Graph-building forward passes. x is [N, 1, T]; z is [N, C, T].
  Var uncouple(const Var& x, bool training, Rng& rng) const;
  Var recouple(const Var& z, bool training, Rng& rng) const;
  Var predict_latent(const Var& z) const;                       // [N, C, T-L]
  Var predict_next(const Var& x, bool training, Rng& rng) const;  // [N, 1, T-L]

  // Normalization helpers (z-score per variable, stats from training data).
  void fit_normalization(const TimeSeriesDataset& data);
  std::vector<double> normalize(const TimeSeriesDataset& data) const;  // flat [N*T]
  Var make_input(const std::vector<double>& x_norm, int num_steps) const;

  // Eval-mode next-step predictions on normalized data, flat [N * (T-L)].
  std::vector<double> predict_values(const std::vector<double>& x_norm, int num_steps) const;
};

struct EpochLoss {
  int epoch = 0;
  int stage = 0;  // 1 = reconstruction pretraining, 2 = joint
  double recon = 0.0, pred = 0.0, l1 = 0.0, total = 0.0;
};

struct TrainResult {
  UncleModel model;
  std::vector<EpochLoss> trace;
};

// Two-stage training: recon_epochs full-batch Adam steps on the
// reconstruction loss over the TCN parameters, then joint_epochs steps on
// the composite loss over all parameters. Deterministic given config.seed.
TrainResult train(const TimeSeriesDataset& data, ModelConfig config);

// Thrown when the training loss stops being finite.
struct TrainingDiverged : std::runtime_error {
  int epoch;
  TrainingDiverged(int e, const std::string& msg) : std::runtime_error(msg), epoch(e) {}
};

void save_checkpoint(const UncleModel& model, const std::filesystem::path& file);
UncleModel load_checkpoint(const std::filesystem::path& file);

void write_loss_trace_csv(const std::vector<EpochLoss>& trace, const std::filesystem::path& file);

}  // namespace uncle
