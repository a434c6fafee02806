#include "uncle/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uncle {

namespace {

constexpr char kMagic[] = "UNCL1\n";

Var init_conv_weight(Rng& rng, int c_out, int c_in, int k) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(c_in) * k);
  std::vector<double> w(static_cast<std::size_t>(c_out) * c_in * k);
  for (double& v : w) v = rng.uniform(-bound, bound);
  return make_param({c_out, c_in, k}, std::move(w));
}

Var init_conv_bias(Rng& rng, int c_out, int c_in, int k) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(c_in) * k);
  std::vector<double> b(static_cast<std::size_t>(c_out));
  for (double& v : b) v = rng.uniform(-bound, bound);
  return make_param({c_out}, std::move(b));
}

ConvParams init_conv(Rng& rng, int c_out, int c_in, int k, int dilation) {
  ConvParams c;
  c.weight = init_conv_weight(rng, c_out, c_in, k);
  c.bias = init_conv_bias(rng, c_out, c_in, k);
  c.dilation = dilation;
  return c;
}

TcnParams init_tcn(Rng& rng, const ModelConfig& cfg, int in_channels, int out_channels) {
  TcnParams p;
  int c_in = in_channels;
  for (int l = 0; l < cfg.num_blocks; ++l) {
    const int dilation = 1 << l;
    TcnBlockParams block;
    block.conv1 = init_conv(rng, cfg.channels, c_in, cfg.kernel_size, dilation);
    block.conv2 = init_conv(rng, cfg.channels, cfg.channels, cfg.kernel_size, dilation);
    if (c_in != cfg.channels) block.proj = init_conv(rng, cfg.channels, c_in, 1, 1);
    p.blocks.push_back(std::move(block));
    c_in = cfg.channels;
  }
  if (out_channels != cfg.channels) p.head = init_conv(rng, out_channels, cfg.channels, 1, 1);
  return p;
}

Var tcn_forward(const TcnParams& p, const Var& x, double dropout_rate, bool training, Rng& rng) {
  Var h = x;
  for (const TcnBlockParams& block : p.blocks) {
    Var c1 = dropout(relu(causal_conv1d(h, block.conv1.weight, block.conv1.bias, block.conv1.dilation)),
                     dropout_rate, training, rng);
    Var c2 = dropout(relu(causal_conv1d(c1, block.conv2.weight, block.conv2.bias, block.conv2.dilation)),
                     dropout_rate, training, rng);
    Var res = block.proj ? causal_conv1d(h, block.proj->weight, block.proj->bias, 1) : h;
    h = relu(add(c2, res));
  }
  if (p.head) h = causal_conv1d(h, p.head->weight, p.head->bias, 1);
  return h;
}

void collect_tcn(const TcnParams& p, std::vector<Var>& out) {
  for (const TcnBlockParams& block : p.blocks) {
    out.push_back(block.conv1.weight);
    out.push_back(block.conv1.bias);
    out.push_back(block.conv2.weight);
    out.push_back(block.conv2.bias);
    if (block.proj) {
      out.push_back(block.proj->weight);
      out.push_back(block.proj->bias);
    }
  }
  if (p.head) {
    out.push_back(p.head->weight);
    out.push_back(p.head->bias);
  }
}

}  // namespace

int ModelConfig::receptive_field() const {
  return 1 + 2 * (kernel_size - 1) * ((1 << num_blocks) - 1);
}

void ModelConfig::validate() const {
  if (channels < 1 || kernel_size < 1 || num_blocks < 1) throw std::invalid_argument("bad architecture dims");
  if (lag < 1) throw std::invalid_argument("lag must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw std::invalid_argument("dropout_rate must be in [0, 1)");
  if (alpha < 0.0 || lambda1 < 0.0) throw std::invalid_argument("alpha and lambda1 must be nonnegative");
  if (lr <= 0.0) throw std::invalid_argument("learning rate must be positive");
  if (recon_epochs < 0 || joint_epochs < 0) throw std::invalid_argument("epoch counts must be nonnegative");
  if (receptive_field() < 2) throw std::invalid_argument("TCN receptive field must be >= 2");
}

UncleModel UncleModel::init(const ModelConfig& config) {
  if (config.num_vars < 1) throw std::invalid_argument("num_vars must be set before init");
  config.validate();
  UncleModel m;
  m.config = config;
  Rng rng(config.seed);
  const int copies = config.share_params ? 1 : config.num_vars;
  for (int i = 0; i < copies; ++i) m.uncoupler.push_back(init_tcn(rng, config, 1, config.channels));
  for (int i = 0; i < copies; ++i) m.recoupler.push_back(init_tcn(rng, config, config.channels, 1));
  if (!config.disable_dependency_matrices) {
    const int n = config.num_vars;
    std::vector<double> psi(static_cast<std::size_t>(config.channels) * config.lag * n * n);
    for (double& v : psi) v = rng.uniform(-0.01, 0.01);
    m.psi = make_param({config.channels, config.lag, n, n}, std::move(psi));
  }
  m.norm_mean.assign(config.num_vars, 0.0);
  m.norm_std.assign(config.num_vars, 1.0);
  return m;
}

std::vector<Var> UncleModel::tcn_parameters() const {
  std::vector<Var> out;
  for (const TcnParams& p : uncoupler) collect_tcn(p, out);
  for (const TcnParams& p : recoupler) collect_tcn(p, out);
  return out;
}

std::vector<Var> UncleModel::parameters() const {
  std::vector<Var> out = tcn_parameters();
  if (psi) out.push_back(psi);
  return out;
}

Var UncleModel::uncouple(const Var& x, bool training, Rng& rng) const {
  if (x->rank() != 3 || x->dim(0) != config.num_vars || x->dim(1) != 1)
    contract_violation("uncouple expects [N, 1, T] with N matching the model");
  if (config.share_params) return tcn_forward(uncoupler[0], x, config.dropout_rate, training, rng);
  std::vector<Var> rows;
  for (int i = 0; i < config.num_vars; ++i)
    rows.push_back(tcn_forward(uncoupler[i], take_row(x, i), config.dropout_rate, training, rng));
  return stack_rows(rows);
}

Var UncleModel::recouple(const Var& z, bool training, Rng& rng) const {
  if (z->rank() != 3 || z->dim(0) != config.num_vars || z->dim(1) != config.channels)
    contract_violation("recouple expects [N, C, T] with N, C matching the model");
  if (config.share_params) return tcn_forward(recoupler[0], z, config.dropout_rate, training, rng);
  std::vector<Var> rows;
  for (int i = 0; i < config.num_vars; ++i)
    rows.push_back(tcn_forward(recoupler[i], take_row(z, i), config.dropout_rate, training, rng));
  return stack_rows(rows);
}

Var UncleModel::predict_latent(const Var& z) const {
  if (!psi) contract_violation("dependency matrices are disabled for this model");
  if (z->shape.back() <= config.lag) contract_violation("predict_latent requires T > lag");
  return relu(lagged_mix(z, psi));
}

Var UncleModel::predict_next(const Var& x, bool training, Rng& rng) const {
  const int t_n = x->shape.back();
  if (t_n <= config.lag) contract_violation("predict_next requires T > lag");
  Var z = uncouple(x, training, rng);
  if (config.disable_dependency_matrices) {
    // Prediction falls back to the TCN pair alone: the causal
    // reconstruction at time t serves as the forecast for t+1.
    Var xr = recouple(z, training, rng);
    return slice_time(xr, config.lag - 1, t_n - config.lag);
  }
  return recouple(predict_latent(z), training, rng);
}

void UncleModel::fit_normalization(const TimeSeriesDataset& data) {
  const int n = data.num_vars, t_n = data.num_steps;
  norm_mean.assign(n, 0.0);
  norm_std.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int t = 0; t < t_n; ++t) mean += data.at(i, t);
    mean /= t_n;
    double var = 0.0;
    for (int t = 0; t < t_n; ++t) {
      const double d = data.at(i, t) - mean;
      var += d * d;
    }
    var /= t_n;
    norm_mean[i] = mean;
    norm_std[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
}

std::vector<double> UncleModel::normalize(const TimeSeriesDataset& data) const {
  if (data.num_vars != config.num_vars) contract_violation("dataset N does not match the model");
  std::vector<double> out(data.values.size());
  for (int i = 0; i < data.num_vars; ++i)
    for (int t = 0; t < data.num_steps; ++t)
      out[static_cast<std::size_t>(i) * data.num_steps + t] = (data.at(i, t) - norm_mean[i]) / norm_std[i];
  return out;
}

Var UncleModel::make_input(const std::vector<double>& x_norm, int num_steps) const {
  return make_const({config.num_vars, 1, num_steps}, x_norm);
}

std::vector<double> UncleModel::predict_values(const std::vector<double>& x_norm, int num_steps) const {
  Rng rng(0);  // unused in eval mode
  Var xp = predict_next(make_input(x_norm, num_steps), /*training=*/false, rng);
  return xp->values;
}

TrainResult train(const TimeSeriesDataset& data, ModelConfig config) {
  if (config.num_vars == 0) config.num_vars = data.num_vars;
  if (config.num_vars != data.num_vars) contract_violation("config num_vars does not match the dataset");
  if (data.num_steps <= config.lag) contract_violation("train requires T > lag");
  config.validate();

  TrainResult result{UncleModel::init(config), {}};
  UncleModel& model = result.model;
  model.fit_normalization(data);
  const std::vector<double> x_norm = model.normalize(data);
  const int t_n = data.num_steps;
  const int n = config.num_vars;
  const int horizon = t_n - config.lag;

  const Var x = model.make_input(x_norm, t_n);
  std::vector<double> target_vals(static_cast<std::size_t>(n) * horizon);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < horizon; ++t)
      target_vals[static_cast<std::size_t>(i) * horizon + t] =
          x_norm[static_cast<std::size_t>(i) * t_n + config.lag + t];
  const Var target = make_const({n, 1, horizon}, std::move(target_vals));

  Rng rng(Rng::derive(config.seed, 0x747261696eULL));  // dropout stream
  const std::vector<Var> all_params = model.parameters();
  const std::vector<Var> tcn_params = model.tcn_parameters();
  std::vector<AdamState> states = make_adam_states(all_params);
  const std::span<AdamState> tcn_states{states.data(), tcn_params.size()};
  AdamOptions opt;
  opt.lr = config.lr;

  auto check_finite = [](double v, int epoch, const char* stage) {
    if (!std::isfinite(v))
      throw TrainingDiverged(epoch, std::string("training loss became non-finite at ") + stage +
                                        " epoch " + std::to_string(epoch));
  };

  int epoch = 0;
  for (int e = 0; e < config.recon_epochs; ++e, ++epoch) {
    Var z = model.uncouple(x, /*training=*/true, rng);
    Var xr = model.recouple(z, /*training=*/true, rng);
    Var recon = mse(xr, x);
    check_finite(recon->values[0], epoch, "pretraining");
    result.trace.push_back({epoch, 1, recon->values[0], 0.0, 0.0, recon->values[0]});
    zero_grads(tcn_params);
    backward(recon);
    adam_step(tcn_params, tcn_states, opt);
  }

  for (int e = 0; e < config.joint_epochs; ++e, ++epoch) {
    Var z = model.uncouple(x, /*training=*/true, rng);
    Var xr = model.recouple(z, /*training=*/true, rng);
    Var recon = mse(xr, x);

    Var pred;
    if (config.disable_dependency_matrices) {
      pred = mse(slice_time(xr, config.lag - 1, horizon), target);
    } else {
      Var xp = model.recouple(model.predict_latent(z), /*training=*/true, rng);
      pred = mse(xp, target);
    }

    Var total = recon;
    if (config.alpha > 0.0) total = add(total, scale(pred, config.alpha));
    double l1_val = 0.0;
    if (model.psi && config.lambda1 > 0.0) {
      const Var psi_arr[] = {model.psi};
      Var l1 = scale(l1_sum(psi_arr), config.lambda1);
      l1_val = l1->values[0];
      total = add(total, l1);
    }
    check_finite(total->values[0], epoch, "joint");
    result.trace.push_back({epoch, 2, recon->values[0], pred->values[0], l1_val, total->values[0]});
    zero_grads(all_params);
    backward(total);
    adam_step(all_params, states, opt);
  }
  return result;
}

void write_loss_trace_csv(const std::vector<EpochLoss>& trace, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(17);
  out << "epoch,stage,recon,pred,l1,total\n";
  for (const EpochLoss& e : trace)
    out << e.epoch << "," << e.stage << "," << e.recon << "," << e.pred << "," << e.l1 << ","
        << e.total << "\n";
}

// --- checkpoint I/O ---

namespace {

void write_doubles_csv_field(std::ostream& out, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(std::stod(field));
  return out;
}

}  // namespace

void save_checkpoint(const UncleModel& model, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.precision(17);
  const ModelConfig& c = model.config;
  out << kMagic;
  out << "num_vars=" << c.num_vars << "\n";
  out << "channels=" << c.channels << "\n";
  out << "kernel_size=" << c.kernel_size << "\n";
  out << "num_blocks=" << c.num_blocks << "\n";
  out << "lag=" << c.lag << "\n";
  out << "dropout_rate=" << c.dropout_rate << "\n";
  out << "alpha=" << c.alpha << "\n";
  out << "lambda1=" << c.lambda1 << "\n";
  out << "lr=" << c.lr << "\n";
  out << "recon_epochs=" << c.recon_epochs << "\n";
  out << "joint_epochs=" << c.joint_epochs << "\n";
  out << "share_params=" << (c.share_params ? 1 : 0) << "\n";
  out << "disable_dependency_matrices=" << (c.disable_dependency_matrices ? 1 : 0) << "\n";
  out << "seed=" << c.seed << "\n";
  out << "norm_mean=";
  write_doubles_csv_field(out, model.norm_mean);
  out << "\nnorm_std=";
  write_doubles_csv_field(out, model.norm_std);
  out << "\nend_header\n";
  for (const Var& p : model.parameters()) {
    const std::uint64_t len = p->values.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(reinterpret_cast<const char*>(p->values.data()),
              static_cast<std::streamsize>(len * sizeof(double)));
  }
}

UncleModel load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::string magic(6, '\0');
  in.read(magic.data(), 6);
  if (magic != kMagic) throw std::runtime_error("not an UNCL1 checkpoint: " + file.string());

  ModelConfig c;
  std::vector<double> mean, stddev;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed checkpoint header line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "num_vars") c.num_vars = std::stoi(val);
    else if (key == "channels") c.channels = std::stoi(val);
    else if (key == "kernel_size") c.kernel_size = std::stoi(val);
    else if (key == "num_blocks") c.num_blocks = std::stoi(val);
    else if (key == "lag") c.lag = std::stoi(val);
    else if (key == "dropout_rate") c.dropout_rate = std::stod(val);
    else if (key == "alpha") c.alpha = std::stod(val);
    else if (key == "lambda1") c.lambda1 = std::stod(val);
    else if (key == "lr") c.lr = std::stod(val);
    else if (key == "recon_epochs") c.recon_epochs = std::stoi(val);
    else if (key == "joint_epochs") c.joint_epochs = std::stoi(val);
    else if (key == "share_params") c.share_params = std::stoi(val) != 0;
    else if (key == "disable_dependency_matrices") c.disable_dependency_matrices = std::stoi(val) != 0;
    else if (key == "seed") c.seed = std::stoull(val);
    else if (key == "norm_mean") mean = parse_doubles(val);
    else if (key == "norm_std") stddev = parse_doubles(val);
    else throw std::runtime_error("unknown checkpoint header key: " + key);
  }

  UncleModel model = UncleModel::init(c);
  if (static_cast<int>(mean.size()) != c.num_vars || static_cast<int>(stddev.size()) != c.num_vars)
    throw std::runtime_error("checkpoint normalization stats do not match num_vars");
  model.norm_mean = std::move(mean);
  model.norm_std = std::move(stddev);
  for (const Var& p : model.parameters()) {
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len != p->values.size())
      throw std::runtime_error("checkpoint parameter block size mismatch in " + file.string());
    in.read(reinterpret_cast<char*>(p->values.data()),
            static_cast<std::streamsize>(len * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + file.string());
  }
  return model;
}

}  // namespace uncle
