#include "uncle/recipe.hpp"

#include <fstream>
#include <stdexcept>

namespace uncle {

namespace {

struct PresetRow {
  const char* name;
  int lag, kernel, blocks, filters, recon_epochs, joint_epochs;
  double lr;
};

// One row per experiment; reconstruction epochs come first, then joint.
const PresetRow kPresets[] = {
    {"lorenz1", 1, 8, 6, 20, 1000, 2000, 5e-3},
    {"lorenz2", 1, 6, 8, 12, 1000, 2500, 2e-3},
    {"lorenz3", 1, 3, 6, 18, 500, 2500, 1e-3},
    {"tvsem", 1, 3, 4, 8, 500, 2500, 2e-3},
    {"nc8", 1, 8, 6, 20, 1000, 2000, 3e-4},
    {"nd8", 1, 8, 6, 20, 1000, 2000, 3e-4},
    {"finance", 2, 2, 3, 24, 500, 10000, 3e-4},
    {"fmri", 1, 6, 8, 12, 1000, 2000, 1e-5},
};

int to_int(const std::string& v) { return std::stoi(v); }
double to_double(const std::string& v) { return std::stod(v); }
bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ModelConfig preset_config(const std::string& name) {
  for (const PresetRow& row : kPresets) {
    if (name == row.name) {
      ModelConfig m;
      m.lag = row.lag;
      m.kernel_size = row.kernel;
      m.num_blocks = row.blocks;
      m.channels = row.filters;
      m.recon_epochs = row.recon_epochs;
      m.joint_epochs = row.joint_epochs;
      m.lr = row.lr;
      return m;
    }
  }
  throw std::invalid_argument("unknown preset: " + name);
}

void apply_model_key(ModelConfig& m, const std::string& key, const std::string& value) {
  if (key == "preset") {
    const ModelConfig base = preset_config(value);
    const std::uint64_t seed = m.seed;  // preset never overrides an explicit seed
    m = base;
    m.seed = seed;
  } else if (key == "channels" || key == "filters")
    m.channels = to_int(value);
  else if (key == "kernel_size")
    m.kernel_size = to_int(value);
  else if (key == "num_blocks")
    m.num_blocks = to_int(value);
  else if (key == "lag")
    m.lag = to_int(value);
  else if (key == "dropout_rate")
    m.dropout_rate = to_double(value);
  else if (key == "alpha")
    m.alpha = to_double(value);
  else if (key == "lambda1")
    m.lambda1 = to_double(value);
  else if (key == "lr")
    m.lr = to_double(value);
  else if (key == "recon_epochs")
    m.recon_epochs = to_int(value);
  else if (key == "joint_epochs")
    m.joint_epochs = to_int(value);
  else if (key == "share_params")
    m.share_params = to_bool(value);
  else if (key == "disable_dependency_matrices")
    m.disable_dependency_matrices = to_bool(value);
  else if (key == "seed")
    m.seed = std::stoull(value);
  else
    throw std::invalid_argument("unknown [model] key: " + key);
}

void apply_perturbation_key(PerturbationConfig& p, const std::string& key, const std::string& value) {
  if (key == "strategy")
    p.strategy = parse_strategy(value);
  else if (key == "noise_sigma")
    p.noise_sigma = to_double(value);
  else if (key == "repeats")
    p.repeats = to_int(value);
  else if (key == "seed")
    p.seed = std::stoull(value);
  else
    throw std::invalid_argument("unknown [perturbation] key: " + key);
}

Recipe parse_recipe(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read recipe " + file.string());
  Recipe r;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      if (section != "dataset" && section != "model" && section != "perturbation" && section != "eval")
        throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": unknown section [" +
                                 section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (section.empty()) {
        if (key == "out")
          r.out_dir = value;
        else
          throw std::invalid_argument("unknown top-level key: " + key);
      } else if (section == "dataset") {
        if (key == "generator")
          r.dataset.generator = value;
        else if (key == "num_steps")
          r.dataset.num_steps = to_int(value);
        else if (key == "replicas")
          r.dataset.replicas = to_int(value);
        else if (key == "seed")
          r.dataset.seed = std::stoull(value);
        else if (key == "num_vars")
          r.dataset.num_vars = to_int(value);
        else if (key == "forcing")
          r.dataset.forcing = to_double(value);
        else if (key == "t0_step")
          r.dataset.t0_step = to_int(value);
        else
          throw std::invalid_argument("unknown [dataset] key: " + key);
      } else if (section == "model") {
        apply_model_key(r.model, key, value);
      } else if (section == "perturbation") {
        apply_perturbation_key(r.perturbation, key, value);
      } else {  // eval
        if (key == "mode") {
          if (value != "perturb" && value != "aggregate" && value != "both")
            throw std::invalid_argument("eval mode must be perturb, aggregate, or both");
          r.eval.mode = value;
        } else if (key == "smooth_sigma")
          r.eval.smooth_sigma = to_double(value);
        else
          throw std::invalid_argument("unknown [eval] key: " + key);
      }
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (r.dataset.generator.empty()) throw std::runtime_error(file.string() + ": missing dataset generator");
  if (r.dataset.replicas < 1) throw std::runtime_error(file.string() + ": replicas must be >= 1");
  return r;
}

}  // namespace uncle
