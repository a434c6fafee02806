#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "uncle/discovery.hpp"
#include "uncle/model.hpp"

namespace uncle {

struct DatasetSpec {
  std::string generator;  // lorenz96 | tvsem | nc8 | nd8
  int num_steps = 0;      // 0 -> generator default
  int replicas = 1;
  std::uint64_t seed = 0;  // replica r uses seed + r
  // lorenz96 only
  int num_vars = 20;
  double forcing = 10.0;
  // nc8 only: replica r starts its driving sinusoids at r * t0_step
  int t0_step = 100;
};

struct EvalSpec {
  std::string mode = "perturb";  // perturb | aggregate | both
  double smooth_sigma = 0.0;     // for the edge time-series export
};

struct Recipe {
  DatasetSpec dataset;
  ModelConfig model;
  PerturbationConfig perturbation;
  EvalSpec eval;
  std::filesystem::path out_dir;  // optional in the file, overridable by flag
};

// Hyperparameter presets keyed by experiment name: lorenz1 lorenz2 lorenz3
// tvsem nc8 nd8 finance fmri. Throws std::invalid_argument on unknown names.
ModelConfig preset_config(const std::string& name);

// Plain-text key=value format with [dataset] [model] [perturbation] [eval]
// section headers; '#' starts a comment. Unknown keys are errors.
Recipe parse_recipe(const std::filesystem::path& file);

// Shared by parse_recipe and the CLI flag layer.
void apply_model_key(ModelConfig& m, const std::string& key, const std::string& value);
void apply_perturbation_key(PerturbationConfig& p, const std::string& key, const std::string& value);

}  // namespace uncle
