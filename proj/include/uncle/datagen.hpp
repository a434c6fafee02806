#pragma once

#include <cstdint>
#include <utility>

#include "uncle/dataset.hpp"

namespace uncle {

struct GeneratedData {
  TimeSeriesDataset data;
  GroundTruth truth;
};

struct Lorenz96Params {
  int num_vars = 20;
  int num_steps = 250;
  double forcing = 10.0;
  double dt = 0.01;
  int subsample = 10;      // effective sampling interval dt * subsample
  double obs_noise = 0.1;  // additive N(0, sd^2) observation noise
  int burn_in = 1000;      // integration steps discarded before recording
};

// Lorenz-96 ODE, RK4 integration, cyclic indexing. Static ground truth:
// causes(i) = {i-2, i-1, i, i+1}.
GeneratedData gen_lorenz96(const Lorenz96Params& p, std::uint64_t seed);

// Bivariate SEM whose dominant causal direction alternates every 400 steps.
GeneratedData gen_tvsem(int num_steps, std::uint64_t seed);

// Eight nonlinear series with constant causal structure and lags 1-16.
// t0 shifts the driving sinusoids (the replicas' differing start offsets).
GeneratedData gen_nc8(int num_steps, int t0, std::uint64_t seed);

// NC8 variant where the x-y and a-b causal directions reverse every 500
// steps; z, w, c, o keep the NC8 equations throughout.
GeneratedData gen_nd8(int num_steps, std::uint64_t seed);

}  // namespace uncle
