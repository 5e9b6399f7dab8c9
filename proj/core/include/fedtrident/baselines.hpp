#pragma once

#include <vector>

#include "fedtrident/mlp.hpp"
#include "fedtrident/rng.hpp"

namespace fedtrident {

struct BaselineConfig {
  double trim_fraction = 0.2;   // trimmed mean, per side
  double flame_lambda = 0.001;  // noise factor relative to the median norm
  int foolsgold_horizon = 0;    // rounds of history used; 0 = full run
};

// Index of the model with the smallest sum of squared distances to all
// others; ties go to the lowest index.
std::size_t krum_select(const std::vector<ModelParams>& models);
ModelParams krum(const std::vector<ModelParams>& models);

// Per coordinate, drop floor(trim_fraction*n) lowest and highest values and
// average the rest.
ModelParams trimmed_mean(const std::vector<ModelParams>& models,
                         double trim_fraction);

// Per-coordinate median; even counts average the middle two.
ModelParams coordinate_median(const std::vector<ModelParams>& models);

// Contribution weights in [0,1] from pairwise cosine similarity of the
// clients' accumulated output-layer update histories: near-identical
// histories are driven to 0, dissimilar ones keep full weight.
std::vector<double> foolsgold_weights(const std::vector<Vector>& histories);

struct FlameResult {
  ModelParams aggregate;
  std::vector<std::size_t> admitted;  // indices into the input
  std::vector<std::size_t> rejected;
};

// Cosine-distance clustering (majority cluster admitted), clipping to the
// median admitted norm, averaging, then per-coordinate Gaussian noise of
// stddev lambda * median norm.
FlameResult flame(const std::vector<ModelParams>& models,
                  const ModelParams& prev_global, double lambda,
                  SeededRng& rng);

}  // namespace fedtrident
