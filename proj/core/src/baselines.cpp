#include "fedtrident/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fedtrident/gmm.hpp"

namespace fedtrident {

namespace {

void check_same_shape(const std::vector<ModelParams>& models) {
  for (std::size_t i = 1; i < models.size(); ++i)
    if (!models[i].same_shape(models[0]))
      throw std::invalid_argument("aggregation: model shape mismatch");
}

}  // namespace

std::size_t krum_select(const std::vector<ModelParams>& models) {
  if (models.size() < 2)
    throw std::invalid_argument("krum: need at least 2 models");
  check_same_shape(models);
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < models.size(); ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < models.size(); ++j) {
      if (j == i) continue;
      double sq = 0.0;
      for (std::size_t c = 0; c < models[i].size(); ++c) {
        double d = models[i].values[c] - models[j].values[c];
        sq += d * d;
      }
      score += sq;
    }
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

ModelParams krum(const std::vector<ModelParams>& models) {
  return models[krum_select(models)];
}

ModelParams trimmed_mean(const std::vector<ModelParams>& models,
                         double trim_fraction) {
  if (models.empty()) throw std::invalid_argument("trimmed_mean: no models");
  if (trim_fraction < 0.0 || trim_fraction >= 0.5)
    throw std::invalid_argument("trimmed_mean: trim_fraction must be in [0, 0.5)");
  check_same_shape(models);
  const std::size_t n = models.size();
  const auto k = static_cast<std::size_t>(trim_fraction * static_cast<double>(n));
  if (2 * k >= n)
    throw std::invalid_argument("trimmed_mean: trimming would drop every model");

  ModelParams out = ModelParams::zeros(models[0].input_dim, models[0].hidden_dim,
                                       models[0].num_classes);
  Vector column(n);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = models[i].values[c];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (std::size_t i = k; i < n - k; ++i) sum += column[i];
    out.values[c] = sum / static_cast<double>(n - 2 * k);
  }
  return out;
}

ModelParams coordinate_median(const std::vector<ModelParams>& models) {
  if (models.empty()) throw std::invalid_argument("coordinate_median: no models");
  check_same_shape(models);
  const std::size_t n = models.size();
  ModelParams out = ModelParams::zeros(models[0].input_dim, models[0].hidden_dim,
                                       models[0].num_classes);
  Vector column(n);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = models[i].values[c];
    std::sort(column.begin(), column.end());
    out.values[c] = (n % 2 == 1) ? column[n / 2]
                                 : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return out;
}

std::vector<double> foolsgold_weights(const std::vector<Vector>& histories) {
  const std::size_t n = histories.size();
  if (n == 0) return {};
  if (n == 1) return {1.0};

  // pairwise cosine similarity; undefined pairs (zero-norm history) read as 0
  std::vector<std::vector<double>> cs(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      auto c = cosine_similarity(histories[i], histories[j]);
      cs[i][j] = cs[j][i] = c.value_or(0.0);
    }

  std::vector<double> max_cs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) max_cs[i] = std::max(max_cs[i], cs[i][j]);

  // pardoning: scale down similarity seen from clients that are themselves
  // less "sybil-like" than their counterpart
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && max_cs[j] > max_cs[i] && max_cs[j] > 0.0)
        cs[i][j] *= max_cs[i] / max_cs[j];

  std::vector<double> alpha(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) m = std::max(m, cs[i][j]);
    alpha[i] = 1.0 - m;
  }

  double alpha_max = *std::max_element(alpha.begin(), alpha.end());
  if (alpha_max <= 0.0) return std::vector<double>(n, 0.0);
  for (double& a : alpha) a /= alpha_max;

  std::vector<double> weights(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double a = alpha[i];
    if (a >= 1.0) {
      weights[i] = 1.0;
    } else if (a <= 0.0) {
      weights[i] = 0.0;
    } else {
      weights[i] = std::clamp(std::log(a / (1.0 - a)) + 0.5, 0.0, 1.0);
    }
  }
  return weights;
}

FlameResult flame(const std::vector<ModelParams>& models,
                  const ModelParams& prev_global, double lambda,
                  SeededRng& rng) {
  if (models.size() < 2) throw std::invalid_argument("flame: need at least 2 models");
  if (lambda < 0.0) throw std::invalid_argument("flame: lambda must be >= 0");
  check_same_shape(models);
  if (!models[0].same_shape(prev_global))
    throw std::invalid_argument("flame: global shape mismatch");

  const std::size_t n = models.size();
  std::vector<Vector> deltas(n);
  Vector norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    deltas[i].resize(models[i].size());
    double sq = 0.0;
    for (std::size_t c = 0; c < models[i].size(); ++c) {
      double d = models[i].values[c] - prev_global.values[c];
      deltas[i][c] = d;
      sq += d * d;
    }
    norms[i] = std::sqrt(sq);
  }

  // each client's feature: its row of pairwise cosine distances
  std::vector<Vector> features(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      auto c = cosine_similarity(deltas[i], deltas[j]);
      double dist = 1.0 - c.value_or(0.0);
      features[i][j] = dist;
      features[j][i] = dist;
    }

  FlameResult result;
  GmmModel model = gmm_fit(features);
  if (model.degenerate) {
    for (std::size_t i = 0; i < n; ++i) result.admitted.push_back(i);
  } else {
    std::vector<int> assign = gmm_hard_assign(model);
    std::size_t ones = 0;
    for (int a : assign) ones += static_cast<std::size_t>(a);
    // majority cluster admitted; exact tie keeps the cluster of the first model
    int keep;
    if (ones * 2 == n)
      keep = assign[0];
    else
      keep = ones * 2 > n ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (assign[i] == keep)
        result.admitted.push_back(i);
      else
        result.rejected.push_back(i);
    }
  }

  Vector admitted_norms;
  for (auto i : result.admitted) admitted_norms.push_back(norms[i]);
  std::sort(admitted_norms.begin(), admitted_norms.end());
  const std::size_t m = admitted_norms.size();
  const double median_norm = (m % 2 == 1)
                                 ? admitted_norms[m / 2]
                                 : 0.5 * (admitted_norms[m / 2 - 1] + admitted_norms[m / 2]);

  ModelParams aggregate = prev_global;
  Vector mean_delta(prev_global.size(), 0.0);
  for (auto i : result.admitted) {
    double clip = (norms[i] > 0.0) ? std::min(1.0, median_norm / norms[i]) : 1.0;
    for (std::size_t c = 0; c < mean_delta.size(); ++c)
      mean_delta[c] += clip * deltas[i][c];
  }
  const double inv = 1.0 / static_cast<double>(result.admitted.size());
  const double noise_std = lambda * median_norm;
  for (std::size_t c = 0; c < mean_delta.size(); ++c) {
    double noise = noise_std > 0.0 ? noise_std * rng.normal() : 0.0;
    aggregate.values[c] += mean_delta[c] * inv + noise;
  }
  result.aggregate = std::move(aggregate);
  return result;
}

}  // namespace fedtrident
