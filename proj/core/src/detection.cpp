#include "fedtrident/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedtrident {

namespace {

constexpr double kZeroNorm = 1e-12;

}  // namespace

NeuronFeatureTable compute_neuron_features(const std::vector<ModelParams>& locals,
                                           const ModelParams& prev_global) {
  if (locals.size() < 2)
    throw std::invalid_argument(
        "compute_neuron_features: need at least 2 participants");
  for (const auto& m : locals)
    if (!m.same_shape(prev_global))
      throw std::invalid_argument("compute_neuron_features: shape mismatch");

  const int num_neurons = prev_global.num_classes;
  const int slice_len = prev_global.hidden_dim + 1;
  const std::size_t n = locals.size();

  NeuronFeatureTable t;
  t.num_neurons = num_neurons;
  t.slice_len = slice_len;
  t.deltas.resize(n);
  t.magnitudes.assign(n, Vector(static_cast<std::size_t>(num_neurons), 0.0));
  t.accumulated_magnitude.assign(static_cast<std::size_t>(num_neurons), 0.0);
  t.consensus_mean.assign(static_cast<std::size_t>(num_neurons),
                          Vector(static_cast<std::size_t>(slice_len), 0.0));
  t.inconsistency.assign(static_cast<std::size_t>(num_neurons), 0.0);
  t.score.assign(static_cast<std::size_t>(num_neurons), 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    t.deltas[k].resize(static_cast<std::size_t>(num_neurons));
    for (int l = 1; l <= num_neurons; ++l) {
      Vector local_slice = output_neuron_slice(locals[k], l);
      Vector global_slice = output_neuron_slice(prev_global, l);
      Vector delta(static_cast<std::size_t>(slice_len));
      double sq = 0.0;
      for (int i = 0; i < slice_len; ++i) {
        double d = local_slice[static_cast<std::size_t>(i)] -
                   global_slice[static_cast<std::size_t>(i)];
        delta[static_cast<std::size_t>(i)] = d;
        sq += d * d;
      }
      const auto li = static_cast<std::size_t>(l - 1);
      t.magnitudes[k][li] = std::sqrt(sq);
      t.accumulated_magnitude[li] += t.magnitudes[k][li];
      for (int i = 0; i < slice_len; ++i)
        t.consensus_mean[li][static_cast<std::size_t>(i)] += delta[static_cast<std::size_t>(i)];
      t.deltas[k][li] = std::move(delta);
    }
  }
  for (auto& mu : t.consensus_mean)
    for (double& v : mu) v /= static_cast<double>(n);

  for (int l = 0; l < num_neurons; ++l) {
    const auto li = static_cast<std::size_t>(l);
    const Vector& mu = t.consensus_mean[li];
    double mu_sq = 0.0;
    for (double v : mu) mu_sq += v * v;
    double inconsistency = 0.0;
    if (std::sqrt(mu_sq) > kZeroNorm) {
      double cos_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (t.magnitudes[k][li] <= kZeroNorm) {
          cos_sum += 1.0;  // a zero update does not disagree with anyone
          continue;
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) dot += t.deltas[k][li][i] * mu[i];
        cos_sum += std::clamp(dot / (t.magnitudes[k][li] * std::sqrt(mu_sq)), -1.0, 1.0);
      }
      inconsistency = 1.0 - cos_sum / static_cast<double>(n);
    }
    t.inconsistency[li] = inconsistency;
    t.score[li] = t.accumulated_magnitude[li] * (1.0 + inconsistency);
  }
  return t;
}

std::pair<int, int> identify_source_target(const NeuronFeatureTable& table) {
  if (table.num_neurons < 2)
    throw std::invalid_argument("identify_source_target: need >= 2 neurons");
  int first = 0, second = 1;
  if (table.score[1] > table.score[0]) std::swap(first, second);
  for (int l = 2; l < table.num_neurons; ++l) {
    const auto li = static_cast<std::size_t>(l);
    if (table.score[li] > table.score[static_cast<std::size_t>(first)]) {
      second = first;
      first = l;
    } else if (table.score[li] > table.score[static_cast<std::size_t>(second)]) {
      second = l;
    }
  }
  int low = std::min(first, second) + 1;
  int high = std::max(first, second) + 1;
  return {low, high};
}

std::vector<Vector> build_feature_set(const NeuronFeatureTable& table,
                                      int neuron_low, int neuron_high) {
  if (neuron_low < 1 || neuron_high < 1 || neuron_low > table.num_neurons ||
      neuron_high > table.num_neurons || neuron_low == neuron_high)
    throw std::invalid_argument("build_feature_set: invalid neuron pair");
  std::vector<Vector> features;
  features.reserve(table.deltas.size());
  for (const auto& row : table.deltas) {
    Vector f;
    f.reserve(static_cast<std::size_t>(table.slice_len) * 2);
    const Vector& a = row[static_cast<std::size_t>(neuron_low - 1)];
    const Vector& b = row[static_cast<std::size_t>(neuron_high - 1)];
    f.insert(f.end(), a.begin(), a.end());
    f.insert(f.end(), b.begin(), b.end());
    features.push_back(std::move(f));
  }
  return features;
}

DetectionSplit split_good_bad(const std::vector<Vector>& points,
                              const GmmModel& model,
                              const std::vector<int>& participants) {
  if (points.size() != participants.size())
    throw std::invalid_argument("split_good_bad: points/participants mismatch");

  DetectionSplit split;
  auto all_good = [&] {
    split.ambiguous = true;
    split.good = participants;
    split.bad.clear();
    return split;
  };

  if (model.degenerate || points.size() < 2) return all_good();

  std::vector<int> assign = gmm_hard_assign(model);
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < assign.size(); ++i)
    members[static_cast<std::size_t>(assign[i])].push_back(i);
  if (members[0].empty() || members[1].empty()) return all_good();

  // density = mean distance to the (hard-assigned) cluster centroid
  const std::size_t dim = points[0].size();
  std::array<double, 2> density{0.0, 0.0};
  for (int c = 0; c < 2; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    Vector centroid(dim, 0.0);
    for (auto i : members[cc])
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += points[i][d];
    for (double& v : centroid) v /= static_cast<double>(members[cc].size());
    double sum = 0.0;
    for (auto i : members[cc]) {
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        double diff = points[i][d] - centroid[d];
        sq += diff * diff;
      }
      sum += std::sqrt(sq);
    }
    density[cc] = sum / static_cast<double>(members[cc].size());
  }

  const int denser = density[0] <= density[1] ? 0 : 1;
  const int looser = 1 - denser;
  const double d_dense = density[static_cast<std::size_t>(denser)];
  const double d_loose = density[static_cast<std::size_t>(looser)];
  double ratio;
  if (d_dense <= kZeroNorm) {
    ratio = d_loose <= kZeroNorm ? 1.0
                                 : std::numeric_limits<double>::infinity();
  } else {
    ratio = d_loose / d_dense;
  }
  split.density_ratio = ratio;

  const bool majority_guard =
      2 * members[static_cast<std::size_t>(denser)].size() > points.size();
  if (ratio < kDensityRatioGuard || majority_guard) {
    split.ambiguous = true;
    split.good = participants;
    return split;
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (assign[i] == denser)
      split.bad.push_back(participants[i]);
    else
      split.good.push_back(participants[i]);
  }
  return split;
}

}  // namespace fedtrident
