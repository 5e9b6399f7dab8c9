#include "fedtrident/rating.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedtrident {

void accumulate_update(ClientRecord& record, const ModelParams& local,
                       const ModelParams& prev_global, int good_cluster_size) {
  if (!local.same_shape(prev_global))
    throw std::invalid_argument("accumulate_update: shape mismatch");
  if (good_cluster_size < 1)
    throw std::invalid_argument("accumulate_update: good cluster size must be >= 1");
  if (record.accumulated_update.empty())
    record.accumulated_update.assign(local.size(), 0.0);
  if (record.accumulated_update.size() != local.size())
    throw std::invalid_argument("accumulate_update: accumulated shape mismatch");
  for (std::size_t i = 0; i < local.size(); ++i)
    record.accumulated_update[i] += local.values[i] - prev_global.values[i];
  record.good_round_count += 1;
  record.mean_good_cluster_size +=
      (static_cast<double>(good_cluster_size) - record.mean_good_cluster_size) /
      static_cast<double>(record.good_round_count);
}

RatingOutcome update_rating(ClientRecord& record, bool detected_bad,
                            const RatingPolicy& policy) {
  RatingOutcome outcome;
  if (detected_bad) {
    record.consecutive_detections += 1;
    double penalty = policy.penalty_unit * record.consecutive_detections;
    record.rating = std::max(record.rating - penalty, policy.r_min);
    if (record.rating <= policy.r_min && !record.blacklisted) {
      record.blacklisted = true;
      outcome.newly_blacklisted = true;
    }
  } else {
    record.consecutive_detections = 0;
    record.rating = std::min(record.rating + policy.reward, policy.r_max);
  }
  return outcome;
}

ModelParams unlearn(const ModelParams& global, const ClientRecord& record) {
  if (record.good_round_count == 0) return global;
  if (record.accumulated_update.size() != global.size())
    throw std::invalid_argument("unlearn: accumulated shape mismatch");
  ModelParams out = global;
  const double scale = 1.0 / record.mean_good_cluster_size;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] -= scale * record.accumulated_update[i];
  return out;
}

ValidationResult validate_global(const ModelParams& candidate,
                                 const ModelParams& previous,
                                 const Dataset& validation_set, int neuron_low,
                                 int neuron_high, const RatingPolicy& policy,
                                 double& sre_old, double& asr_old) {
  if (validation_set.empty())
    throw std::invalid_argument("validate_global: empty validation set");

  const int source = std::max(neuron_low, neuron_high);
  const int target = std::min(neuron_low, neuron_high);

  ValidationResult result;
  std::vector<int> truth;
  truth.reserve(validation_set.size());
  for (const auto& s : validation_set.samples) truth.push_back(s.label);
  ConfusionMatrix cm =
      confusion(truth, predict(candidate, validation_set), validation_set.num_classes);

  auto sre_new = sre(cm, source);
  if (!sre_new.has_value()) {
    result.skipped = true;
    result.accepted = candidate;
    return result;
  }
  auto asr_new = asr(cm, source, target);

  result.sre_new = *sre_new;
  result.asr_new = *asr_new;
  const bool sre_collapsed = result.sre_new - sre_old < -policy.sre_threshold;
  const bool asr_spiked = result.asr_new - asr_old > policy.asr_threshold;
  if (sre_collapsed || asr_spiked) {
    result.reverted = true;
    result.accepted = previous;
    // the stored baseline keeps tracking the accepted model; adopting the
    // rejected candidate's values would lower the bar for the next round's
    // equally-poisoned candidate
  } else {
    result.accepted = candidate;
    sre_old = result.sre_new;
    asr_old = result.asr_new;
  }
  return result;
}

}  // namespace fedtrident
