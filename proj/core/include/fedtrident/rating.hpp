#pragma once

#include "fedtrident/dataset.hpp"
#include "fedtrident/metrics.hpp"
#include "fedtrident/mlp.hpp"

namespace fedtrident {

struct RatingPolicy {
  double r_max = 1.00;
  double r_min = 0.00;
  double r_initial = 0.80;
  double reward = 0.05;        // added on a good round
  double penalty_unit = 0.15;  // scaled by the consecutive-detection count
  double sre_threshold = 0.1;
  double asr_threshold = 0.1;
};

// Server-side per-client bookkeeping across the whole run. The accumulated
// update is the sum of (local - previous global) over the client's good
// rounds; mean_good_cluster_size is the running mean of the good-cluster
// size over those same rounds, which is all the unlearning rule needs.
struct ClientRecord {
  int id = 0;
  double rating = 0.80;
  int consecutive_detections = 0;
  Vector accumulated_update;  // flat, ModelParams-shaped
  int good_round_count = 0;
  double mean_good_cluster_size = 0.0;
  bool blacklisted = false;
};

// Adds (local - prev_global) to the record's accumulated update; call only
// for clients in the round's good set.
void accumulate_update(ClientRecord& record, const ModelParams& local,
                       const ModelParams& prev_global, int good_cluster_size);

struct RatingOutcome {
  bool newly_blacklisted = false;
};

// One round's rating step: penalties grow with the consecutive-detection
// count, a good round resets it. Hitting the floor blacklists permanently.
RatingOutcome update_rating(ClientRecord& record, bool detected_bad,
                            const RatingPolicy& policy);

// Remove the client's averaged historical contribution from the global
// model. A client with no good rounds contributed nothing to unlearn.
ModelParams unlearn(const ModelParams& global, const ClientRecord& record);

struct ValidationResult {
  ModelParams accepted;
  bool reverted = false;
  bool skipped = false;  // validation set had no source-class sample
  double sre_new = 0.0;
  double asr_new = 0.0;
};

// SRE/ASR check of the candidate against the previous round's values. The
// detected neuron pair is index-ordered; the higher class index plays the
// source role and the lower the target, matching the hazard-reducing
// direction of the attacks being defended against. A drop in SRE or a rise
// in ASR beyond the thresholds reverts to the previous model. The stored
// previous values always move to the new measurements, revert or not.
ValidationResult validate_global(const ModelParams& candidate,
                                 const ModelParams& previous,
                                 const Dataset& validation_set, int neuron_low,
                                 int neuron_high, const RatingPolicy& policy,
                                 double& sre_old, double& asr_old);

}  // namespace fedtrident
