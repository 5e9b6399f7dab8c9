#pragma once

#include <utility>
#include <vector>

#include "fedtrident/gmm.hpp"
#include "fedtrident/mlp.hpp"

namespace fedtrident {

// Per-round neuron-wise statistics over the participants' output layers.
// For participant k and output neuron l (1-based), the delta is the neuron's
// local parameters minus the previous global's; everything else derives from
// those slices.
struct NeuronFeatureTable {
  int num_neurons = 0;
  int slice_len = 0;  // hidden_dim + 1
  std::vector<std::vector<Vector>> deltas;      // [participant][neuron]
  std::vector<Vector> magnitudes;               // [participant][neuron]
  Vector accumulated_magnitude;                 // [neuron] sum over participants
  std::vector<Vector> consensus_mean;           // [neuron] mean delta
  Vector inconsistency;                         // [neuron] in [0, 2]
  Vector score;                                 // [neuron] magnitude*(1+inconsistency)
};

// Requires >= 2 participants with shapes matching the previous global.
// A neuron whose mean delta is (numerically) zero gets inconsistency 0; a
// participant whose own delta is zero contributes cosine 1 to that neuron.
NeuronFeatureTable compute_neuron_features(const std::vector<ModelParams>& locals,
                                           const ModelParams& prev_global);

// The two neurons with the highest combined scores, returned with the lower
// class index first. Ties break toward the lower neuron index.
std::pair<int, int> identify_source_target(const NeuronFeatureTable& table);

// Per-participant concatenation of the deltas for the two identified
// neurons: length 2 * (hidden_dim + 1).
std::vector<Vector> build_feature_set(const NeuronFeatureTable& table,
                                      int neuron_low, int neuron_high);

struct DetectionSplit {
  std::vector<int> good;  // participant ids
  std::vector<int> bad;
  bool ambiguous = false;
  double density_ratio = 0.0;  // looser / denser; 0 when no split was made
};

inline constexpr double kDensityRatioGuard = 1.2;

// Hard-assigns by responsibility, calls the tighter cluster (smaller mean
// distance to its centroid) poisoned, and backs off to "everyone is good"
// when the split is ambiguous: ratio below the guard, the tight cluster
// holding a majority, or a degenerate fit.
DetectionSplit split_good_bad(const std::vector<Vector>& points,
                              const GmmModel& model,
                              const std::vector<int>& participants);

}  // namespace fedtrident
