#pragma once

#include <string>
#include <vector>

#include "fedtrident/numeric.hpp"

namespace fedtrident {

// Labels are 1-based class indices in [1..num_classes]. The index order is
// the hazard order: a larger index is a more hazardous condition. That
// ordering is what the exponential label distance in the safety metric is
// defined over, so it is part of the data contract, not presentation.
struct Sample {
  Vector features;
  int label = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 0;  // E
  int feature_dim = 0;  // d

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::vector<int> class_counts() const;  // length num_classes, index = label-1
};

// Synthetic ordered-class task. Class c's mean sits at separation*c along a
// fixed axis with a small alternating orthogonal offset, so hazard-adjacent
// classes are the most confusable. Exactly samples_per_class per class,
// features Gaussian around the class mean with the given noise stddev.
Dataset generate_synthetic(int num_classes, int feature_dim,
                           int samples_per_class, double separation,
                           double noise, SeededRng& rng);

// Non-IID split: for each class, a K-dim Dirichlet(alpha) draw decides the
// per-client share, realized with largest-remainder rounding. The union of
// the returned datasets is exactly the input multiset.
std::vector<Dataset> partition_dirichlet(const Dataset& data, int num_clients,
                                         double alpha, SeededRng& rng);

// Relabel every source-class sample as the target class; features untouched.
Dataset flip_labels(const Dataset& data, int source, int target);

// CSV rows: d feature columns then one integer label column. An optional
// single header line is detected by a non-numeric first field.
Dataset load_csv(const std::string& path);

}  // namespace fedtrident
