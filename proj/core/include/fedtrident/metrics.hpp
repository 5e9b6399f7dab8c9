#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fedtrident {

// Row = true class, column = predicted class, both 1-based in the API.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<std::int64_t> counts;  // E*E row-major

  static ConfusionMatrix zeros(int num_classes);
  std::int64_t at(int true_label, int predicted_label) const;
  std::int64_t& cell(int true_label, int predicted_label);
  std::int64_t total() const;
  std::int64_t row_total(int true_label) const;
  std::int64_t trace() const;
};

// Exponential label distance (e/2)^|i-j|: correct predictions weigh 1, wider
// hazard gaps weigh exponentially more.
double label_distance(int i, int j, int num_classes);

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int num_classes);

// Source recall: fraction of source-class samples predicted correctly.
// nullopt when the source row is empty (the caller skips, it is not a zero).
std::optional<double> sre(const ConfusionMatrix& cm, int source);

// Attack success rate: fraction of source-class samples predicted exactly as
// the target class.
std::optional<double> asr(const ConfusionMatrix& cm, int source, int target);

// Global accuracy: trace / total.
std::optional<double> gac(const ConfusionMatrix& cm);

// Safety-weighted accuracy: trace / sum of distance-weighted counts.
std::optional<double> gas(const ConfusionMatrix& cm);

}  // namespace fedtrident
