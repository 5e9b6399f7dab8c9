#include "fedtrident/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedtrident {

namespace {

void check_label(int label, int num_classes, const char* what) {
  if (label < 1 || label > num_classes)
    throw std::invalid_argument(std::string(what) + ": class index " +
                                std::to_string(label) + " outside [1.." +
                                std::to_string(num_classes) + "]");
}

}  // namespace

ConfusionMatrix ConfusionMatrix::zeros(int num_classes) {
  if (num_classes < 1)
    throw std::invalid_argument("ConfusionMatrix: num_classes must be >= 1");
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  cm.counts.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
  return cm;
}

std::int64_t ConfusionMatrix::at(int true_label, int predicted_label) const {
  check_label(true_label, num_classes, "ConfusionMatrix::at");
  check_label(predicted_label, num_classes, "ConfusionMatrix::at");
  return counts[static_cast<std::size_t>(true_label - 1) * num_classes +
                (predicted_label - 1)];
}

std::int64_t& ConfusionMatrix::cell(int true_label, int predicted_label) {
  check_label(true_label, num_classes, "ConfusionMatrix::cell");
  check_label(predicted_label, num_classes, "ConfusionMatrix::cell");
  return counts[static_cast<std::size_t>(true_label - 1) * num_classes +
                (predicted_label - 1)];
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::int64_t ConfusionMatrix::row_total(int true_label) const {
  check_label(true_label, num_classes, "ConfusionMatrix::row_total");
  std::int64_t t = 0;
  for (int j = 1; j <= num_classes; ++j) t += at(true_label, j);
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int i = 1; i <= num_classes; ++i) t += at(i, i);
  return t;
}

double label_distance(int i, int j, int num_classes) {
  check_label(i, num_classes, "label_distance");
  check_label(j, num_classes, "label_distance");
  constexpr double kBase = 2.718281828459045235360287 / 2.0;
  return std::pow(kBase, std::abs(i - j));
}

ConfusionMatrix confusion(const std::vector<int>& truth,
                          const std::vector<int>& predicted, int num_classes) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix cm = ConfusionMatrix::zeros(num_classes);
  for (std::size_t k = 0; k < truth.size(); ++k) ++cm.cell(truth[k], predicted[k]);
  return cm;
}

std::optional<double> sre(const ConfusionMatrix& cm, int source) {
  std::int64_t row = cm.row_total(source);
  if (row == 0) return std::nullopt;
  return static_cast<double>(cm.at(source, source)) / static_cast<double>(row);
}

std::optional<double> asr(const ConfusionMatrix& cm, int source, int target) {
  check_label(target, cm.num_classes, "asr");
  if (source == target)
    throw std::invalid_argument("asr: source and target must differ");
  std::int64_t row = cm.row_total(source);
  if (row == 0) return std::nullopt;
  return static_cast<double>(cm.at(source, target)) / static_cast<double>(row);
}

std::optional<double> gac(const ConfusionMatrix& cm) {
  std::int64_t t = cm.total();
  if (t == 0) return std::nullopt;
  return static_cast<double>(cm.trace()) / static_cast<double>(t);
}

std::optional<double> gas(const ConfusionMatrix& cm) {
  if (cm.total() == 0) return std::nullopt;
  double weighted = 0.0;
  for (int i = 1; i <= cm.num_classes; ++i)
    for (int j = 1; j <= cm.num_classes; ++j)
      weighted += label_distance(i, j, cm.num_classes) *
                  static_cast<double>(cm.at(i, j));
  return static_cast<double>(cm.trace()) / weighted;
}

}  // namespace fedtrident
