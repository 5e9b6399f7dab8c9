#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fedtrident/metrics.hpp"

using namespace fedtrident;

TEST_CASE("label_distance values") {
  CHECK(label_distance(3, 3, 6) == doctest::Approx(1.0));
  CHECK(label_distance(1, 2, 6) == doctest::Approx(1.35914).epsilon(1e-5));
  CHECK(label_distance(1, 6, 6) == doctest::Approx(std::exp(5.0) / 32.0));
  CHECK(std::abs(label_distance(1, 6, 6) - 4.63797) < 1e-4);
  CHECK_THROWS_AS(label_distance(0, 1, 6), std::invalid_argument);
  CHECK_THROWS_AS(label_distance(1, 7, 6), std::invalid_argument);
}

TEST_CASE("label_distance symmetry and multiplicativity") {
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j)
      CHECK(label_distance(i, j, 5) == doctest::Approx(label_distance(j, i, 5)));
  CHECK(label_distance(1, 3, 5) ==
        doctest::Approx(label_distance(1, 2, 5) * label_distance(2, 3, 5)));
}

TEST_CASE("confusion tallies") {
  ConfusionMatrix perfect = confusion({1, 2, 3}, {1, 2, 3}, 3);
  CHECK(perfect.trace() == 3);
  CHECK(perfect.total() == 3);

  ConfusionMatrix cm = confusion({3, 3, 3}, {3, 1, 3}, 3);
  CHECK(cm.at(3, 3) == 2);
  CHECK(cm.at(3, 1) == 1);

  ConfusionMatrix empty = confusion({}, {}, 3);
  CHECK(empty.total() == 0);

  CHECK_THROWS_AS(confusion({1, 2}, {1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(confusion({1, 4}, {1, 1}, 3), std::invalid_argument);
}

namespace {

ConfusionMatrix source_row_case() {
  // row 3 (source) = [2, 1, 7]
  ConfusionMatrix cm = ConfusionMatrix::zeros(3);
  cm.cell(3, 1) = 2;
  cm.cell(3, 2) = 1;
  cm.cell(3, 3) = 7;
  return cm;
}

}  // namespace

TEST_CASE("sre") {
  ConfusionMatrix cm = source_row_case();
  CHECK(*sre(cm, 3) == doctest::Approx(0.7));
  CHECK_FALSE(sre(cm, 1).has_value());  // empty row: skip, not zero

  ConfusionMatrix all_correct = confusion({3, 3}, {3, 3}, 3);
  CHECK(*sre(all_correct, 3) == doctest::Approx(1.0));
  ConfusionMatrix none = confusion({3, 3}, {1, 2}, 3);
  CHECK(*sre(none, 3) == doctest::Approx(0.0));
}

TEST_CASE("asr") {
  ConfusionMatrix cm = source_row_case();
  CHECK(*asr(cm, 3, 1) == doctest::Approx(0.2));
  CHECK(*asr(cm, 3, 2) == doctest::Approx(0.1));
  CHECK(*sre(cm, 3) + *asr(cm, 3, 1) <= 1.0);
  CHECK_FALSE(asr(cm, 1, 2).has_value());
  CHECK_THROWS_AS(asr(cm, 3, 3), std::invalid_argument);

  ConfusionMatrix no_confusion = confusion({3, 3}, {3, 2}, 3);
  CHECK(*asr(no_confusion, 3, 1) == doctest::Approx(0.0));
}

TEST_CASE("row ratios partition to one") {
  ConfusionMatrix cm = source_row_case();
  double total = *sre(cm, 3);
  for (int g = 1; g <= 3; ++g)
    if (g != 3) total += *asr(cm, 3, g);
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("gac") {
  ConfusionMatrix diag = confusion({1, 2, 3}, {1, 2, 3}, 3);
  CHECK(*gac(diag) == doctest::Approx(1.0));

  ConfusionMatrix half = ConfusionMatrix::zeros(2);
  half.cell(1, 1) = half.cell(1, 2) = half.cell(2, 1) = half.cell(2, 2) = 1;
  CHECK(*gac(half) == doctest::Approx(0.5));

  ConfusionMatrix cm = ConfusionMatrix::zeros(2);
  cm.cell(1, 1) = 8;
  cm.cell(1, 2) = 2;
  cm.cell(2, 1) = 1;
  cm.cell(2, 2) = 9;
  CHECK(*gac(cm) == doctest::Approx(0.85));

  ConfusionMatrix empty = ConfusionMatrix::zeros(2);
  CHECK_FALSE(gac(empty).has_value());
}

TEST_CASE("gas") {
  ConfusionMatrix diag = confusion({1, 2, 2}, {1, 2, 2}, 2);
  CHECK(*gas(diag) == doctest::Approx(1.0));

  ConfusionMatrix cm = ConfusionMatrix::zeros(2);
  cm.cell(1, 1) = 8;
  cm.cell(1, 2) = 2;
  cm.cell(2, 1) = 1;
  cm.cell(2, 2) = 9;
  const double e_half = std::exp(1.0) / 2.0;
  CHECK(*gas(cm) == doctest::Approx(17.0 / (17.0 + 3.0 * e_half)));
  CHECK(std::abs(*gas(cm) - 0.80657) < 1e-4);
  CHECK(*gas(cm) < *gac(cm));  // off-diagonal mass weighs extra
}

TEST_CASE("gas equals gac only on diagonal matrices") {
  ConfusionMatrix diag = confusion({1, 2, 3, 3}, {1, 2, 3, 3}, 3);
  CHECK(*gas(diag) == doctest::Approx(*gac(diag)));

  ConfusionMatrix off = confusion({1, 2, 3, 3}, {1, 2, 3, 2}, 3);
  CHECK(*gas(off) < *gac(off));
}

TEST_CASE("wider hazard gaps hurt gas more") {
  // one misclassified count at |i-j|=1 vs the same count at |i-j|=2
  ConfusionMatrix near = ConfusionMatrix::zeros(3);
  near.cell(1, 1) = near.cell(2, 2) = near.cell(3, 3) = 5;
  ConfusionMatrix far = near;
  near.cell(3, 2) = 1;
  far.cell(3, 1) = 1;
  CHECK(*gas(far) < *gas(near));
  CHECK(*gac(far) == doctest::Approx(*gac(near)));
}
