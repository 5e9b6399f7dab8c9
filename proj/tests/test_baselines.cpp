#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fedtrident/baselines.hpp"
#include "fedtrident/engine.hpp"

using namespace fedtrident;

namespace {

ModelParams flat(double v) {
  ModelParams p = ModelParams::zeros(1, 1, 2);
  for (double& x : p.values) x = v;
  return p;
}

}  // namespace

TEST_CASE("krum picks the centrally placed model") {
  // flat models 0, 0.1, 10: summed squared distances are
  // 5*(0.01 + 100), 5*(0.01 + 98.01), 5*(100 + 98.01) -> the middle wins
  std::vector<ModelParams> models = {flat(0.0), flat(0.1), flat(10.0)};
  CHECK(krum_select(models) == 1);
  CHECK(krum(models).values == models[1].values);

  std::vector<ModelParams> equal = {flat(2.0), flat(2.0), flat(2.0)};
  CHECK(krum_select(equal) == 0);  // tie rule: lowest index

  std::vector<ModelParams> outlier = {flat(1.0), flat(1.0), flat(1.0), flat(50.0)};
  CHECK(krum(outlier).values == flat(1.0).values);

  CHECK_THROWS_AS(krum_select({flat(1.0)}), std::invalid_argument);
}

TEST_CASE("trimmed_mean drops the extremes per coordinate") {
  std::vector<ModelParams> models = {flat(1), flat(2), flat(3), flat(4), flat(100)};
  ModelParams out = trimmed_mean(models, 0.2);  // floor(0.2*5)=1 per side
  for (double v : out.values) CHECK(v == doctest::Approx(3.0));

  ModelParams plain = trimmed_mean(models, 0.0);
  ModelParams mean = aggregate_uniform(models);
  for (std::size_t i = 0; i < plain.size(); ++i)
    CHECK(plain.values[i] == doctest::Approx(mean.values[i]));

  std::vector<ModelParams> same = {flat(7), flat(7), flat(7)};
  for (double v : trimmed_mean(same, 0.3).values) CHECK(v == doctest::Approx(7.0));

  // floor(trim*n) < n/2 whenever trim < 0.5, so over-trimming is exactly the
  // out-of-range fraction case
  CHECK_THROWS_AS(trimmed_mean({flat(1), flat(2)}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(trimmed_mean({flat(1), flat(2)}, -0.1), std::invalid_argument);
}

TEST_CASE("coordinate_median") {
  std::vector<ModelParams> odd = {flat(1), flat(5), flat(9)};
  for (double v : coordinate_median(odd).values) CHECK(v == doctest::Approx(5.0));

  std::vector<ModelParams> even = {flat(1), flat(9)};
  for (double v : coordinate_median(even).values) CHECK(v == doctest::Approx(5.0));

  // order invariance
  std::vector<ModelParams> shuffled = {flat(9), flat(1), flat(5)};
  CHECK(coordinate_median(shuffled).values == coordinate_median(odd).values);

  // robustness: a single huge outlier moves the median less than the mean
  std::vector<ModelParams> base = {flat(1), flat(2), flat(3), flat(4), flat(5)};
  std::vector<ModelParams> spiked = base;
  spiked[4] = flat(1e6);
  double median_shift = std::abs(coordinate_median(spiked).values[0] -
                                 coordinate_median(base).values[0]);
  double mean_shift = std::abs(aggregate_uniform(spiked).values[0] -
                               aggregate_uniform(base).values[0]);
  CHECK(median_shift < mean_shift);
}

TEST_CASE("foolsgold crushes identical histories") {
  Vector h = {1.0, 2.0, 3.0};
  std::vector<double> w = foolsgold_weights({h, h});
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[1] == doctest::Approx(0.0));
}

TEST_CASE("foolsgold keeps orthogonal histories") {
  std::vector<Vector> histories = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (double w : foolsgold_weights(histories)) CHECK(w == doctest::Approx(1.0));
}

TEST_CASE("foolsgold single client and weight range") {
  CHECK(foolsgold_weights({Vector{1, 2}}) == std::vector<double>{1.0});

  SeededRng rng(61, 11000);
  std::vector<Vector> histories;
  for (int i = 0; i < 8; ++i) {
    Vector h(6);
    for (double& x : h) x = rng.uniform(-1, 1);
    histories.push_back(h);
  }
  // two sybils sharing a direction
  histories.push_back(histories[0]);
  std::vector<double> w = foolsgold_weights(histories);
  for (double x : w) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  CHECK(w[0] < 0.5);       // the duplicated pair is penalized
  CHECK(w.back() < 0.5);
}

TEST_CASE("foolsgold favors the odd one out") {
  // clients 0/1 aligned, client 2 orthogonal to both
  std::vector<Vector> histories = {{1, 0}, {1, 0.01}, {0, 1}};
  std::vector<double> w = foolsgold_weights(histories);
  CHECK(w[2] >= w[0]);
  CHECK(w[2] >= w[1]);
  CHECK(w[2] == doctest::Approx(1.0));
}

TEST_CASE("flame with identical deltas and no noise is a plain step") {
  ModelParams global = flat(1.0);
  std::vector<ModelParams> models(4, flat(1.5));
  SeededRng rng(67, 11001);
  FlameResult fr = flame(models, global, 0.0, rng);
  CHECK(fr.admitted.size() == 4);
  CHECK(fr.rejected.empty());
  for (double v : fr.aggregate.values) CHECK(v == doctest::Approx(1.5));
}

TEST_CASE("flame clips large deltas to the median norm") {
  ModelParams global = flat(0.0);
  // deltas with norms sqrt(5)*{1, 2, 10}: median norm is 2*sqrt(5), so the
  // big one is scaled by 0.2
  std::vector<ModelParams> models = {flat(1.0), flat(2.0), flat(10.0)};
  SeededRng rng(71, 11002);
  FlameResult fr = flame(models, global, 0.0, rng);
  REQUIRE(fr.admitted.size() == 3);  // same direction: one cluster dominates
  const double expected = (1.0 + 2.0 + 10.0 * 0.2) / 3.0;
  for (double v : fr.aggregate.values) CHECK(v == doctest::Approx(expected));
}

TEST_CASE("flame noise is reproducible under a fixed seed") {
  ModelParams global = flat(0.0);
  std::vector<ModelParams> models = {flat(1.0), flat(2.0), flat(3.0), flat(4.0)};
  SeededRng rng1(73, 11003);
  SeededRng rng2(73, 11003);
  FlameResult a = flame(models, global, 0.01, rng1);
  FlameResult b = flame(models, global, 0.01, rng2);
  CHECK(a.aggregate.values == b.aggregate.values);

  SeededRng rng3(73, 11004);
  FlameResult c = flame(models, global, 0.01, rng3);
  CHECK(a.aggregate.values != c.aggregate.values);
}
