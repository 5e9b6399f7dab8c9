#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedtrident/gmm.hpp"
#include "fedtrident/rng.hpp"

using namespace fedtrident;

namespace {

// Oracle: the maximum-likelihood hard 2-partition of 1-D points, found by
// exhaustive enumeration. Likelihood uses per-side MLE mean/variance (with
// the same variance floor as the fit) and mixing weights from side sizes.
std::vector<int> best_partition_exhaustive(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  double best_ll = -1e300;
  std::vector<int> best_assign(n, 0);
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<double> side[2];
    for (std::size_t i = 0; i < n; ++i)
      side[(mask >> i) & 1u].push_back(xs[i]);
    double ll = 0.0;
    for (int c = 0; c < 2; ++c) {
      const auto& s = side[c];
      double mean = 0.0;
      for (double x : s) mean += x;
      mean /= static_cast<double>(s.size());
      double var = 0.0;
      for (double x : s) var += (x - mean) * (x - mean);
      var = std::max(var / static_cast<double>(s.size()), kGmmVarianceFloor);
      double logw = std::log(static_cast<double>(s.size()) / static_cast<double>(n));
      for (double x : s)
        ll += logw - 0.5 * std::log(2.0 * M_PI * var) -
              0.5 * (x - mean) * (x - mean) / var;
    }
    if (ll > best_ll) {
      best_ll = ll;
      for (std::size_t i = 0; i < n; ++i)
        best_assign[i] = static_cast<int>((mask >> i) & 1u);
    }
  }
  return best_assign;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  bool direct = true, flipped = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) direct = false;
    if (a[i] != 1 - b[i]) flipped = false;
  }
  return direct || flipped;
}

std::vector<Vector> lift(const std::vector<double>& xs) {
  std::vector<Vector> points;
  for (double x : xs) points.push_back({x});
  return points;
}

}  // namespace

TEST_CASE("gmm_fit separates an obvious 1-D split") {
  std::vector<double> xs = {0.0, 0.1, 0.2, 10.0, 10.1};
  GmmModel model = gmm_fit(lift(xs));
  CHECK_FALSE(model.degenerate);
  std::vector<int> assign = gmm_hard_assign(model);
  CHECK(same_partition(assign, best_partition_exhaustive(xs)));
  CHECK(same_partition(assign, {0, 0, 0, 1, 1}));
}

TEST_CASE("gmm_fit mirrored clouds give mirrored means") {
  std::vector<Vector> points;
  SeededRng rng(31, 8000);
  for (int i = 0; i < 12; ++i) {
    double off = rng.uniform(-0.1, 0.1);
    points.push_back({5.0 + off, 1.0 - off});
    points.push_back({-5.0 - off, -1.0 + off});
  }
  GmmModel model = gmm_fit(points);
  REQUIRE_FALSE(model.degenerate);
  CHECK(model.means[0][0] == doctest::Approx(-model.means[1][0]).epsilon(0.05));
  CHECK(model.means[0][1] == doctest::Approx(-model.means[1][1]).epsilon(0.05));
  CHECK(model.weights[0] == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("gmm_fit degenerate and error cases") {
  std::vector<Vector> identical(5, Vector{1.0, 2.0});
  GmmModel model = gmm_fit(identical);
  CHECK(model.degenerate);

  CHECK_THROWS_AS(gmm_fit({}), std::invalid_argument);
  CHECK_THROWS_AS(gmm_fit({Vector{1.0}}), std::invalid_argument);
}

TEST_CASE("gmm matches the exhaustive oracle on 100 seeded 1-D instances") {
  int matches = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SeededRng rng(seed, 8001);
    const int n = 4 + static_cast<int>(rng.bounded(5));  // 4..8 points
    const int left = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n - 1)));
    const double gap = 6.0 + rng.uniform(0.0, 4.0);
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
      bool right = i >= left;
      int idx = right ? i - left : i;
      int count = right ? n - left : left;
      double span = count > 1 ? (static_cast<double>(idx) / (count - 1) - 0.5) : 0.0;
      xs.push_back((right ? gap : 0.0) + 0.8 * span + rng.uniform(-0.05, 0.05));
    }
    GmmModel model = gmm_fit(lift(xs));
    if (model.degenerate) continue;
    if (same_partition(gmm_hard_assign(model), best_partition_exhaustive(xs)))
      ++matches;
  }
  CHECK(matches == 100);
}
