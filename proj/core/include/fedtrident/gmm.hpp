#pragma once

#include <array>
#include <vector>

#include "fedtrident/numeric.hpp"

namespace fedtrident {

// Two-component diagonal-covariance Gaussian mixture fitted by EM.
// Initialization is pinned to the two most distant points, so the fit is a
// deterministic function of the input.
struct GmmModel {
  std::array<Vector, 2> means;
  std::array<Vector, 2> variances;  // diagonal, floored
  std::array<double, 2> weights{0.5, 0.5};
  std::vector<std::array<double, 2>> responsibilities;  // per point
  bool degenerate = false;  // fewer than 2 distinct points: no split exists
  int iterations = 0;
  double log_likelihood = 0.0;
};

inline constexpr double kGmmVarianceFloor = 1e-6;
inline constexpr double kGmmTolerance = 1e-6;
inline constexpr int kGmmMaxIterations = 200;

// Throws on fewer than 2 points; returns degenerate=true when all points
// coincide. Points must share one dimension.
GmmModel gmm_fit(const std::vector<Vector>& points);

// Max-responsibility component (0 or 1) per point.
std::vector<int> gmm_hard_assign(const GmmModel& model);

}  // namespace fedtrident
