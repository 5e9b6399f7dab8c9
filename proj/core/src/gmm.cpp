#include "fedtrident/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedtrident {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double squared_distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double log_gaussian_diag(const Vector& x, const Vector& mean, const Vector& var) {
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - mean[i];
    lp += -0.5 * (kLog2Pi + std::log(var[i])) - 0.5 * d * d / var[i];
  }
  return lp;
}

}  // namespace

GmmModel gmm_fit(const std::vector<Vector>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("gmm_fit: need at least 2 points");
  const std::size_t dim = points[0].size();
  if (dim == 0) throw std::invalid_argument("gmm_fit: zero-dimensional points");
  for (const auto& p : points)
    if (p.size() != dim) throw std::invalid_argument("gmm_fit: ragged points");

  GmmModel model;
  model.responsibilities.assign(n, {0.5, 0.5});

  // seed the means with the two most distant points
  std::size_t best_a = 0, best_b = 1;
  double best_d2 = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = squared_distance(points[i], points[j]);
      if (d2 > best_d2) {
        best_d2 = d2;
        best_a = i;
        best_b = j;
      }
    }
  }
  if (best_d2 <= 0.0) {
    model.degenerate = true;
    model.means = {points[0], points[0]};
    model.variances = {Vector(dim, kGmmVarianceFloor), Vector(dim, kGmmVarianceFloor)};
    return model;
  }
  model.means = {points[best_a], points[best_b]};

  // shared initial diagonal variance from the global spread
  Vector global_mean(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t i = 0; i < dim; ++i) global_mean[i] += p[i];
  for (double& v : global_mean) v /= static_cast<double>(n);
  Vector global_var(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t i = 0; i < dim; ++i) {
      double d = p[i] - global_mean[i];
      global_var[i] += d * d;
    }
  for (double& v : global_var)
    v = std::max(v / static_cast<double>(n), kGmmVarianceFloor);
  model.variances = {global_var, global_var};

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= kGmmMaxIterations; ++iter) {
    model.iterations = iter;

    // E-step in log space
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 2> lp;
      for (int c = 0; c < 2; ++c)
        lp[static_cast<std::size_t>(c)] =
            std::log(model.weights[static_cast<std::size_t>(c)]) +
            log_gaussian_diag(points[i], model.means[static_cast<std::size_t>(c)],
                              model.variances[static_cast<std::size_t>(c)]);
      double m = std::max(lp[0], lp[1]);
      double z = std::exp(lp[0] - m) + std::exp(lp[1] - m);
      ll += m + std::log(z);
      model.responsibilities[i][0] = std::exp(lp[0] - m) / z;
      model.responsibilities[i][1] = std::exp(lp[1] - m) / z;
    }
    model.log_likelihood = ll;

    // M-step
    for (int c = 0; c < 2; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += model.responsibilities[i][cc];
      if (nk < 1e-9) {
        // starved component: keep its parameters, floor its weight
        model.weights[cc] = 1e-9;
        continue;
      }
      model.weights[cc] = nk / static_cast<double>(n);
      Vector mean(dim, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d)
          mean[d] += model.responsibilities[i][cc] * points[i][d];
      for (double& v : mean) v /= nk;
      Vector var(dim, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) {
          double diff = points[i][d] - mean[d];
          var[d] += model.responsibilities[i][cc] * diff * diff;
        }
      for (double& v : var) v = std::max(v / nk, kGmmVarianceFloor);
      model.means[cc] = std::move(mean);
      model.variances[cc] = std::move(var);
    }
    double wsum = model.weights[0] + model.weights[1];
    model.weights[0] /= wsum;
    model.weights[1] /= wsum;

    if (std::abs(ll - prev_ll) < kGmmTolerance) break;
    prev_ll = ll;
  }
  return model;
}

std::vector<int> gmm_hard_assign(const GmmModel& model) {
  std::vector<int> assign(model.responsibilities.size(), 0);
  for (std::size_t i = 0; i < assign.size(); ++i)
    assign[i] = model.responsibilities[i][1] > model.responsibilities[i][0] ? 1 : 0;
  return assign;
}

}  // namespace fedtrident
