#include "fedtrident/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedtrident {

double l2_norm(const Vector& v) {
  if (v.empty()) throw std::invalid_argument("l2_norm: empty vector");
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

std::optional<double> cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  if (a.empty()) throw std::invalid_argument("cosine_similarity: empty vector");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

Vector softmax(const Vector& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  double m = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

double sample_gamma(double shape, SeededRng& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

Vector sample_dirichlet(double alpha, int dim, SeededRng& rng) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("sample_dirichlet: alpha must be > 0");
  if (dim < 1) throw std::invalid_argument("sample_dirichlet: dim must be >= 1");
  Vector draws(static_cast<std::size_t>(dim));
  double total = 0.0;
  for (double& x : draws) {
    x = sample_gamma(alpha, rng);
    total += x;
  }
  if (total <= 0.0) {
    // only reachable for tiny alpha where every gamma draw underflows
    std::fill(draws.begin(), draws.end(), 1.0 / dim);
    return draws;
  }
  for (double& x : draws) x /= total;
  return draws;
}

double sample_gaussian(double mean, double stddev, SeededRng& rng) {
  if (stddev < 0.0)
    throw std::invalid_argument("sample_gaussian: stddev must be >= 0");
  if (stddev == 0.0) return mean;
  return mean + stddev * rng.normal();
}

}  // namespace fedtrident
