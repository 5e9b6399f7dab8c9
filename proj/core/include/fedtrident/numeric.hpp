#pragma once

#include <optional>
#include <vector>

#include "fedtrident/rng.hpp"

namespace fedtrident {

using Vector = std::vector<double>;

// sqrt of the sum of squares. Throws on an empty vector.
double l2_norm(const Vector& v);

// dot(a,b) / (|a||b|), clamped to [-1, 1]. Returns nullopt when either norm
// is zero (the caller decides what "undefined" means for it). Throws on
// dimension mismatch.
std::optional<double> cosine_similarity(const Vector& a, const Vector& b);

// Max-shifted softmax: positive entries summing to 1, safe for large logits.
Vector softmax(const Vector& logits);

// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
double sample_gamma(double shape, SeededRng& rng);

// Symmetric Dirichlet(alpha) over `dim` components as normalized gamma draws.
Vector sample_dirichlet(double alpha, int dim, SeededRng& rng);

// Normal draw; stddev == 0 returns the mean exactly, stddev < 0 throws.
double sample_gaussian(double mean, double stddev, SeededRng& rng);

}  // namespace fedtrident
