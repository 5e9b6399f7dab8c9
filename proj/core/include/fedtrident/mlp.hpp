#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "fedtrident/dataset.hpp"
#include "fedtrident/numeric.hpp"
#include "fedtrident/rng.hpp"

namespace fedtrident {

struct TrainConfig {
  double learning_rate = 0.03;
  double momentum = 0.5;
  int batch_size = 64;
  int local_epochs = 3;
};

// One-hidden-layer MLP with ReLU and a softmax/cross-entropy head, stored as
// one flat vector so federated arithmetic (averaging, deltas, unlearning)
// is plain elementwise work. Layout: [W1 (h*d) | b1 (h) | W2 (E*h) | b2 (E)],
// with W2 row l feeding output neuron l. Output neuron l (1-based) therefore
// owns exactly h+1 parameters: its W2 row plus its bias.
struct ModelParams {
  int input_dim = 0;   // d
  int hidden_dim = 0;  // h
  int num_classes = 0; // E
  Vector values;

  static ModelParams zeros(int input_dim, int hidden_dim, int num_classes);

  std::size_t size() const { return values.size(); }
  bool same_shape(const ModelParams& other) const {
    return input_dim == other.input_dim && hidden_dim == other.hidden_dim &&
           num_classes == other.num_classes;
  }

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const {
    return static_cast<std::size_t>(hidden_dim) * input_dim;
  }
  std::size_t w2_offset() const { return b1_offset() + hidden_dim; }
  std::size_t b2_offset() const {
    return w2_offset() + static_cast<std::size_t>(num_classes) * hidden_dim;
  }

  double& w1(int j, int i) { return values[w1_offset() + static_cast<std::size_t>(j) * input_dim + i]; }
  double w1(int j, int i) const { return values[w1_offset() + static_cast<std::size_t>(j) * input_dim + i]; }
  double& b1(int j) { return values[b1_offset() + j]; }
  double b1(int j) const { return values[b1_offset() + j]; }
  double& w2(int l, int j) { return values[w2_offset() + static_cast<std::size_t>(l) * hidden_dim + j]; }
  double w2(int l, int j) const { return values[w2_offset() + static_cast<std::size_t>(l) * hidden_dim + j]; }
  double& b2(int l) { return values[b2_offset() + l]; }
  double b2(int l) const { return values[b2_offset() + l]; }
};

// Uniform weights in [-1/sqrt(fan_in), +1/sqrt(fan_in)], zero biases.
ModelParams init_params(int input_dim, int hidden_dim, int num_classes,
                        SeededRng& rng);

// logits = W2 * relu(W1 x + b1) + b2
Vector forward(const ModelParams& params, const Vector& features);

// Mini-batch SGD with heavy-ball momentum on cross-entropy, local_epochs
// passes over a fresh shuffle each epoch. The input is not modified.
ModelParams train_local(const ModelParams& params, const Dataset& data,
                        const TrainConfig& config, SeededRng& rng);

// argmax class per sample, ties toward the lower class index. 1-based labels.
std::vector<int> predict(const ModelParams& params, const Dataset& data);

// Mean cross-entropy over the dataset (shift-stabilized log-softmax).
double mean_cross_entropy(const ModelParams& params, const Dataset& data);

// a*x + y over the flat parameter vector.
ModelParams param_axpy(double a, const ModelParams& x, const ModelParams& y);

// Parameters owned by output neuron `neuron` (1-based): W2 row + bias,
// returned as a copy of length hidden_dim + 1.
Vector output_neuron_slice(const ModelParams& params, int neuron);

// Copy of the output layer (W2 and b2) as one vector, used by defenses that
// operate on output-layer updates only.
Vector output_layer(const ModelParams& params);

// Binary format: u32 little-endian (d, h, E) then the flat values as
// little-endian IEEE-754 doubles.
void save_params(const ModelParams& params, std::ostream& out);
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(std::istream& in);
ModelParams load_params(const std::string& path);

}  // namespace fedtrident
