#include "fedtrident/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace fedtrident {

namespace {

void check_dims(int d, int h, int e) {
  if (d < 1 || h < 1 || e < 1)
    throw std::invalid_argument("ModelParams: all dimensions must be >= 1");
}

struct ForwardPass {
  Vector pre_activation;  // z = W1 x + b1
  Vector hidden;          // relu(z)
  Vector logits;
};

ForwardPass run_forward(const ModelParams& p, const Vector& x) {
  ForwardPass f;
  f.pre_activation.resize(static_cast<std::size_t>(p.hidden_dim));
  f.hidden.resize(static_cast<std::size_t>(p.hidden_dim));
  f.logits.resize(static_cast<std::size_t>(p.num_classes));
  for (int j = 0; j < p.hidden_dim; ++j) {
    double z = p.b1(j);
    for (int i = 0; i < p.input_dim; ++i) z += p.w1(j, i) * x[static_cast<std::size_t>(i)];
    f.pre_activation[static_cast<std::size_t>(j)] = z;
    f.hidden[static_cast<std::size_t>(j)] = z > 0.0 ? z : 0.0;
  }
  for (int l = 0; l < p.num_classes; ++l) {
    double z = p.b2(l);
    for (int j = 0; j < p.hidden_dim; ++j) z += p.w2(l, j) * f.hidden[static_cast<std::size_t>(j)];
    f.logits[static_cast<std::size_t>(l)] = z;
  }
  return f;
}

// Accumulates d(mean CE)/d(params) * batch_size for one sample into grad.
void accumulate_gradient(const ModelParams& p, const Vector& x, int label,
                         Vector& grad) {
  ForwardPass f = run_forward(p, x);
  Vector dlogits = softmax(f.logits);
  dlogits[static_cast<std::size_t>(label - 1)] -= 1.0;

  const std::size_t w2_off = p.w2_offset();
  const std::size_t b2_off = p.b2_offset();
  const std::size_t b1_off = p.b1_offset();

  Vector dhidden(static_cast<std::size_t>(p.hidden_dim), 0.0);
  for (int l = 0; l < p.num_classes; ++l) {
    double dl = dlogits[static_cast<std::size_t>(l)];
    grad[b2_off + static_cast<std::size_t>(l)] += dl;
    for (int j = 0; j < p.hidden_dim; ++j) {
      grad[w2_off + static_cast<std::size_t>(l) * p.hidden_dim + j] +=
          dl * f.hidden[static_cast<std::size_t>(j)];
      dhidden[static_cast<std::size_t>(j)] += dl * p.w2(l, j);
    }
  }
  for (int j = 0; j < p.hidden_dim; ++j) {
    if (f.pre_activation[static_cast<std::size_t>(j)] <= 0.0) continue;
    double dz = dhidden[static_cast<std::size_t>(j)];
    grad[b1_off + static_cast<std::size_t>(j)] += dz;
    for (int i = 0; i < p.input_dim; ++i)
      grad[static_cast<std::size_t>(j) * p.input_dim + i] += dz * x[static_cast<std::size_t>(i)];
  }
}

}  // namespace

ModelParams ModelParams::zeros(int input_dim, int hidden_dim, int num_classes) {
  check_dims(input_dim, hidden_dim, num_classes);
  ModelParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.num_classes = num_classes;
  p.values.assign(static_cast<std::size_t>(hidden_dim) * input_dim + hidden_dim +
                      static_cast<std::size_t>(num_classes) * hidden_dim + num_classes,
                  0.0);
  return p;
}

ModelParams init_params(int input_dim, int hidden_dim, int num_classes,
                        SeededRng& rng) {
  ModelParams p = ModelParams::zeros(input_dim, hidden_dim, num_classes);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int j = 0; j < hidden_dim; ++j)
    for (int i = 0; i < input_dim; ++i) p.w1(j, i) = rng.uniform(-bound1, bound1);
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (int l = 0; l < num_classes; ++l)
    for (int j = 0; j < hidden_dim; ++j) p.w2(l, j) = rng.uniform(-bound2, bound2);
  return p;
}

Vector forward(const ModelParams& params, const Vector& features) {
  if (static_cast<int>(features.size()) != params.input_dim)
    throw std::invalid_argument("forward: feature dimension mismatch");
  return run_forward(params, features).logits;
}

ModelParams train_local(const ModelParams& params, const Dataset& data,
                        const TrainConfig& config, SeededRng& rng) {
  if (data.empty()) throw std::invalid_argument("train_local: empty dataset");
  if (data.feature_dim != params.input_dim ||
      data.num_classes != params.num_classes)
    throw std::invalid_argument("train_local: dataset/model shape mismatch");
  if (config.batch_size < 1 || config.local_epochs < 0)
    throw std::invalid_argument("train_local: invalid config");

  ModelParams model = params;
  Vector velocity(model.size(), 0.0);
  Vector grad(model.size(), 0.0);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const auto n = data.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.local_epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(start + batch, n);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const Sample& s = data.samples[order[i]];
        accumulate_gradient(model, s.features, s.label, grad);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = 0; i < model.size(); ++i) {
        velocity[i] = config.momentum * velocity[i] + grad[i] * scale;
        model.values[i] -= config.learning_rate * velocity[i];
      }
    }
  }
  for (double v : model.values)
    if (!std::isfinite(v))
      throw std::runtime_error("train_local: parameters diverged (non-finite)");
  return model;
}

std::vector<int> predict(const ModelParams& params, const Dataset& data) {
  if (!data.empty() && (data.feature_dim != params.input_dim ||
                        data.num_classes != params.num_classes))
    throw std::invalid_argument("predict: dataset/model shape mismatch");
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) {
    Vector logits = run_forward(params, s.features).logits;
    int best = 0;
    for (int l = 1; l < params.num_classes; ++l)
      if (logits[static_cast<std::size_t>(l)] > logits[static_cast<std::size_t>(best)]) best = l;
    out.push_back(best + 1);
  }
  return out;
}

double mean_cross_entropy(const ModelParams& params, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("mean_cross_entropy: empty dataset");
  double total = 0.0;
  for (const auto& s : data.samples) {
    Vector logits = run_forward(params, s.features).logits;
    double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - m);
    total -= logits[static_cast<std::size_t>(s.label - 1)] - m - std::log(sum);
  }
  return total / static_cast<double>(data.size());
}

ModelParams param_axpy(double a, const ModelParams& x, const ModelParams& y) {
  if (!x.same_shape(y))
    throw std::invalid_argument("param_axpy: shape mismatch");
  ModelParams out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += a * x.values[i];
  return out;
}

Vector output_neuron_slice(const ModelParams& params, int neuron) {
  if (neuron < 1 || neuron > params.num_classes)
    throw std::invalid_argument("output_neuron_slice: neuron out of range");
  Vector slice(static_cast<std::size_t>(params.hidden_dim) + 1);
  const int l = neuron - 1;
  for (int j = 0; j < params.hidden_dim; ++j) slice[static_cast<std::size_t>(j)] = params.w2(l, j);
  slice[static_cast<std::size_t>(params.hidden_dim)] = params.b2(l);
  return slice;
}

Vector output_layer(const ModelParams& params) {
  return Vector(params.values.begin() + static_cast<std::ptrdiff_t>(params.w2_offset()),
                params.values.end());
}

namespace {

void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("load_params: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64_le(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

double read_f64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw std::runtime_error("load_params: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

void save_params(const ModelParams& params, std::ostream& out) {
  write_u32_le(out, static_cast<std::uint32_t>(params.input_dim));
  write_u32_le(out, static_cast<std::uint32_t>(params.hidden_dim));
  write_u32_le(out, static_cast<std::uint32_t>(params.num_classes));
  for (double v : params.values) write_f64_le(out, v);
}

void save_params(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_params: cannot open " + path);
  save_params(params, out);
}

ModelParams load_params(std::istream& in) {
  const auto d = static_cast<int>(read_u32_le(in));
  const auto h = static_cast<int>(read_u32_le(in));
  const auto e = static_cast<int>(read_u32_le(in));
  ModelParams p = ModelParams::zeros(d, h, e);
  for (std::size_t i = 0; i < p.size(); ++i) p.values[i] = read_f64_le(in);
  return p;
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_params: cannot open " + path);
  return load_params(in);
}

}  // namespace fedtrident
