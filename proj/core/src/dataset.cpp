#include "fedtrident/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fedtrident {

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& s : samples) {
    if (s.label < 1 || s.label > num_classes)
      throw std::logic_error("Dataset: label out of range");
    ++counts[static_cast<std::size_t>(s.label - 1)];
  }
  return counts;
}

namespace {

Vector class_mean(int label, int feature_dim, double separation) {
  Vector mean(static_cast<std::size_t>(feature_dim), 0.0);
  mean[0] = separation * label;
  // zigzag on the second coordinate: every adjacent pair stays the nearest
  // neighbour pair, and the two least hazardous classes share a side so they
  // are the single most confusable pair
  double side;
  if (label <= 2)
    side = 1.0;
  else
    side = (label % 2 == 0) ? 1.0 : -1.0;
  mean[1] = 0.5 * separation * side;
  return mean;
}

}  // namespace

Dataset generate_synthetic(int num_classes, int feature_dim,
                           int samples_per_class, double separation,
                           double noise, SeededRng& rng) {
  if (num_classes < 2)
    throw std::invalid_argument("generate_synthetic: num_classes must be >= 2");
  if (feature_dim < 2)
    throw std::invalid_argument("generate_synthetic: feature_dim must be >= 2");
  if (samples_per_class < 1)
    throw std::invalid_argument("generate_synthetic: samples_per_class must be >= 1");
  if (!(separation > 0.0))
    throw std::invalid_argument("generate_synthetic: separation must be > 0");
  if (!(noise > 0.0))
    throw std::invalid_argument("generate_synthetic: noise must be > 0");

  Dataset data;
  data.num_classes = num_classes;
  data.feature_dim = feature_dim;
  data.samples.reserve(static_cast<std::size_t>(num_classes) * samples_per_class);
  for (int c = 1; c <= num_classes; ++c) {
    Vector mean = class_mean(c, feature_dim, separation);
    for (int i = 0; i < samples_per_class; ++i) {
      Sample s;
      s.label = c;
      s.features.resize(static_cast<std::size_t>(feature_dim));
      for (int j = 0; j < feature_dim; ++j)
        s.features[static_cast<std::size_t>(j)] =
            sample_gaussian(mean[static_cast<std::size_t>(j)], noise, rng);
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

std::vector<Dataset> partition_dirichlet(const Dataset& data, int num_clients,
                                         double alpha, SeededRng& rng) {
  if (data.empty())
    throw std::invalid_argument("partition_dirichlet: empty dataset");
  if (num_clients < 1)
    throw std::invalid_argument("partition_dirichlet: num_clients must be >= 1");
  if (!(alpha > 0.0))
    throw std::invalid_argument("partition_dirichlet: alpha must be > 0");

  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(data.num_classes));
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    by_class[static_cast<std::size_t>(data.samples[i].label - 1)].push_back(i);

  std::vector<Dataset> clients(static_cast<std::size_t>(num_clients));
  for (auto& c : clients) {
    c.num_classes = data.num_classes;
    c.feature_dim = data.feature_dim;
  }

  for (const auto& indices : by_class) {
    if (indices.empty()) continue;
    Vector shares = sample_dirichlet(alpha, num_clients, rng);
    const auto n = indices.size();

    // largest-remainder rounding: exact conservation of the class count
    std::vector<std::size_t> quota(static_cast<std::size_t>(num_clients));
    std::vector<std::pair<double, int>> remainders;
    std::size_t assigned = 0;
    for (int k = 0; k < num_clients; ++k) {
      double exact = shares[static_cast<std::size_t>(k)] * static_cast<double>(n);
      auto floor_part = static_cast<std::size_t>(exact);
      quota[static_cast<std::size_t>(k)] = floor_part;
      assigned += floor_part;
      remainders.emplace_back(exact - static_cast<double>(floor_part), k);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < n; ++r, ++assigned)
      ++quota[static_cast<std::size_t>(remainders[r].second)];

    std::size_t cursor = 0;
    for (int k = 0; k < num_clients; ++k) {
      for (std::size_t j = 0; j < quota[static_cast<std::size_t>(k)]; ++j)
        clients[static_cast<std::size_t>(k)].samples.push_back(
            data.samples[indices[cursor++]]);
    }
  }
  return clients;
}

Dataset flip_labels(const Dataset& data, int source, int target) {
  if (source < 1 || source > data.num_classes || target < 1 ||
      target > data.num_classes)
    throw std::invalid_argument("flip_labels: class index out of range");
  if (source == target)
    throw std::invalid_argument("flip_labels: source and target must differ");
  Dataset out = data;
  for (auto& s : out.samples)
    if (s.label == source) s.label = target;
  return out;
}

namespace {

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

bool parse_label(const std::string& field, int& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') return false;
  out = static_cast<int>(v);
  return true;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  Dataset data;
  std::string line;
  int line_no = 0;
  int feature_dim = -1;
  int max_label = 0;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);

    if (first_content_line) {
      first_content_line = false;
      double probe;
      if (!fields.empty() && !parse_double(fields[0], probe)) continue;  // header
    }

    if (fields.size() < 2)
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": expected features and a label");
    if (feature_dim == -1) {
      feature_dim = static_cast<int>(fields.size()) - 1;
    } else if (static_cast<int>(fields.size()) - 1 != feature_dim) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": expected " + std::to_string(feature_dim) +
                               " feature columns, got " +
                               std::to_string(fields.size() - 1));
    }

    Sample s;
    s.features.resize(static_cast<std::size_t>(feature_dim));
    for (int j = 0; j < feature_dim; ++j) {
      if (!parse_double(fields[static_cast<std::size_t>(j)],
                        s.features[static_cast<std::size_t>(j)]))
        throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                 ": malformed feature value '" +
                                 fields[static_cast<std::size_t>(j)] + "'");
    }
    if (!parse_label(fields.back(), s.label))
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": non-integer label '" + fields.back() + "'");
    if (s.label < 1)
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                               ": labels are 1-based, got " +
                               std::to_string(s.label));
    max_label = std::max(max_label, s.label);
    data.samples.push_back(std::move(s));
  }

  if (data.samples.empty()) throw std::runtime_error("load_csv: no data rows in " + path);
  data.feature_dim = feature_dim;
  data.num_classes = max_label;
  return data;
}

}  // namespace fedtrident
