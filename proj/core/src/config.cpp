#include "fedtrident/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fedtrident {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail(key + ": expected a number, got '" + value + "'");
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    fail(key + ": expected an integer, got '" + value + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value, long lo, long hi,
           const std::string& range_text) {
  long v = to_long(key, value);
  if (v < lo || v > hi) fail(key + ": expected " + range_text + ", got " + value);
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(key + ": expected true/false, got '" + value + "'");
}

// "1-10:3>2" -> rounds 1..10, flip 3 -> 2
AttackPhase parse_phase(const std::string& entry) {
  auto colon = entry.find(':');
  auto dash = entry.find('-');
  auto arrow = entry.find('>');
  if (colon == std::string::npos || dash == std::string::npos ||
      arrow == std::string::npos || dash > colon || arrow < colon)
    fail("attack_phases: malformed entry '" + entry +
         "' (expected first-last:source>target)");
  AttackPhase p;
  p.first_round = to_int("attack_phases", trim(entry.substr(0, dash)), 1, 1000000, ">= 1");
  p.last_round = to_int("attack_phases", trim(entry.substr(dash + 1, colon - dash - 1)), 1, 1000000, ">= 1");
  p.source = to_int("attack_phases", trim(entry.substr(colon + 1, arrow - colon - 1)), 1, 1000000, ">= 1");
  p.target = to_int("attack_phases", trim(entry.substr(arrow + 1)), 1, 1000000, ">= 1");
  return p;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg = default_config();
  int attack_source = 0, attack_target = 0;
  std::vector<AttackPhase> phases;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      fail("line " + std::to_string(line_no) + ": expected key = value");

    if (key == "num_clients") {
      cfg.num_clients = to_int(key, value, 1, 1000000, ">= 1");
    } else if (key == "participants_per_round") {
      cfg.participants_per_round = to_int(key, value, 1, 1000000, ">= 1");
    } else if (key == "rounds") {
      cfg.rounds = to_int(key, value, 0, 1000000, ">= 0");
    } else if (key == "malicious_fraction") {
      cfg.malicious_fraction = to_double(key, value);
      if (cfg.malicious_fraction < 0.0 || cfg.malicious_fraction > 1.0)
        fail(key + ": expected in [0, 1], got " + value);
    } else if (key == "dirichlet_alpha") {
      cfg.dirichlet_alpha = to_double(key, value);
      if (!(cfg.dirichlet_alpha > 0.0)) fail(key + ": expected > 0, got " + value);
    } else if (key == "num_classes") {
      cfg.num_classes = to_int(key, value, 2, 10000, ">= 2");
    } else if (key == "feature_dim") {
      cfg.feature_dim = to_int(key, value, 2, 1000000, ">= 2");
    } else if (key == "hidden_dim") {
      cfg.hidden_dim = to_int(key, value, 1, 1000000, ">= 1");
    } else if (key == "samples_per_class") {
      cfg.samples_per_class = to_int(key, value, 1, 100000000, ">= 1");
    } else if (key == "test_samples_per_class") {
      cfg.test_samples_per_class = to_int(key, value, 1, 100000000, ">= 1");
    } else if (key == "separation") {
      cfg.separation = to_double(key, value);
      if (!(cfg.separation > 0.0)) fail(key + ": expected > 0, got " + value);
    } else if (key == "noise") {
      cfg.noise = to_double(key, value);
      if (!(cfg.noise > 0.0)) fail(key + ": expected > 0, got " + value);
    } else if (key == "validation_fraction") {
      cfg.validation_fraction = to_double(key, value);
      if (cfg.validation_fraction < 0.0 || cfg.validation_fraction >= 1.0)
        fail(key + ": expected in [0, 1), got " + value);
    } else if (key == "learning_rate") {
      cfg.train.learning_rate = to_double(key, value);
      if (cfg.train.learning_rate < 0.0) fail(key + ": expected >= 0, got " + value);
    } else if (key == "momentum") {
      cfg.train.momentum = to_double(key, value);
      if (cfg.train.momentum < 0.0 || cfg.train.momentum >= 1.0)
        fail(key + ": expected in [0, 1), got " + value);
    } else if (key == "batch_size") {
      cfg.train.batch_size = to_int(key, value, 1, 100000000, ">= 1");
    } else if (key == "local_epochs") {
      cfg.train.local_epochs = to_int(key, value, 0, 100000, ">= 0");
    } else if (key == "defense") {
      auto d = defense_from_name(value);
      if (!d.has_value()) {
        std::string names;
        for (const auto& n : defense_names()) names += (names.empty() ? "" : ", ") + n;
        fail("defense: unknown name '" + value + "' (valid: " + names + ")");
      }
      cfg.defense = *d;
    } else if (key == "trim_fraction") {
      cfg.baseline.trim_fraction = to_double(key, value);
      if (cfg.baseline.trim_fraction < 0.0 || cfg.baseline.trim_fraction >= 0.5)
        fail(key + ": expected in [0, 0.5), got " + value);
    } else if (key == "flame_lambda") {
      cfg.baseline.flame_lambda = to_double(key, value);
      if (cfg.baseline.flame_lambda < 0.0) fail(key + ": expected >= 0, got " + value);
    } else if (key == "foolsgold_horizon") {
      cfg.baseline.foolsgold_horizon = to_int(key, value, 0, 1000000, ">= 0");
    } else if (key == "r_max") {
      cfg.rating.r_max = to_double(key, value);
    } else if (key == "r_min") {
      cfg.rating.r_min = to_double(key, value);
    } else if (key == "r_initial") {
      cfg.rating.r_initial = to_double(key, value);
    } else if (key == "reward") {
      cfg.rating.reward = to_double(key, value);
      if (!(cfg.rating.reward > 0.0)) fail(key + ": expected > 0, got " + value);
    } else if (key == "penalty_unit") {
      cfg.rating.penalty_unit = to_double(key, value);
      if (!(cfg.rating.penalty_unit > 0.0)) fail(key + ": expected > 0, got " + value);
    } else if (key == "sre_threshold") {
      cfg.rating.sre_threshold = to_double(key, value);
    } else if (key == "asr_threshold") {
      cfg.rating.asr_threshold = to_double(key, value);
    } else if (key == "enable_validation") {
      cfg.enable_validation = to_bool(key, value);
    } else if (key == "enable_exclusion") {
      cfg.enable_exclusion = to_bool(key, value);
    } else if (key == "enable_remediation") {
      cfg.enable_remediation = to_bool(key, value);
    } else if (key == "attack_source") {
      attack_source = to_int(key, value, 1, 10000, ">= 1");
    } else if (key == "attack_target") {
      attack_target = to_int(key, value, 1, 10000, ">= 1");
    } else if (key == "attack_phases") {
      std::stringstream ss(value);
      std::string entry;
      while (std::getline(ss, entry, ',')) {
        entry = trim(entry);
        if (!entry.empty()) phases.push_back(parse_phase(entry));
      }
      if (phases.empty()) fail("attack_phases: no phases given");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
    } else if (key == "threads") {
      cfg.threads = to_int(key, value, 1, 4096, ">= 1");
    } else {
      fail("unknown key '" + key + "'");
    }
  }

  if (!phases.empty() && (attack_source != 0 || attack_target != 0))
    fail("attack_phases conflicts with attack_source/attack_target");
  if ((attack_source != 0) != (attack_target != 0))
    fail("attack_source and attack_target must be given together");

  if (cfg.rounds >= 1) {
    if (!phases.empty()) {
      cfg.schedule = dynamic_schedule(phases);
    } else if (attack_source != 0) {
      cfg.schedule = static_schedule(attack_source, attack_target, cfg.rounds);
    } else {
      cfg.schedule = static_schedule(2, 1, cfg.rounds);  // default flip
    }
  } else {
    cfg.schedule = AttackSchedule{};
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  auto put_num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    out << key << " = " << buf << "\n";
  };
  out << "num_clients = " << cfg.num_clients << "\n";
  out << "participants_per_round = " << cfg.participants_per_round << "\n";
  out << "rounds = " << cfg.rounds << "\n";
  put_num("malicious_fraction", cfg.malicious_fraction);
  put_num("dirichlet_alpha", cfg.dirichlet_alpha);
  out << "num_classes = " << cfg.num_classes << "\n";
  out << "feature_dim = " << cfg.feature_dim << "\n";
  out << "hidden_dim = " << cfg.hidden_dim << "\n";
  out << "samples_per_class = " << cfg.samples_per_class << "\n";
  out << "test_samples_per_class = " << cfg.test_samples_per_class << "\n";
  put_num("separation", cfg.separation);
  put_num("noise", cfg.noise);
  put_num("validation_fraction", cfg.validation_fraction);
  put_num("learning_rate", cfg.train.learning_rate);
  put_num("momentum", cfg.train.momentum);
  out << "batch_size = " << cfg.train.batch_size << "\n";
  out << "local_epochs = " << cfg.train.local_epochs << "\n";
  out << "defense = " << defense_name(cfg.defense) << "\n";
  put_num("trim_fraction", cfg.baseline.trim_fraction);
  put_num("flame_lambda", cfg.baseline.flame_lambda);
  out << "foolsgold_horizon = " << cfg.baseline.foolsgold_horizon << "\n";
  put_num("r_max", cfg.rating.r_max);
  put_num("r_min", cfg.rating.r_min);
  put_num("r_initial", cfg.rating.r_initial);
  put_num("reward", cfg.rating.reward);
  put_num("penalty_unit", cfg.rating.penalty_unit);
  put_num("sre_threshold", cfg.rating.sre_threshold);
  put_num("asr_threshold", cfg.rating.asr_threshold);
  out << "enable_validation = " << (cfg.enable_validation ? "true" : "false") << "\n";
  out << "enable_exclusion = " << (cfg.enable_exclusion ? "true" : "false") << "\n";
  out << "enable_remediation = " << (cfg.enable_remediation ? "true" : "false") << "\n";
  if (!cfg.schedule.phases.empty()) {
    out << "attack_phases = ";
    for (std::size_t i = 0; i < cfg.schedule.phases.size(); ++i) {
      const auto& p = cfg.schedule.phases[i];
      if (i > 0) out << ",";
      out << p.first_round << "-" << p.last_round << ":" << p.source << ">" << p.target;
    }
    out << "\n";
  }
  out << "seed = " << cfg.seed << "\n";
  out << "threads = " << cfg.threads << "\n";
  return out.str();
}

}  // namespace fedtrident
