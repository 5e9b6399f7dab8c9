#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedtrident/attack.hpp"
#include "fedtrident/baselines.hpp"
#include "fedtrident/dataset.hpp"
#include "fedtrident/mlp.hpp"
#include "fedtrident/rating.hpp"
#include "fedtrident/rng.hpp"

namespace fedtrident {

enum class Defense { kFedAvg, kKrum, kTMean, kMedian, kFoolsGold, kFlame, kFedTrident };

std::string defense_name(Defense d);
std::optional<Defense> defense_from_name(const std::string& name);
const std::vector<std::string>& defense_names();

struct ExperimentConfig {
  // population
  int num_clients = 100;           // K
  int participants_per_round = 20; // M
  int rounds = 60;                 // T
  double malicious_fraction = 0.30;
  double dirichlet_alpha = 1.0;

  // synthetic task, calibrated so the default attack bites while the
  // attack-free run stays accurate
  int num_classes = 6;
  int feature_dim = 16;
  int hidden_dim = 16;
  int samples_per_class = 20000;
  int test_samples_per_class = 500;
  double separation = 1.0;
  double noise = 0.33;
  double validation_fraction = 0.10;

  // local training
  TrainConfig train;

  // defense
  Defense defense = Defense::kFedTrident;
  BaselineConfig baseline;
  RatingPolicy rating;
  bool enable_validation = true;
  bool enable_exclusion = true;
  bool enable_remediation = true;

  // attack; the default is a static flip of the second-most-benign class
  // into the most benign one
  AttackSchedule schedule;

  std::uint64_t seed = 1;
  int threads = 1;

  int attacker_count() const;
  void validate() const;  // throws std::invalid_argument with the offending key
};

// Defaults above with the schedule filled in for the configured round count.
ExperimentConfig default_config();

struct RoundMetrics {
  int round = 0;
  std::optional<double> sre;
  std::optional<double> asr;
  std::optional<double> gac;
  std::optional<double> gas;
  int num_bad = 0;
  int blacklist_size = 0;
  std::optional<int> detected_f;  // lower class index of the identified pair
  std::optional<int> detected_g;  // higher class index
  std::optional<bool> reverted;        // set only when validation ran
  std::optional<bool> ambiguous;       // set only when detection ran
  std::optional<double> density_ratio;
  std::vector<int> bad_ids;

  // ground-truth bookkeeping
  int participants = 0;
  int attackers_selected = 0;   // participants in the malicious set
  int active_attackers = 0;     // of those, ones whose data actually flipped
  int flagged_attackers = 0;    // |bad ∩ malicious set|
  int flagged_active = 0;       // |bad ∩ active attackers|
};

struct DetectionQuality {
  double precision = 0.0;  // averaged over rounds with a nonempty bad set
  double recall = 0.0;     // averaged over rounds with at least one active attacker
  int precision_rounds = 0;
  int recall_rounds = 0;
};

struct RunResult {
  std::vector<RoundMetrics> rounds;
  ModelParams final_model;
  std::vector<ClientRecord> records;    // indexed by client id
  std::map<int, int> blacklist_rounds;  // client id -> round of exclusion
  AttackerSet attackers;
  double wall_seconds = 0.0;

  DetectionQuality detection_quality(int first_round = 1,
                                     int last_round = 0 /*0 = final*/) const;
};

class TrajectorySink {
 public:
  virtual ~TrajectorySink() = default;
  virtual void record(int round, int client_id, const ModelParams& delta) = 0;
};

// Uniform sample without replacement; returns the whole pool when it is
// smaller than m. Throws on an empty pool.
std::vector<int> select_clients(const std::vector<int>& pool, int m,
                                SeededRng& rng);

// Elementwise mean.
ModelParams aggregate_uniform(const std::vector<ModelParams>& models);

RunResult run_experiment(const ExperimentConfig& config,
                         TrajectorySink* sink = nullptr);

}  // namespace fedtrident
