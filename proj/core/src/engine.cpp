#include "fedtrident/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "fedtrident/detection.hpp"
#include "fedtrident/gmm.hpp"
#include "fedtrident/log.hpp"

namespace fedtrident {

std::string defense_name(Defense d) {
  switch (d) {
    case Defense::kFedAvg: return "fedavg";
    case Defense::kKrum: return "krum";
    case Defense::kTMean: return "tmean";
    case Defense::kMedian: return "median";
    case Defense::kFoolsGold: return "foolsgold";
    case Defense::kFlame: return "flame";
    case Defense::kFedTrident: return "fedtrident";
  }
  return "unknown";
}

const std::vector<std::string>& defense_names() {
  static const std::vector<std::string> names = {
      "fedavg", "krum", "tmean", "median", "foolsgold", "flame", "fedtrident"};
  return names;
}

std::optional<Defense> defense_from_name(const std::string& name) {
  static const std::vector<Defense> order = {
      Defense::kFedAvg, Defense::kKrum,  Defense::kTMean,     Defense::kMedian,
      Defense::kFoolsGold, Defense::kFlame, Defense::kFedTrident};
  for (std::size_t i = 0; i < defense_names().size(); ++i)
    if (defense_names()[i] == name) return order[i];
  return std::nullopt;
}

int ExperimentConfig::attacker_count() const {
  return static_cast<int>(
      std::llround(malicious_fraction * static_cast<double>(num_clients)));
}

namespace {

[[noreturn]] void bad_config(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (num_clients < 1) bad_config("num_clients: expected >= 1");
  if (participants_per_round < 1 || participants_per_round > num_clients)
    bad_config("participants_per_round: expected in [1, num_clients]");
  if (rounds < 0) bad_config("rounds: expected >= 0");
  if (malicious_fraction < 0.0 || malicious_fraction > 1.0)
    bad_config("malicious_fraction: expected in [0, 1]");
  if (2 * attacker_count() >= num_clients && attacker_count() > 0)
    bad_config("malicious_fraction: attackers must be a strict minority (P < K/2)");
  if (!(dirichlet_alpha > 0.0)) bad_config("dirichlet_alpha: expected > 0");
  if (num_classes < 2) bad_config("num_classes: expected >= 2");
  if (feature_dim < 2) bad_config("feature_dim: expected >= 2");
  if (hidden_dim < 1) bad_config("hidden_dim: expected >= 1");
  if (samples_per_class < 1) bad_config("samples_per_class: expected >= 1");
  if (test_samples_per_class < 1) bad_config("test_samples_per_class: expected >= 1");
  if (!(separation > 0.0)) bad_config("separation: expected > 0");
  if (!(noise > 0.0)) bad_config("noise: expected > 0");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0)
    bad_config("validation_fraction: expected in [0, 1)");
  if (train.learning_rate < 0.0) bad_config("learning_rate: expected >= 0");
  if (train.momentum < 0.0 || train.momentum >= 1.0)
    bad_config("momentum: expected in [0, 1)");
  if (train.batch_size < 1) bad_config("batch_size: expected >= 1");
  if (train.local_epochs < 0) bad_config("local_epochs: expected >= 0");
  if (baseline.trim_fraction < 0.0 || baseline.trim_fraction >= 0.5)
    bad_config("trim_fraction: expected in [0, 0.5)");
  if (baseline.flame_lambda < 0.0) bad_config("flame_lambda: expected >= 0");
  if (baseline.foolsgold_horizon < 0) bad_config("foolsgold_horizon: expected >= 0");
  if (!(rating.r_min < rating.r_initial && rating.r_initial < rating.r_max))
    bad_config("rating: expected r_min < r_initial < r_max");
  if (!(rating.reward > 0.0) || !(rating.penalty_unit > 0.0))
    bad_config("rating: reward and penalty_unit must be > 0");
  if (threads < 1) bad_config("threads: expected >= 1");
  if (rounds >= 1) {
    if (schedule.phases.empty()) bad_config("attack schedule is empty");
    if (schedule.total_rounds != rounds)
      bad_config("attack schedule covers [1.." +
                 std::to_string(schedule.total_rounds) + "] but rounds = " +
                 std::to_string(rounds));
    for (const auto& p : schedule.phases) {
      if (p.source > num_classes || p.target > num_classes)
        bad_config("attack schedule: class index exceeds num_classes");
    }
  }
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.schedule = static_schedule(2, 1, cfg.rounds);
  return cfg;
}

std::vector<int> select_clients(const std::vector<int>& pool, int m,
                                SeededRng& rng) {
  if (pool.empty())
    throw std::runtime_error("select_clients: selection pool is empty");
  if (m < 1) throw std::invalid_argument("select_clients: m must be >= 1");
  if (static_cast<std::size_t>(m) >= pool.size()) {
    std::vector<int> all = pool;
    std::sort(all.begin(), all.end());
    return all;
  }
  std::vector<int> scratch = pool;
  std::sort(scratch.begin(), scratch.end());
  for (int i = 0; i < m; ++i) {
    std::size_t j = static_cast<std::size_t>(i) +
                    rng.bounded(scratch.size() - static_cast<std::size_t>(i));
    std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
  }
  scratch.resize(static_cast<std::size_t>(m));
  std::sort(scratch.begin(), scratch.end());
  return scratch;
}

ModelParams aggregate_uniform(const std::vector<ModelParams>& models) {
  if (models.empty())
    throw std::invalid_argument("aggregate_uniform: no models to aggregate");
  ModelParams out = ModelParams::zeros(models[0].input_dim, models[0].hidden_dim,
                                       models[0].num_classes);
  for (const auto& m : models) {
    if (!m.same_shape(out))
      throw std::invalid_argument("aggregate_uniform: model shape mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += m.values[i];
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  for (double& v : out.values) v *= inv;
  return out;
}

DetectionQuality RunResult::detection_quality(int first_round,
                                              int last_round) const {
  DetectionQuality q;
  double precision_sum = 0.0, recall_sum = 0.0;
  for (const auto& rm : rounds) {
    if (rm.round < first_round) continue;
    if (last_round > 0 && rm.round > last_round) continue;
    if (rm.num_bad > 0) {
      precision_sum += static_cast<double>(rm.flagged_attackers) /
                       static_cast<double>(rm.num_bad);
      ++q.precision_rounds;
    }
    if (rm.active_attackers > 0) {
      recall_sum += static_cast<double>(rm.flagged_active) /
                    static_cast<double>(rm.active_attackers);
      ++q.recall_rounds;
    }
  }
  q.precision = q.precision_rounds > 0 ? precision_sum / q.precision_rounds : 1.0;
  q.recall = q.recall_rounds > 0 ? recall_sum / q.recall_rounds : 1.0;
  return q;
}

namespace {

// Runs fn(i) for i in [0, n); with more than one thread the index space is
// chunked across std::async tasks. Every fn(i) must touch only slot i.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto workers = static_cast<std::size_t>(threads);
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= n) break;
    const std::size_t end = std::min(begin + chunk, n);
    futures.push_back(std::async(std::launch::async, [begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    }));
  }
  for (auto& f : futures) f.get();
}

struct FoolsGoldState {
  std::map<int, Vector> sums;                  // full-run accumulation
  std::map<int, std::vector<Vector>> windows;  // used when horizon > 0
  int horizon = 0;

  void add(int client, const Vector& delta) {
    if (horizon > 0) {
      auto& w = windows[client];
      w.push_back(delta);
      if (static_cast<int>(w.size()) > horizon) w.erase(w.begin());
      return;
    }
    auto it = sums.find(client);
    if (it == sums.end()) {
      sums[client] = delta;
    } else {
      for (std::size_t i = 0; i < delta.size(); ++i) it->second[i] += delta[i];
    }
  }

  Vector history(int client, std::size_t dim) const {
    if (horizon > 0) {
      Vector h(dim, 0.0);
      auto it = windows.find(client);
      if (it != windows.end())
        for (const auto& d : it->second)
          for (std::size_t i = 0; i < dim; ++i) h[i] += d[i];
      return h;
    }
    auto it = sums.find(client);
    return it != sums.end() ? it->second : Vector(dim, 0.0);
  }
};

struct Simulation {
  const ExperimentConfig& cfg;
  TrajectorySink* sink;

  std::vector<Dataset> client_data;
  std::vector<std::vector<int>> client_class_counts;
  Dataset reported_test;
  Dataset validation_set;
  std::vector<int> test_truth;
  AttackerSet attackers;

  ModelParams global;
  std::vector<ClientRecord> records;
  std::map<int, int> blacklist_rounds;
  FoolsGoldState foolsgold;
  double sre_old = 0.0;  // per protocol start values
  double asr_old = 1.0;
  bool warned_small_pool = false;

  explicit Simulation(const ExperimentConfig& config, TrajectorySink* s)
      : cfg(config), sink(s) {
    SeededRng train_rng(cfg.seed, derive_stream(stream::kTrainData));
    Dataset train_data = generate_synthetic(cfg.num_classes, cfg.feature_dim,
                                            cfg.samples_per_class, cfg.separation,
                                            cfg.noise, train_rng);
    SeededRng test_rng(cfg.seed, derive_stream(stream::kTestData));
    Dataset test_all = generate_synthetic(cfg.num_classes, cfg.feature_dim,
                                          cfg.test_samples_per_class,
                                          cfg.separation, cfg.noise, test_rng);
    split_validation(test_all);

    SeededRng part_rng(cfg.seed, derive_stream(stream::kPartition));
    client_data = partition_dirichlet(train_data, cfg.num_clients,
                                      cfg.dirichlet_alpha, part_rng);
    client_class_counts.reserve(client_data.size());
    for (const auto& d : client_data)
      client_class_counts.push_back(d.class_counts());

    const int p = cfg.attacker_count();
    if (p > 0) {
      std::vector<int> ids(static_cast<std::size_t>(cfg.num_clients));
      std::iota(ids.begin(), ids.end(), 0);
      SeededRng attacker_rng(cfg.seed, derive_stream(stream::kAttackers));
      for (int id : select_clients(ids, p, attacker_rng)) attackers.ids.insert(id);
    }

    SeededRng init_rng(cfg.seed, derive_stream(stream::kModelInit));
    global = init_params(cfg.feature_dim, cfg.hidden_dim, cfg.num_classes, init_rng);

    records.resize(static_cast<std::size_t>(cfg.num_clients));
    for (int k = 0; k < cfg.num_clients; ++k) {
      records[static_cast<std::size_t>(k)].id = k;
      records[static_cast<std::size_t>(k)].rating = cfg.rating.r_initial;
    }
    foolsgold.horizon = cfg.baseline.foolsgold_horizon;

    test_truth.reserve(reported_test.size());
    for (const auto& s : reported_test.samples) test_truth.push_back(s.label);
  }

  // Stratified split: validation_fraction of each class, disjoint from the
  // reported test set.
  void split_validation(const Dataset& test_all) {
    reported_test.num_classes = validation_set.num_classes = test_all.num_classes;
    reported_test.feature_dim = validation_set.feature_dim = test_all.feature_dim;
    SeededRng split_rng(cfg.seed, derive_stream(stream::kValidationSplit));
    for (int c = 1; c <= test_all.num_classes; ++c) {
      std::vector<std::size_t> indices;
      for (std::size_t i = 0; i < test_all.samples.size(); ++i)
        if (test_all.samples[i].label == c) indices.push_back(i);
      split_rng.shuffle(indices.begin(), indices.end());
      const auto take = static_cast<std::size_t>(
          std::llround(cfg.validation_fraction * static_cast<double>(indices.size())));
      for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i < take)
          validation_set.samples.push_back(test_all.samples[indices[i]]);
        else
          reported_test.samples.push_back(test_all.samples[indices[i]]);
      }
    }
  }

  RoundMetrics run_round(int t) {
    std::vector<int> pool;
    for (const auto& r : records)
      if (!r.blacklisted) pool.push_back(r.id);
    if (pool.empty())
      throw std::runtime_error("round " + std::to_string(t) +
                               ": every client is blacklisted");
    if (static_cast<int>(pool.size()) < cfg.participants_per_round &&
        !warned_small_pool) {
      log_warn("eligible pool (" + std::to_string(pool.size()) +
               ") is below participants_per_round (" +
               std::to_string(cfg.participants_per_round) + "); continuing with the pool");
      warned_small_pool = true;
    }
    SeededRng select_rng(cfg.seed, derive_stream(stream::kSelection, static_cast<std::uint64_t>(t)));
    std::vector<int> participants =
        select_clients(pool, cfg.participants_per_round, select_rng);
    const std::size_t m = participants.size();
    const AttackPhase& phase = cfg.schedule.effective(t);

    std::vector<ModelParams> locals(m);
    parallel_for(m, cfg.threads, [&](std::size_t idx) {
      const int k = participants[idx];
      const Dataset& clean = client_data[static_cast<std::size_t>(k)];
      Dataset view = poisoned_view(k, clean, cfg.schedule, attackers, t);
      if (view.empty()) {
        locals[idx] = global;  // nothing to train on
        return;
      }
      SeededRng train_rng(cfg.seed,
                          derive_stream(stream::kLocalTraining,
                                        static_cast<std::uint64_t>(t),
                                        static_cast<std::uint64_t>(k)));
      locals[idx] = train_local(global, view, cfg.train, train_rng);
    });

    if (sink != nullptr) {
      for (std::size_t idx = 0; idx < m; ++idx)
        sink->record(t, participants[idx], param_axpy(-1.0, global, locals[idx]));
    }

    RoundMetrics rm;
    rm.round = t;
    rm.participants = static_cast<int>(m);
    for (int k : participants) {
      if (!attackers.contains(k)) continue;
      ++rm.attackers_selected;
      if (client_class_counts[static_cast<std::size_t>(k)]
                             [static_cast<std::size_t>(phase.source - 1)] > 0)
        ++rm.active_attackers;
    }

    std::vector<int> good_ids = participants;
    std::vector<int> bad_ids;
    ModelParams candidate;
    std::optional<std::pair<int, int>> neuron_pair;

    if (m == 1) {
      candidate = locals[0];
    } else {
      switch (cfg.defense) {
        case Defense::kFedAvg:
          candidate = aggregate_uniform(locals);
          break;
        case Defense::kKrum: {
          std::size_t chosen = krum_select(locals);
          candidate = locals[chosen];
          good_ids = {participants[chosen]};
          break;
        }
        case Defense::kTMean:
          candidate = trimmed_mean(locals, cfg.baseline.trim_fraction);
          break;
        case Defense::kMedian:
          candidate = coordinate_median(locals);
          break;
        case Defense::kFoolsGold: {
          const Vector global_out = output_layer(global);
          std::vector<Vector> histories;
          histories.reserve(m);
          for (std::size_t idx = 0; idx < m; ++idx) {
            Vector delta = output_layer(locals[idx]);
            for (std::size_t i = 0; i < delta.size(); ++i) delta[i] -= global_out[i];
            foolsgold.add(participants[idx], delta);
            histories.push_back(foolsgold.history(participants[idx], delta.size()));
          }
          std::vector<double> weights = foolsgold_weights(histories);
          double total = std::accumulate(weights.begin(), weights.end(), 0.0);
          candidate = global;
          if (total > 0.0) {
            for (std::size_t idx = 0; idx < m; ++idx) {
              const double w = weights[idx] / total;
              if (w == 0.0) continue;
              for (std::size_t i = 0; i < candidate.size(); ++i)
                candidate.values[i] +=
                    w * (locals[idx].values[i] - global.values[i]);
            }
          }
          break;
        }
        case Defense::kFlame: {
          SeededRng noise_rng(cfg.seed,
                              derive_stream(stream::kFlameNoise,
                                            static_cast<std::uint64_t>(t)));
          FlameResult fr = flame(locals, global, cfg.baseline.flame_lambda, noise_rng);
          candidate = std::move(fr.aggregate);
          good_ids.clear();
          for (auto i : fr.admitted) good_ids.push_back(participants[i]);
          for (auto i : fr.rejected) bad_ids.push_back(participants[i]);
          break;
        }
        case Defense::kFedTrident: {
          NeuronFeatureTable table = compute_neuron_features(locals, global);
          auto pair = identify_source_target(table);
          neuron_pair = pair;
          rm.detected_f = pair.first;
          rm.detected_g = pair.second;
          std::vector<Vector> features =
              build_feature_set(table, pair.first, pair.second);
          GmmModel gmm = gmm_fit(features);
          DetectionSplit split = split_good_bad(features, gmm, participants);
          if (log_level() >= 2) {
            std::vector<int> assign = gmm_hard_assign(gmm);
            std::string line = "round " + std::to_string(t) + " features:";
            for (std::size_t idx = 0; idx < m; ++idx) {
              char buf[64];
              std::snprintf(buf, sizeof(buf), " %d%s:%.3f/c%d", participants[idx],
                            attackers.contains(participants[idx]) ? "A" : "",
                            l2_norm(features[idx]), assign[idx]);
              line += buf;
            }
            log_debug(line);
          }
          rm.ambiguous = split.ambiguous;
          rm.density_ratio = split.density_ratio;
          good_ids = split.good;
          bad_ids = split.bad;
          std::vector<ModelParams> good_models;
          good_models.reserve(good_ids.size());
          for (std::size_t idx = 0; idx < m; ++idx)
            if (std::find(bad_ids.begin(), bad_ids.end(), participants[idx]) ==
                bad_ids.end())
              good_models.push_back(locals[idx]);
          candidate = aggregate_uniform(good_models);
          break;
        }
      }
    }

    // only good contributions enter the client trajectories
    for (std::size_t idx = 0; idx < m; ++idx) {
      const int k = participants[idx];
      if (std::find(good_ids.begin(), good_ids.end(), k) == good_ids.end()) continue;
      accumulate_update(records[static_cast<std::size_t>(k)], locals[idx], global,
                        static_cast<int>(good_ids.size()));
    }

    if (cfg.defense == Defense::kFedTrident && cfg.enable_validation &&
        neuron_pair.has_value() && !validation_set.empty()) {
      ValidationResult vr =
          validate_global(candidate, global, validation_set, neuron_pair->first,
                          neuron_pair->second, cfg.rating, sre_old, asr_old);
      if (vr.skipped) {
        log_debug("round " + std::to_string(t) +
                  ": validation skipped (no source-class sample)");
      } else {
        rm.reverted = vr.reverted;
        candidate = std::move(vr.accepted);
      }
    }

    if (cfg.defense == Defense::kFedTrident && cfg.enable_exclusion) {
      for (int k : participants) {
        const bool detected_bad =
            std::find(bad_ids.begin(), bad_ids.end(), k) != bad_ids.end();
        RatingOutcome outcome =
            update_rating(records[static_cast<std::size_t>(k)], detected_bad, cfg.rating);
        if (outcome.newly_blacklisted) {
          blacklist_rounds[k] = t;
          log_info("round " + std::to_string(t) + ": client " +
                   std::to_string(k) + " blacklisted");
          if (cfg.enable_remediation)
            candidate = unlearn(candidate, records[static_cast<std::size_t>(k)]);
        }
      }
    }

    global = std::move(candidate);

    ConfusionMatrix cm = confusion(test_truth, predict(global, reported_test),
                                   cfg.num_classes);
    rm.sre = sre(cm, phase.source);
    rm.asr = asr(cm, phase.source, phase.target);
    rm.gac = gac(cm);
    rm.gas = gas(cm);
    rm.num_bad = static_cast<int>(bad_ids.size());
    std::sort(bad_ids.begin(), bad_ids.end());
    rm.bad_ids = bad_ids;
    for (int k : bad_ids) {
      if (!attackers.contains(k)) continue;
      ++rm.flagged_attackers;
      if (client_class_counts[static_cast<std::size_t>(k)]
                             [static_cast<std::size_t>(phase.source - 1)] > 0)
        ++rm.flagged_active;
    }
    rm.blacklist_size = static_cast<int>(blacklist_rounds.size());
    return rm;
  }
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, TrajectorySink* sink) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  Simulation sim(config, sink);
  RunResult result;
  result.rounds.reserve(static_cast<std::size_t>(config.rounds));
  for (int t = 1; t <= config.rounds; ++t) {
    result.rounds.push_back(sim.run_round(t));
    log_debug("round " + std::to_string(t) + " complete");
  }
  result.final_model = std::move(sim.global);
  result.records = std::move(sim.records);
  result.blacklist_rounds = std::move(sim.blacklist_rounds);
  result.attackers = std::move(sim.attackers);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace fedtrident
