#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <numeric>
#include <set>

#include "fedtrident/engine.hpp"
#include "fedtrident/runner.hpp"

using namespace fedtrident;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg = default_config();
  cfg.num_clients = 12;
  cfg.participants_per_round = 5;
  cfg.rounds = 4;
  cfg.num_classes = 3;
  cfg.feature_dim = 4;
  cfg.hidden_dim = 8;
  cfg.samples_per_class = 60;
  cfg.test_samples_per_class = 30;
  cfg.separation = 3.0;
  cfg.malicious_fraction = 0.25;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("select_clients basics") {
  SeededRng rng(79, 12000);
  std::vector<int> pool(20);
  std::iota(pool.begin(), pool.end(), 0);

  std::vector<int> all = select_clients(pool, 20, rng);
  CHECK(all == pool);

  std::vector<int> more = select_clients(pool, 50, rng);
  CHECK(more == pool);

  CHECK_THROWS_AS(select_clients({}, 3, rng), std::runtime_error);

  SeededRng a(79, 12001), b(79, 12001);
  CHECK(select_clients(pool, 7, a) == select_clients(pool, 7, b));
}

TEST_CASE("select_clients never leaves the pool") {
  std::vector<int> pool = {1, 3, 5, 7, 11, 13, 17, 19};
  std::set<int> allowed(pool.begin(), pool.end());
  for (std::uint64_t s = 0; s < 1000; ++s) {
    SeededRng rng(s, 12002);
    for (int id : select_clients(pool, 3, rng)) CHECK(allowed.count(id) == 1);
  }
}

TEST_CASE("aggregate_uniform") {
  ModelParams a = ModelParams::zeros(1, 1, 2);
  ModelParams b = a;
  for (double& v : b.values) v = 2.0;

  ModelParams mean = aggregate_uniform({a, b});
  for (double v : mean.values) CHECK(v == doctest::Approx(1.0));

  ModelParams same = aggregate_uniform({b, b, b});
  CHECK(same.values == b.values);

  CHECK_THROWS_AS(aggregate_uniform({}), std::invalid_argument);
}

TEST_CASE("aggregating means of halves matches the full mean") {
  SeededRng rng(83, 12003);
  std::vector<ModelParams> models;
  for (int i = 0; i < 4; ++i) models.push_back(init_params(3, 4, 3, rng));
  ModelParams whole = aggregate_uniform(models);
  ModelParams halves = aggregate_uniform(
      {aggregate_uniform({models[0], models[1]}),
       aggregate_uniform({models[2], models[3]})});
  for (std::size_t i = 0; i < whole.size(); ++i)
    CHECK(whole.values[i] == doctest::Approx(halves.values[i]).epsilon(1e-12));
}

TEST_CASE("the aggregate ignores bad models entirely") {
  // perturbing a filtered-out model cannot change the mean over the good set
  SeededRng rng(89, 12004);
  std::vector<ModelParams> models;
  for (int i = 0; i < 5; ++i) models.push_back(init_params(2, 3, 3, rng));
  std::vector<ModelParams> good(models.begin(), models.begin() + 3);
  ModelParams before = aggregate_uniform(good);
  for (double& v : models[4].values) v += 1e9;
  ModelParams after = aggregate_uniform({models[0], models[1], models[2]});
  CHECK(before.values == after.values);
}

TEST_CASE("plain FedAvg run matches an independent minimal loop") {
  ExperimentConfig cfg = small_config();
  cfg.defense = Defense::kFedAvg;
  cfg.malicious_fraction = 0.0;
  cfg.enable_validation = cfg.enable_exclusion = cfg.enable_remediation = false;
  cfg.rounds = 3;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);

  RunResult result = run_experiment(cfg);

  // hand-rolled loop over the same public pieces
  SeededRng train_rng(cfg.seed, derive_stream(stream::kTrainData));
  Dataset train = generate_synthetic(cfg.num_classes, cfg.feature_dim,
                                     cfg.samples_per_class, cfg.separation,
                                     cfg.noise, train_rng);
  SeededRng part_rng(cfg.seed, derive_stream(stream::kPartition));
  auto clients = partition_dirichlet(train, cfg.num_clients, cfg.dirichlet_alpha,
                                     part_rng);
  SeededRng init_rng(cfg.seed, derive_stream(stream::kModelInit));
  ModelParams global = init_params(cfg.feature_dim, cfg.hidden_dim,
                                   cfg.num_classes, init_rng);
  std::vector<int> ids(static_cast<std::size_t>(cfg.num_clients));
  std::iota(ids.begin(), ids.end(), 0);
  for (int t = 1; t <= cfg.rounds; ++t) {
    SeededRng sel(cfg.seed, derive_stream(stream::kSelection, static_cast<std::uint64_t>(t)));
    std::vector<ModelParams> locals;
    for (int k : select_clients(ids, cfg.participants_per_round, sel)) {
      const Dataset& data = clients[static_cast<std::size_t>(k)];
      if (data.empty()) {
        locals.push_back(global);
        continue;
      }
      SeededRng tr(cfg.seed, derive_stream(stream::kLocalTraining,
                                           static_cast<std::uint64_t>(t),
                                           static_cast<std::uint64_t>(k)));
      locals.push_back(train_local(global, data, cfg.train, tr));
    }
    global = aggregate_uniform(locals);
  }

  REQUIRE(result.final_model.size() == global.size());
  for (std::size_t i = 0; i < global.size(); ++i)
    CHECK(result.final_model.values[i] ==
          doctest::Approx(global.values[i]).epsilon(1e-12));
}

TEST_CASE("zero rounds returns the initial model and no metrics") {
  ExperimentConfig cfg = small_config();
  cfg.rounds = 0;
  cfg.schedule = AttackSchedule{};
  RunResult result = run_experiment(cfg);
  CHECK(result.rounds.empty());

  SeededRng init_rng(cfg.seed, derive_stream(stream::kModelInit));
  ModelParams expected = init_params(cfg.feature_dim, cfg.hidden_dim,
                                     cfg.num_classes, init_rng);
  CHECK(result.final_model.values == expected.values);
}

TEST_CASE("zero learning rate is a fixed point of the round loop") {
  ExperimentConfig cfg = small_config();
  cfg.defense = Defense::kFedAvg;
  cfg.malicious_fraction = 0.0;
  cfg.train.learning_rate = 0.0;
  RunResult result = run_experiment(cfg);

  SeededRng init_rng(cfg.seed, derive_stream(stream::kModelInit));
  ModelParams initial = init_params(cfg.feature_dim, cfg.hidden_dim,
                                    cfg.num_classes, init_rng);
  // every round averages bitwise-identical copies; equal up to the rounding
  // of (n*x)/n
  REQUIRE(result.final_model.size() == initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i)
    CHECK(result.final_model.values[i] ==
          doctest::Approx(initial.values[i]).epsilon(1e-14));
}

TEST_CASE("fedavg never flags anyone") {
  ExperimentConfig cfg = small_config();
  cfg.defense = Defense::kFedAvg;
  cfg.malicious_fraction = 0.0;
  RunResult result = run_experiment(cfg);
  REQUIRE(result.rounds.size() == 4);
  for (const auto& rm : result.rounds) {
    CHECK(rm.num_bad == 0);
    CHECK(rm.bad_ids.empty());
    CHECK(rm.blacklist_size == 0);
  }
}

TEST_CASE("identical config and seed reproduce the run bit for bit") {
  ExperimentConfig cfg = small_config();
  RunResult a = run_experiment(cfg);
  RunResult b = run_experiment(cfg);
  CHECK(a.final_model.values == b.final_model.values);
  CHECK(rounds_csv(a.rounds) == rounds_csv(b.rounds));
}

TEST_CASE("thread count does not change the result") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  RunResult serial = run_experiment(cfg);
  cfg.threads = 4;
  RunResult parallel = run_experiment(cfg);
  CHECK(serial.final_model.values == parallel.final_model.values);
  CHECK(rounds_csv(serial.rounds) == rounds_csv(parallel.rounds));
}

TEST_CASE("the blacklist never shrinks and exclusion is permanent") {
  ExperimentConfig cfg = small_config();
  cfg.rounds = 12;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);
  RunResult result = run_experiment(cfg);
  int last = 0;
  for (const auto& rm : result.rounds) {
    CHECK(rm.blacklist_size >= last);
    last = rm.blacklist_size;
  }
  for (const auto& [id, round] : result.blacklist_rounds) {
    CHECK(result.records[static_cast<std::size_t>(id)].blacklisted);
    // a blacklisted client must not appear in any later round's bad list
    for (const auto& rm : result.rounds) {
      if (rm.round <= round) continue;
      CHECK(std::find(rm.bad_ids.begin(), rm.bad_ids.end(), id) == rm.bad_ids.end());
    }
  }
}

TEST_CASE("exclusion switched off keeps the blacklist empty") {
  ExperimentConfig cfg = small_config();
  cfg.rounds = 10;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);
  cfg.enable_exclusion = false;
  RunResult result = run_experiment(cfg);
  for (const auto& rm : result.rounds) CHECK(rm.blacklist_size == 0);
  for (const auto& r : result.records) {
    CHECK_FALSE(r.blacklisted);
    CHECK(r.rating == doctest::Approx(cfg.rating.r_initial));
  }
}

TEST_CASE("ratings stay in range over a full run") {
  ExperimentConfig cfg = small_config();
  cfg.rounds = 15;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);
  RunResult result = run_experiment(cfg);
  for (const auto& r : result.records) {
    CHECK(r.rating >= cfg.rating.r_min);
    CHECK(r.rating <= cfg.rating.r_max);
  }
  CHECK(result.rounds.size() == 15);
}
