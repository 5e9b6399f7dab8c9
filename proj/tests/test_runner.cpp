#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fedtrident/config.hpp"
#include "fedtrident/mlp.hpp"
#include "fedtrident/runner.hpp"

using namespace fedtrident;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_run_config() {
  ExperimentConfig cfg = parse_config_text(
      "num_clients = 10\n"
      "participants_per_round = 4\n"
      "rounds = 5\n"
      "num_classes = 3\n"
      "feature_dim = 4\n"
      "hidden_dim = 6\n"
      "samples_per_class = 40\n"
      "test_samples_per_class = 20\n"
      "malicious_fraction = 0.2\n"
      "seed = 9\n");
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run_to_directory writes the full artifact set") {
  TempDir dir("fedtrident_runner_test");
  ExperimentConfig cfg = tiny_run_config();
  REQUIRE(run_to_directory(cfg, dir.path.string()) == 0);

  std::string rounds = slurp(dir.path / "rounds.csv");
  CHECK(count_lines(rounds) == cfg.rounds + 1);  // header + one row per round
  CHECK(rounds.rfind("round,sre,asr,gac,gas,num_bad,blacklist_size,"
                     "detected_f,detected_g,revert,ambiguous\n", 0) == 0);

  std::string detection = slurp(dir.path / "detection.csv");
  CHECK(count_lines(detection) == cfg.rounds + 1);

  auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
  CHECK(summary.contains("config"));
  CHECK(summary.contains("final"));
  CHECK(summary.contains("blacklist"));
  CHECK(summary["wall_seconds"].get<double>() > 0.0);

  // final metrics agree with the last CSV row
  std::istringstream lines(rounds);
  std::string line, last;
  std::getline(lines, line);  // header
  while (std::getline(lines, line))
    if (!line.empty()) last = line;
  std::istringstream row(last);
  std::string field;
  std::getline(row, field, ',');  // round
  std::getline(row, field, ',');
  CHECK(summary["final"]["sre"].get<double>() ==
        doctest::Approx(std::stod(field)).epsilon(1e-9));
  std::getline(row, field, ',');
  CHECK(summary["final"]["asr"].get<double>() ==
        doctest::Approx(std::stod(field)).epsilon(1e-9));
  std::getline(row, field, ',');
  CHECK(summary["final"]["gac"].get<double>() ==
        doctest::Approx(std::stod(field)).epsilon(1e-9));
  std::getline(row, field, ',');
  CHECK(summary["final"]["gas"].get<double>() ==
        doctest::Approx(std::stod(field)).epsilon(1e-9));
}

TEST_CASE("reruns of the same config are byte-identical") {
  TempDir dir_a("fedtrident_rerun_a");
  TempDir dir_b("fedtrident_rerun_b");
  ExperimentConfig cfg = tiny_run_config();
  REQUIRE(run_to_directory(cfg, dir_a.path.string()) == 0);
  REQUIRE(run_to_directory(cfg, dir_b.path.string()) == 0);
  CHECK(slurp(dir_a.path / "rounds.csv") == slurp(dir_b.path / "rounds.csv"));
  CHECK(slurp(dir_a.path / "detection.csv") == slurp(dir_b.path / "detection.csv"));
}

TEST_CASE("non-detecting defenses leave detection fields empty, not absent") {
  TempDir dir("fedtrident_schema_test");
  ExperimentConfig cfg = tiny_run_config();
  cfg.defense = Defense::kFedAvg;
  REQUIRE(run_to_directory(cfg, dir.path.string()) == 0);
  std::istringstream rounds(slurp(dir.path / "rounds.csv"));
  std::string header, row;
  std::getline(rounds, header);
  std::getline(rounds, row);
  // every column present: 11 fields means 10 commas
  CHECK(std::count(row.begin(), row.end(), ',') == 10);
  // detected_f and detected_g are empty for fedavg
  std::vector<std::string> fields;
  std::istringstream rs(row);
  std::string f;
  while (std::getline(rs, f, ',')) fields.push_back(f);
  fields.resize(11);
  CHECK(fields[7].empty());
  CHECK(fields[8].empty());
  CHECK(fields[9].empty());
  CHECK(fields[10].empty());
}

TEST_CASE("trajectory dump round-trips through the binary format") {
  TempDir dir("fedtrident_traj_test");
  ExperimentConfig cfg = tiny_run_config();
  cfg.rounds = 2;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);
  REQUIRE(run_to_directory(cfg, dir.path.string(), /*dump_trajectory=*/true) == 0);

  fs::path traj = dir.path / "trajectory";
  REQUIRE(fs::exists(traj));
  int files = 0;
  for (const auto& entry : fs::directory_iterator(traj)) {
    ModelParams delta = load_params(entry.path().string());
    CHECK(delta.input_dim == cfg.feature_dim);
    CHECK(delta.hidden_dim == cfg.hidden_dim);
    CHECK(delta.num_classes == cfg.num_classes);
    ++files;
  }
  CHECK(files == cfg.rounds * cfg.participants_per_round);
}

TEST_CASE("ablation trio differs only in the enabled stages") {
  TempDir dir("fedtrident_ablation_test");
  ExperimentConfig detection_only = tiny_run_config();
  detection_only.enable_exclusion = false;
  detection_only.enable_remediation = false;
  detection_only.enable_validation = false;
  ExperimentConfig with_exclusion = tiny_run_config();
  with_exclusion.enable_remediation = false;
  with_exclusion.enable_validation = false;
  ExperimentConfig full = tiny_run_config();

  REQUIRE(run_to_directory(detection_only, (dir.path / "detection").string()) == 0);
  REQUIRE(run_to_directory(with_exclusion, (dir.path / "exclusion").string()) == 0);
  REQUIRE(run_to_directory(full, (dir.path / "full").string()) == 0);

  auto s1 = nlohmann::json::parse(slurp(dir.path / "detection" / "summary.json"));
  auto s2 = nlohmann::json::parse(slurp(dir.path / "exclusion" / "summary.json"));
  auto s3 = nlohmann::json::parse(slurp(dir.path / "full" / "summary.json"));
  CHECK(s1["config"]["enable_exclusion"] == "false");
  CHECK(s2["config"]["enable_exclusion"] == "true");
  CHECK(s2["config"]["enable_remediation"] == "false");
  CHECK(s3["config"]["enable_remediation"] == "true");
  // detection-only runs never blacklist
  CHECK(s1["blacklist"].size() == 0);
}

TEST_CASE("sweep writes one row per value") {
  TempDir dir("fedtrident_sweep_test");
  ExperimentConfig cfg = tiny_run_config();
  cfg.rounds = 3;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);

  REQUIRE(sweep_to_directory(cfg, "malicious_fraction",
                             {"0", "0.1", "0.2", "0.3", "0.4"},
                             dir.path.string()) == 0);
  std::string csv = slurp(dir.path / "sweep.csv");
  CHECK(count_lines(csv) == 6);  // header + 5 rows
  CHECK(fs::exists(dir.path / "malicious_fraction_0.2" / "rounds.csv"));
}

TEST_CASE("sweep over every defense name") {
  TempDir dir("fedtrident_sweep_defense");
  ExperimentConfig cfg = tiny_run_config();
  cfg.rounds = 2;
  cfg.schedule = static_schedule(3, 1, cfg.rounds);

  std::vector<std::string> all(defense_names().begin(), defense_names().end());
  REQUIRE(sweep_to_directory(cfg, "defense", all, dir.path.string()) == 0);
  CHECK(count_lines(slurp(dir.path / "sweep.csv")) == 8);  // header + 7
}

TEST_CASE("sweep rejects an empty value list") {
  TempDir dir("fedtrident_sweep_empty");
  ExperimentConfig cfg = tiny_run_config();
  CHECK(sweep_to_directory(cfg, "alpha", {}, dir.path.string()) != 0);
  CHECK(sweep_to_directory(cfg, "bogus_axis", {"1"}, dir.path.string()) != 0);
}
