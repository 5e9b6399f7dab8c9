#pragma once

#include <string>
#include <vector>

#include "fedtrident/engine.hpp"

namespace fedtrident {

struct RunSummary {
  ExperimentConfig config;
  std::optional<double> final_sre, final_asr, final_gac, final_gas;
  std::vector<std::pair<int, int>> blacklist;  // (client id, exclusion round)
  DetectionQuality detection;
  double wall_seconds = 0.0;
};

RunSummary summarize(const ExperimentConfig& config, const RunResult& result);

// Executes the experiment and writes rounds.csv, detection.csv and
// summary.json into out_dir (created if missing). With dump_trajectory the
// per-round update deltas land under out_dir/trajectory/ in the ModelParams
// binary format. Returns a process exit status.
int run_to_directory(const ExperimentConfig& config, const std::string& out_dir,
                     bool dump_trajectory = false);

// One run per value of the axis (malicious_fraction | alpha | defense) with
// the base config's seed, each into out_dir/<axis>_<value>/, plus a combined
// sweep.csv of final metrics. `parallel` runs the entries concurrently; RNG
// streams are per-run so results do not change.
int sweep_to_directory(const ExperimentConfig& base, const std::string& axis,
                       const std::vector<std::string>& values,
                       const std::string& out_dir, bool parallel = false);

// rounds.csv rendering, exposed for tests.
std::string rounds_csv(const std::vector<RoundMetrics>& rounds);
std::string detection_csv(const std::vector<RoundMetrics>& rounds);

}  // namespace fedtrident
