#include "fedtrident/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fedtrident/config.hpp"
#include "fedtrident/log.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fedtrident {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) {
  return v.has_value() ? fmt(*v) : "";
}

std::string opt_int(const std::optional<int>& v) {
  return v.has_value() ? std::to_string(*v) : "";
}

std::string opt_flag(const std::optional<bool>& v) {
  if (!v.has_value()) return "";
  return *v ? "1" : "0";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

class FileTrajectorySink : public TrajectorySink {
 public:
  explicit FileTrajectorySink(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  void record(int round, int client_id, const ModelParams& delta) override {
    std::ostringstream name;
    name << "r" << round << "_c" << client_id << ".bin";
    save_params(delta, (dir_ / name.str()).string());
  }

 private:
  fs::path dir_;
};

json summary_json(const RunSummary& s) {
  json j;
  j["config"] = json::object();
  // echo the config as the same key/value pairs the parser accepts
  std::istringstream text(config_to_text(s.config));
  std::string line;
  while (std::getline(text, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq - 1);
    std::string value = line.substr(eq + 2);
    j["config"][key] = value;
  }
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v.has_value())
      j["final"][key] = *v;
    else
      j["final"][key] = nullptr;
  };
  put("sre", s.final_sre);
  put("asr", s.final_asr);
  put("gac", s.final_gac);
  put("gas", s.final_gas);
  j["blacklist"] = json::array();
  for (const auto& [id, round] : s.blacklist)
    j["blacklist"].push_back({{"client", id}, {"round", round}});
  j["detection"]["precision"] = s.detection.precision;
  j["detection"]["recall"] = s.detection.recall;
  j["detection"]["precision_rounds"] = s.detection.precision_rounds;
  j["detection"]["recall_rounds"] = s.detection.recall_rounds;
  j["wall_seconds"] = s.wall_seconds;
  return j;
}

}  // namespace

RunSummary summarize(const ExperimentConfig& config, const RunResult& result) {
  RunSummary s;
  s.config = config;
  if (!result.rounds.empty()) {
    const RoundMetrics& last = result.rounds.back();
    s.final_sre = last.sre;
    s.final_asr = last.asr;
    s.final_gac = last.gac;
    s.final_gas = last.gas;
  }
  for (const auto& [id, round] : result.blacklist_rounds)
    s.blacklist.emplace_back(id, round);
  s.detection = result.detection_quality();
  s.wall_seconds = result.wall_seconds;
  return s;
}

std::string rounds_csv(const std::vector<RoundMetrics>& rounds) {
  std::ostringstream out;
  out << "round,sre,asr,gac,gas,num_bad,blacklist_size,detected_f,detected_g,"
         "revert,ambiguous\n";
  for (const auto& r : rounds) {
    out << r.round << ',' << opt_num(r.sre) << ',' << opt_num(r.asr) << ','
        << opt_num(r.gac) << ',' << opt_num(r.gas) << ',' << r.num_bad << ','
        << r.blacklist_size << ',' << opt_int(r.detected_f) << ','
        << opt_int(r.detected_g) << ',' << opt_flag(r.reverted) << ','
        << opt_flag(r.ambiguous) << '\n';
  }
  return out.str();
}

std::string detection_csv(const std::vector<RoundMetrics>& rounds) {
  std::ostringstream out;
  out << "round,detected_f,detected_g,ambiguous,bad_ids,density_ratio,revert\n";
  for (const auto& r : rounds) {
    out << r.round << ',' << opt_int(r.detected_f) << ','
        << opt_int(r.detected_g) << ',' << opt_flag(r.ambiguous) << ',';
    for (std::size_t i = 0; i < r.bad_ids.size(); ++i) {
      if (i > 0) out << ';';
      out << r.bad_ids[i];
    }
    out << ',' << opt_num(r.density_ratio) << ',' << opt_flag(r.reverted) << '\n';
  }
  return out.str();
}

int run_to_directory(const ExperimentConfig& config, const std::string& out_dir,
                     bool dump_trajectory) {
  try {
    fs::path dir(out_dir);
    fs::create_directories(dir);

    std::unique_ptr<FileTrajectorySink> sink;
    if (dump_trajectory)
      sink = std::make_unique<FileTrajectorySink>(dir / "trajectory");

    log_info("running " + defense_name(config.defense) + " for " +
             std::to_string(config.rounds) + " rounds");
    RunResult result = run_experiment(config, sink.get());
    RunSummary summary = summarize(config, result);

    write_file(dir / "rounds.csv", rounds_csv(result.rounds));
    write_file(dir / "detection.csv", detection_csv(result.rounds));
    write_file(dir / "summary.json", summary_json(summary).dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

namespace {

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const std::string& value) {
  ExperimentConfig cfg = base;
  if (axis == "malicious_fraction") {
    cfg.malicious_fraction = std::stod(value);
  } else if (axis == "alpha") {
    cfg.dirichlet_alpha = std::stod(value);
  } else if (axis == "defense") {
    auto d = defense_from_name(value);
    if (!d.has_value()) throw std::invalid_argument("sweep: unknown defense '" + value + "'");
    cfg.defense = *d;
  } else {
    throw std::invalid_argument(
        "sweep: unknown axis '" + axis +
        "' (valid: malicious_fraction, alpha, defense)");
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int sweep_to_directory(const ExperimentConfig& base, const std::string& axis,
                       const std::vector<std::string>& values,
                       const std::string& out_dir, bool parallel) {
  try {
    if (values.empty()) throw std::invalid_argument("sweep: no values given");
    fs::path dir(out_dir);
    fs::create_directories(dir);

    struct Entry {
      std::string value;
      ExperimentConfig cfg;
      RunResult result;
    };
    std::vector<Entry> entries;
    for (const auto& v : values)
      entries.push_back(Entry{v, apply_axis(base, axis, v), {}});

    auto run_one = [&](Entry& e) {
      log_info("sweep " + axis + " = " + e.value);
      e.result = run_experiment(e.cfg);
      RunSummary summary = summarize(e.cfg, e.result);
      fs::path sub = dir / (axis + "_" + e.value);
      fs::create_directories(sub);
      write_file(sub / "rounds.csv", rounds_csv(e.result.rounds));
      write_file(sub / "detection.csv", detection_csv(e.result.rounds));
      write_file(sub / "summary.json", summary_json(summary).dump(2) + "\n");
    };

    if (parallel) {
      std::vector<std::future<void>> futures;
      futures.reserve(entries.size());
      for (auto& e : entries)
        futures.push_back(std::async(std::launch::async, [&run_one, &e] { run_one(e); }));
      for (auto& f : futures) f.get();
    } else {
      for (auto& e : entries) run_one(e);
    }

    std::ostringstream csv;
    csv << "axis,value,sre,asr,gac,gas,blacklist_size,precision,recall\n";
    for (const auto& e : entries) {
      std::optional<double> fsre, fasr, fgac, fgas;
      int blacklist_size = 0;
      if (!e.result.rounds.empty()) {
        const auto& last = e.result.rounds.back();
        fsre = last.sre;
        fasr = last.asr;
        fgac = last.gac;
        fgas = last.gas;
        blacklist_size = last.blacklist_size;
      }
      DetectionQuality q = e.result.detection_quality();
      csv << axis << ',' << e.value << ',' << opt_num(fsre) << ',' << opt_num(fasr)
          << ',' << opt_num(fgac) << ',' << opt_num(fgas) << ',' << blacklist_size
          << ',' << fmt(q.precision) << ',' << fmt(q.recall) << '\n';
    }
    write_file(dir / "sweep.csv", csv.str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace fedtrident
