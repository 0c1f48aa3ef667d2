#pragma once

// Run-directory persistence.
//
//   run.json                 manifest: config snapshot + hash, seeds, versions,
//                            dataset fingerprint, noise report, timestamps
//   result.json              deterministic run summary
//   iter_<i>/epochs.csv      epoch,id,correct,loss
//   iter_<i>/fkl.csv         id,fkl (empty when unset); rows cover D_i
//   iter_<i>/summary.json    per-iteration sizes, halt reason, curves
//   kept.txt                 one id per line, ascending
//   removed.csv              id,iteration
//   final_model.bin          16-byte header (magic, version, count) + float64 LE
//   train.csv / holdout.csv / test.csv   datasets the run used
//   retrained_model.bin      when the final retrain is enabled

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latestop/config.hpp"
#include "latestop/data.hpp"
#include "latestop/late_stopping.hpp"
#include "latestop/noise.hpp"
#include "latestop/tracker.hpp"

namespace latestop {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct RunManifest {
  Json config;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::string dataset_fingerprint;
  std::optional<NoiseReport> noise_report;
  std::string started_at;
  std::string finished_at;
  Json network;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
  // Recomputes the hash over the stored snapshot.
  bool hash_matches() const;
};

struct RunInputs {
  Dataset train;
  Dataset holdout;
  std::optional<Dataset> test;
};

Json iteration_summary(const IterationResult& it);
Json result_summary(const RunResult& run, const RunInputs& inputs);

void write_run_dir(const std::filesystem::path& dir, const RunManifest& manifest, const RunResult& run,
                   const RunInputs& inputs);

// Binary parameter dump.
void write_model(const std::filesystem::path& path, const Parameters& params);
std::vector<double> read_model_values(const std::filesystem::path& path);
Parameters read_model(const std::filesystem::path& path, const NetworkSpec& spec);

void write_fkl_csv(const std::filesystem::path& path, const FklRecord& record);
FklRecord read_fkl_csv(const std::filesystem::path& path, int k);
void write_epochs_csv(const std::filesystem::path& path, const PredictionLog& log);
PredictionLog read_epochs_csv(const std::filesystem::path& path);
void write_ranking_csv(std::ostream& out, const Ranking& r);

std::vector<ExampleId> read_id_list(const std::filesystem::path& path);
std::vector<std::pair<ExampleId, int>> read_removed_csv(const std::filesystem::path& path);

// Reads a finished run directory back.
struct LoadedRun {
  RunManifest manifest;
  LateStopConfig config;
  NetworkSpec network;
  Json result;
  std::vector<Json> iteration_summaries;
  std::vector<ExampleId> kept;
  std::vector<std::pair<ExampleId, int>> removed;
  Dataset train;
  std::optional<Dataset> holdout;
  std::optional<Dataset> test;

  std::size_t num_iterations() const { return iteration_summaries.size(); }
  std::filesystem::path iteration_dir(int i) const;
  std::filesystem::path dir;

  FklRecord fkl_record(int iteration) const;
  Ranking ranking(int iteration, Criterion criterion) const;
  // Ids of D_i, in the order stored in fkl.csv.
  std::vector<ExampleId> training_ids(int iteration) const;
  Parameters final_params() const;
};

LoadedRun load_run_dir(const std::filesystem::path& dir);

NetworkSpec network_from_json(const Json& j);
Json network_to_json(const NetworkSpec& spec);

std::string utc_timestamp();

}  // namespace latestop
