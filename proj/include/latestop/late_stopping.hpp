#pragma once

// Iterative sample selection by First-time k-epoch Learning.
//
// Each iteration trains a freshly initialized classifier on the current
// training set and collects examples as they reach FkL. The iteration halts
// once more than (1 - m%) of the previous FkL-set size has been collected,
// and the collected set becomes the next training set. The outer loop stops
// once m * i exceeds the noise rate n (or, in noise-target mode, once the
// planned cumulative removal covers the requested noise reduction).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latestop/data.hpp"
#include "latestop/nncore.hpp"
#include "latestop/tracker.hpp"

namespace latestop {

struct TrainerConfig {
  std::vector<std::size_t> hidden_widths{64, 64};
  Activation activation = Activation::relu;
  double learning_rate = 0.02;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t batch_size = 128;
  // Step decay: lr * factor^floor((epoch-1)/every). 0 disables.
  int lr_decay_every = 0;
  double lr_decay_factor = 0.1;

  void validate() const;
  NetworkSpec network_for(std::size_t input_width, int num_classes) const;
  double learning_rate_at(int epoch) const;
};

enum class OuterStop { budget, noise_target };

OuterStop parse_outer_stop(const std::string& s);
const char* to_string(OuterStop s) noexcept;

struct LateStopConfig {
  double m_percent = 10.0;
  double n_percent = 40.0;
  int k = 3;
  int t_max = 200;
  int i_max = 100;
  int warmup_epochs = 5;
  OuterStop outer_stop = OuterStop::budget;
  double noise_target_percent = 20.0;
  bool strict_comparison = true;
  TrainerConfig trainer;
  std::uint64_t master_seed = 0;
  // Train a fresh classifier on the final kept set after the loop.
  bool retrain_final = false;
  // Epochs for the final retrain; 0 means t_max.
  int retrain_epochs = 0;
  // Epochs averaged by the loss criterion; 0 means min(k, epochs trained).
  std::size_t loss_window = 0;
  // Noisy validation fraction split off by callers before run().
  double holdout_fraction = 0.1;
  bool keep_logs = true;

  void validate() const;
};

enum class HaltReason { threshold, t_max_exhausted };
enum class StopReason { outer_condition, i_max_reached };

const char* to_string(HaltReason r) noexcept;
const char* to_string(StopReason r) noexcept;

struct IterationResult {
  int iteration = 0;
  std::vector<ExampleId> training_ids;  // D_i
  std::vector<ExampleId> fkl_ids;       // D_{F_i}, ascending by (FkL, id)
  std::size_t size = 0;                 // S_{F_i}
  std::size_t previous_size = 0;        // S_{F_{i-1}}
  int epochs_trained = 0;
  HaltReason halt_reason = HaltReason::threshold;
  std::optional<double> noise_rate;     // filled by evaluation when truth is known
  std::vector<double> train_loss;       // mean minibatch loss per epoch
  std::vector<double> train_accuracy;   // on D_i given labels, per epoch
  std::vector<double> test_accuracy;    // per epoch, when a test set is supplied
  FklRecord fkl;                        // aligned with training_ids
  std::vector<double> loss_snapshot;    // trailing mean loss, aligned with training_ids
  std::size_t loss_window = 0;
  std::optional<PredictionLog> log;

  Ranking fkl_ranking() const { return rank_by_fkl(fkl); }
  Ranking loss_ranking() const { return rank_by_values(training_ids, loss_snapshot, Criterion::loss); }
};

struct RunResult {
  std::vector<IterationResult> iterations;
  std::vector<ExampleId> kept;                       // ascending id
  std::vector<std::pair<ExampleId, int>> removed;    // (id, iteration), ascending id
  NetworkSpec network;
  Parameters final_params;                           // f_i of the last iteration
  StopReason stop_reason = StopReason::outer_condition;
  std::optional<Parameters> retrained_params;
  std::vector<double> retrain_test_accuracy;
};

// True iff S_Fi > S_Fi_prev * (1 - m/100).
bool inner_halt(std::size_t s_fi, std::size_t s_fi_prev, double m_percent);

// budget: m*i > n (>= when !strict). noise_target: 1 - (1 - m/100)^i >= (n - target)/100.
bool outer_stop(int i, double m_percent, double n_percent, OuterStop mode, bool strict,
                double noise_target_percent = 0.0);

std::uint64_t derive_iteration_seed(std::uint64_t master_seed, std::uint64_t iteration);

struct TrainedModel {
  Parameters params;
  std::vector<double> train_loss;
  std::vector<double> train_accuracy;
  std::vector<double> test_accuracy;
};

// Plain cross-entropy training for a fixed number of epochs.
TrainedModel train_classifier(const TrainerConfig& trainer, const TrainingSet& train, int epochs,
                              std::uint64_t seed, const Dataset* test = nullptr);

RunResult run(const LateStopConfig& config, const TrainingSet& train, const Dataset* test = nullptr);

}  // namespace latestop
