#pragma once

// Per-example learning dynamics.
//
// An example's FkL epoch is the first epoch t at which it has been predicted
// as its given label for k consecutive epochs (t-k+1, ..., t). The tracker
// computes it online from one correctness bit per example per epoch.

#include <cstddef>
#include <cstdint>
#include <string>
#include <optional>
#include <span>
#include <vector>

#include "latestop/data.hpp"

namespace latestop {

struct FklRecord {
  int k = 1;
  std::vector<ExampleId> ids;
  std::vector<std::optional<int>> fkl;  // aligned with ids

  std::size_t num_set() const noexcept;
};

// Consecutive-correct run length per tracked example, aligned with ids.
struct RunCounters {
  std::vector<int> run_length;
};

class FklTracker {
 public:
  // Epochs before `first_epoch` are never observed; their predictions do not
  // count towards a run.
  FklTracker(std::vector<ExampleId> ids, int k, int first_epoch = 1);

  // `correct[j]` is acc for ids()[j] at `epoch`, which must be last_epoch()+1.
  // Returns ids that reached FkL at this epoch, ascending.
  std::vector<ExampleId> update_epoch(int epoch, std::span<const std::uint8_t> correct);

  const std::vector<ExampleId>& ids() const noexcept { return record_.ids; }
  const FklRecord& record() const noexcept { return record_; }
  const RunCounters& counters() const noexcept { return counters_; }
  int last_epoch() const noexcept { return last_epoch_; }
  int k() const noexcept { return record_.k; }
  // S_F: number of examples whose FkL is set.
  std::size_t num_learned() const noexcept { return learned_.size(); }
  // Examples with FkL set, ascending by (FkL, id).
  const std::vector<ExampleId>& learned_in_order() const noexcept { return learned_; }

 private:
  FklRecord record_;
  RunCounters counters_;
  std::vector<ExampleId> learned_;
  int last_epoch_;
};

// Per-epoch correctness bits and losses, aligned with ids; epochs are 1-based
// and contiguous.
class PredictionLog {
 public:
  explicit PredictionLog(std::vector<ExampleId> ids = {}) : ids_(std::move(ids)) {}

  void append(std::span<const std::uint8_t> correct, std::span<const double> loss);

  const std::vector<ExampleId>& ids() const noexcept { return ids_; }
  std::size_t num_epochs() const noexcept { return correct_.size(); }
  // epoch is 1-based
  std::span<const std::uint8_t> correct(std::size_t epoch) const { return correct_.at(epoch - 1); }
  std::span<const double> loss(std::size_t epoch) const { return loss_.at(epoch - 1); }

 private:
  std::vector<ExampleId> ids_;
  std::vector<std::vector<std::uint8_t>> correct_;
  std::vector<std::vector<double>> loss_;
};

enum class Criterion { fkl, loss };

const char* to_string(Criterion c) noexcept;
Criterion parse_criterion(const std::string& s);

struct Ranking {
  Criterion criterion = Criterion::fkl;
  // Most trustworthy first.
  std::vector<ExampleId> ids;
};

// Ascending FkL; unset FkL after every set value; ties by ascending id.
Ranking rank_by_fkl(const FklRecord& record);

// Mean loss over the final `window` epochs, per id, aligned with log.ids().
std::vector<double> trailing_mean_loss(const PredictionLog& log, std::size_t window);
// Ascending trailing mean loss; ties by ascending id.
Ranking rank_by_loss(const PredictionLog& log, std::size_t window);
Ranking rank_by_values(std::span<const ExampleId> ids, std::span<const double> values, Criterion criterion);

// Ids at rank positions [lo, hi).
std::vector<ExampleId> slice_precision_inputs(const Ranking& ranking, std::size_t lo, std::size_t hi);

}  // namespace latestop
