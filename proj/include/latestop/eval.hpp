#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "latestop/data.hpp"
#include "latestop/late_stopping.hpp"
#include "latestop/tracker.hpp"

namespace latestop {

enum class PrecisionMode { clean_head, mislabeled_tail };

const char* to_string(PrecisionMode m) noexcept;

struct RankRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

struct PrecisionRow {
  RankRange range;
  double precision = 0.0;
};

struct PrecisionTable {
  Criterion criterion = Criterion::fkl;
  PrecisionMode mode = PrecisionMode::clean_head;
  std::vector<PrecisionRow> rows;
};

// Head slices [0, j*N/10) for j = 1..10.
std::vector<RankRange> decile_head_ranges(std::size_t n);
// Tail slices [j*N/10, N) for j = 0..9.
std::vector<RankRange> decile_tail_ranges(std::size_t n);
// Deciles, or the 0-10k/0-15k/0-25k and 30k-45k/35k-45k/40k-45k cuts when n == 45000.
std::vector<RankRange> default_ranges(std::size_t n, PrecisionMode mode);

// clean_head: fraction of truly clean ids in each range; mislabeled_tail:
// fraction of truly mislabeled ids.
PrecisionTable label_precision(const Ranking& ranking, const Dataset& truth, std::span<const RankRange> ranges,
                               PrecisionMode mode);

struct RetentionReport {
  std::size_t total_clean = 0;
  std::size_t total_mislabeled = 0;
  std::size_t clean_kept = 0;
  std::size_t mislabeled_kept = 0;
  std::size_t clean_removed = 0;
  std::size_t mislabeled_removed = 0;
};

RetentionReport retention(std::span<const ExampleId> kept, const Dataset& original);
RetentionReport retention(const RunResult& run, const Dataset& original);

// Noise rate of D_i for every iteration.
std::vector<double> noise_curve(const RunResult& run, const Dataset& original);
void annotate_noise(RunResult& run, const Dataset& original);
double noise_rate_of(std::span<const ExampleId> ids, const Dataset& original);

// Kept ids whose given label differs from the ground truth.
std::vector<ExampleId> falsely_retained(std::span<const ExampleId> kept, const Dataset& original);
// Copy of ds with the given ids relabeled to their ground truth.
Dataset fix_labels(const Dataset& ds, std::span<const ExampleId> ids);

struct RankShiftEntry {
  ExampleId id = 0;
  std::size_t fkl_rank_before = 0;
  std::size_t fkl_rank_after = 0;
  std::size_t loss_rank_before = 0;
  std::size_t loss_rank_after = 0;
};

struct RankShiftReport {
  std::vector<RankShiftEntry> entries;
  double avg_fkl_before = 0.0;
  double avg_fkl_after = 0.0;
  double avg_loss_before = 0.0;
  double avg_loss_after = 0.0;
  double fkl_change_percent = 0.0;
  double loss_change_percent = 0.0;
};

// Rank positions under the first-iteration rankings, which cover the full
// original training set.
RankShiftReport rank_shift(const RunResult& before, const RunResult& after, std::span<const ExampleId> ids);
RankShiftReport rank_shift(const Ranking& fkl_before, const Ranking& loss_before, const Ranking& fkl_after,
                           const Ranking& loss_after, std::span<const ExampleId> ids);

double test_accuracy(const Parameters& params, const Dataset& test);
// [reference][predicted] counts.
std::vector<std::vector<std::size_t>> confusion_matrix(const Parameters& params, const Dataset& test);

struct SweepRow {
  double m_percent = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t kept = 0;
  std::optional<double> final_noise_rate;
  std::optional<double> test_accuracy;
  std::optional<double> retrain_test_accuracy;
};

// One run per (m, seed); seeds are shared across m values. Runs execute on
// up to `threads` worker threads; rows come back in (m, seed) order.
std::vector<SweepRow> m_sweep(const LateStopConfig& base, std::span<const double> m_values,
                              std::span<const std::uint64_t> seeds, const Dataset& train, const Dataset* test,
                              unsigned threads = 1);

}  // namespace latestop
