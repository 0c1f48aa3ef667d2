#include "latestop/tracker.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "latestop/errors.hpp"

namespace latestop {

std::size_t FklRecord::num_set() const noexcept {
  return static_cast<std::size_t>(std::count_if(fkl.begin(), fkl.end(), [](const auto& v) { return v.has_value(); }));
}

FklTracker::FklTracker(std::vector<ExampleId> ids, int k, int first_epoch) : last_epoch_(first_epoch - 1) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (first_epoch < 1) throw ConfigError("first tracked epoch must be >= 1");
  record_.k = k;
  record_.fkl.assign(ids.size(), std::nullopt);
  counters_.run_length.assign(ids.size(), 0);
  record_.ids = std::move(ids);
}

std::vector<ExampleId> FklTracker::update_epoch(int epoch, std::span<const std::uint8_t> correct) {
  if (epoch != last_epoch_ + 1) {
    throw InternalError("tracker expected epoch " + std::to_string(last_epoch_ + 1) + ", got " +
                        std::to_string(epoch));
  }
  if (correct.size() != record_.ids.size()) {
    throw InternalError("tracker got " + std::to_string(correct.size()) + " predictions for " +
                        std::to_string(record_.ids.size()) + " tracked examples");
  }
  last_epoch_ = epoch;
  std::vector<ExampleId> newly;
  auto& runs = counters_.run_length;
  for (std::size_t j = 0; j < correct.size(); ++j) {
    runs[j] = correct[j] ? runs[j] + 1 : 0;
    if (runs[j] >= record_.k && !record_.fkl[j]) {
      record_.fkl[j] = epoch;
      newly.push_back(record_.ids[j]);
    }
  }
  std::sort(newly.begin(), newly.end());
  learned_.insert(learned_.end(), newly.begin(), newly.end());
  return newly;
}

void PredictionLog::append(std::span<const std::uint8_t> correct, std::span<const double> loss) {
  if (correct.size() != ids_.size() || loss.size() != ids_.size()) {
    throw InternalError("prediction log row does not cover every tracked example");
  }
  correct_.emplace_back(correct.begin(), correct.end());
  loss_.emplace_back(loss.begin(), loss.end());
}

const char* to_string(Criterion c) noexcept { return c == Criterion::fkl ? "fkl" : "loss"; }

Criterion parse_criterion(const std::string& s) {
  if (s == "fkl") return Criterion::fkl;
  if (s == "loss") return Criterion::loss;
  throw ConfigError("unknown criterion '" + s + "' (expected fkl or loss)");
}

Ranking rank_by_fkl(const FklRecord& record) {
  std::vector<std::size_t> order(record.ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& fa = record.fkl[a];
    const auto& fb = record.fkl[b];
    if (fa.has_value() != fb.has_value()) return fa.has_value();
    if (fa && *fa != *fb) return *fa < *fb;
    return record.ids[a] < record.ids[b];
  });
  Ranking r{Criterion::fkl, {}};
  r.ids.reserve(order.size());
  for (auto i : order) r.ids.push_back(record.ids[i]);
  return r;
}

std::vector<double> trailing_mean_loss(const PredictionLog& log, std::size_t window) {
  if (window == 0) throw ConfigError("loss window must be >= 1");
  if (log.num_epochs() < window) {
    throw ConfigError("loss window " + std::to_string(window) + " exceeds " + std::to_string(log.num_epochs()) +
                      " logged epochs");
  }
  std::vector<double> mean(log.ids().size(), 0.0);
  for (std::size_t e = log.num_epochs() - window + 1; e <= log.num_epochs(); ++e) {
    auto l = log.loss(e);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += l[j];
  }
  for (double& v : mean) v /= static_cast<double>(window);
  return mean;
}

Ranking rank_by_values(std::span<const ExampleId> ids, std::span<const double> values, Criterion criterion) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return ids[a] < ids[b];
  });
  Ranking r{criterion, {}};
  r.ids.reserve(order.size());
  for (auto i : order) r.ids.push_back(ids[i]);
  return r;
}

Ranking rank_by_loss(const PredictionLog& log, std::size_t window) {
  const auto mean = trailing_mean_loss(log, window);
  return rank_by_values(log.ids(), mean, Criterion::loss);
}

std::vector<ExampleId> slice_precision_inputs(const Ranking& ranking, std::size_t lo, std::size_t hi) {
  if (!(lo < hi && hi <= ranking.ids.size())) {
    throw InputError("rank range [" + std::to_string(lo) + ", " + std::to_string(hi) + ") invalid for " +
                     std::to_string(ranking.ids.size()) + " ranked examples");
  }
  return {ranking.ids.begin() + static_cast<std::ptrdiff_t>(lo), ranking.ids.begin() + static_cast<std::ptrdiff_t>(hi)};
}

}  // namespace latestop
