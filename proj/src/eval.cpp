#include "latestop/eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "latestop/errors.hpp"
#include "latestop/noise.hpp"

namespace latestop {

namespace {

std::unordered_map<ExampleId, bool> clean_lookup(const Dataset& ds) {
  if (!ds.clean_labels) throw EvaluationError("evaluation needs ground-truth clean labels");
  std::unordered_map<ExampleId, bool> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.emplace(ds.ids[i], ds.given_labels[i] == (*ds.clean_labels)[i]);
  return out;
}

std::unordered_map<ExampleId, std::size_t> positions(const Ranking& r) {
  std::unordered_map<ExampleId, std::size_t> pos;
  pos.reserve(r.ids.size());
  for (std::size_t i = 0; i < r.ids.size(); ++i) pos.emplace(r.ids[i], i);
  return pos;
}

double mean_of(const std::vector<RankShiftEntry>& e, std::size_t RankShiftEntry::*field) {
  if (e.empty()) return 0.0;
  double s = 0.0;
  for (const auto& x : e) s += static_cast<double>(x.*field);
  return s / static_cast<double>(e.size());
}

double change_percent(double before, double after) { return before == 0.0 ? 0.0 : (after - before) / before * 100.0; }

}  // namespace

const char* to_string(PrecisionMode m) noexcept {
  return m == PrecisionMode::clean_head ? "clean_head" : "mislabeled_tail";
}

std::vector<RankRange> decile_head_ranges(std::size_t n) {
  std::vector<RankRange> out;
  for (std::size_t j = 1; j <= 10; ++j) {
    const std::size_t hi = n * j / 10;
    if (hi > 0) out.push_back({0, hi});
  }
  return out;
}

std::vector<RankRange> decile_tail_ranges(std::size_t n) {
  std::vector<RankRange> out;
  for (std::size_t j = 0; j < 10; ++j) {
    const std::size_t lo = n * j / 10;
    if (lo < n) out.push_back({lo, n});
  }
  return out;
}

std::vector<RankRange> default_ranges(std::size_t n, PrecisionMode mode) {
  if (n == 45000) {
    if (mode == PrecisionMode::clean_head) return {{0, 10000}, {0, 15000}, {0, 25000}};
    return {{30000, 45000}, {35000, 45000}, {40000, 45000}};
  }
  return mode == PrecisionMode::clean_head ? decile_head_ranges(n) : decile_tail_ranges(n);
}

PrecisionTable label_precision(const Ranking& ranking, const Dataset& truth, std::span<const RankRange> ranges,
                               PrecisionMode mode) {
  const auto is_clean = clean_lookup(truth);
  PrecisionTable table{ranking.criterion, mode, {}};
  for (const auto& range : ranges) {
    const auto ids = slice_precision_inputs(ranking, range.lo, range.hi);
    std::size_t hits = 0;
    for (ExampleId id : ids) {
      auto it = is_clean.find(id);
      if (it == is_clean.end()) throw EvaluationError("ranked id " + std::to_string(id) + " missing from truth set");
      const bool want_clean = mode == PrecisionMode::clean_head;
      hits += it->second == want_clean ? 1 : 0;
    }
    table.rows.push_back({range, static_cast<double>(hits) / static_cast<double>(ids.size())});
  }
  return table;
}

RetentionReport retention(std::span<const ExampleId> kept, const Dataset& original) {
  const auto is_clean = clean_lookup(original);
  RetentionReport r;
  for (const auto& [id, clean] : is_clean) (clean ? r.total_clean : r.total_mislabeled) += 1;
  for (ExampleId id : kept) {
    auto it = is_clean.find(id);
    if (it == is_clean.end()) throw EvaluationError("kept id " + std::to_string(id) + " not in original dataset");
    (it->second ? r.clean_kept : r.mislabeled_kept) += 1;
  }
  r.clean_removed = r.total_clean - r.clean_kept;
  r.mislabeled_removed = r.total_mislabeled - r.mislabeled_kept;
  return r;
}

RetentionReport retention(const RunResult& run, const Dataset& original) { return retention(run.kept, original); }

double noise_rate_of(std::span<const ExampleId> ids, const Dataset& original) {
  return measure_noise_rate(original.subset(ids));
}

std::vector<double> noise_curve(const RunResult& run, const Dataset& original) {
  if (!original.clean_labels) throw EvaluationError("noise curve needs ground-truth clean labels");
  std::vector<double> out;
  for (const auto& it : run.iterations) out.push_back(noise_rate_of(it.training_ids, original));
  return out;
}

void annotate_noise(RunResult& run, const Dataset& original) {
  const auto curve = noise_curve(run, original);
  for (std::size_t i = 0; i < curve.size(); ++i) run.iterations[i].noise_rate = curve[i];
}

std::vector<ExampleId> falsely_retained(std::span<const ExampleId> kept, const Dataset& original) {
  const auto is_clean = clean_lookup(original);
  std::vector<ExampleId> out;
  for (ExampleId id : kept) {
    auto it = is_clean.find(id);
    if (it == is_clean.end()) throw EvaluationError("kept id " + std::to_string(id) + " not in original dataset");
    if (!it->second) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset fix_labels(const Dataset& ds, std::span<const ExampleId> ids) {
  if (!ds.clean_labels) throw EvaluationError("fixing labels needs ground-truth clean labels");
  Dataset out = ds;
  const auto idx = ds.index();
  for (ExampleId id : ids) {
    auto it = idx.find(id);
    if (it == idx.end()) throw InputError("unknown example id " + std::to_string(id));
    out.given_labels[it->second] = (*ds.clean_labels)[it->second];
  }
  return out;
}

RankShiftReport rank_shift(const Ranking& fkl_before, const Ranking& loss_before, const Ranking& fkl_after,
                           const Ranking& loss_after, std::span<const ExampleId> ids) {
  const auto fb = positions(fkl_before);
  const auto lb = positions(loss_before);
  const auto fa = positions(fkl_after);
  const auto la = positions(loss_after);
  RankShiftReport r;
  for (ExampleId id : ids) {
    auto a = fb.find(id), b = lb.find(id), c = fa.find(id), d = la.find(id);
    if (a == fb.end() || b == lb.end() || c == fa.end() || d == la.end()) {
      throw InputError("id " + std::to_string(id) + " is not ranked in both runs");
    }
    r.entries.push_back({id, a->second, c->second, b->second, d->second});
  }
  r.avg_fkl_before = mean_of(r.entries, &RankShiftEntry::fkl_rank_before);
  r.avg_fkl_after = mean_of(r.entries, &RankShiftEntry::fkl_rank_after);
  r.avg_loss_before = mean_of(r.entries, &RankShiftEntry::loss_rank_before);
  r.avg_loss_after = mean_of(r.entries, &RankShiftEntry::loss_rank_after);
  r.fkl_change_percent = change_percent(r.avg_fkl_before, r.avg_fkl_after);
  r.loss_change_percent = change_percent(r.avg_loss_before, r.avg_loss_after);
  return r;
}

RankShiftReport rank_shift(const RunResult& before, const RunResult& after, std::span<const ExampleId> ids) {
  if (before.iterations.empty() || after.iterations.empty()) throw InputError("rank shift needs completed runs");
  const auto& b = before.iterations.front();
  const auto& a = after.iterations.front();
  return rank_shift(b.fkl_ranking(), b.loss_ranking(), a.fkl_ranking(), a.loss_ranking(), ids);
}

double test_accuracy(const Parameters& params, const Dataset& test) {
  if (test.size() == 0) return 0.0;
  return evaluate(params, test.features, test.reference_labels()).accuracy;
}

std::vector<std::vector<std::size_t>> confusion_matrix(const Parameters& params, const Dataset& test) {
  const auto c = params.num_classes();
  std::vector<std::vector<std::size_t>> m(c, std::vector<std::size_t>(c, 0));
  if (test.size() == 0) return m;
  const auto pred = predict(forward(params, test.features));
  const auto& ref = test.reference_labels();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++m[static_cast<std::size_t>(ref[i])][static_cast<std::size_t>(pred[i])];
  }
  return m;
}

std::vector<SweepRow> m_sweep(const LateStopConfig& base, std::span<const double> m_values,
                              std::span<const std::uint64_t> seeds, const Dataset& train, const Dataset* test,
                              unsigned threads) {
  struct Job {
    double m;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double m : m_values) {
    for (auto s : seeds) jobs.push_back({m, s});
  }
  for (const auto& j : jobs) {
    LateStopConfig c = base;
    c.m_percent = j.m;
    c.validate();
  }
  std::vector<SweepRow> rows(jobs.size());
  const TrainingSet view = train.training_view();
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t idx = next++; idx < jobs.size(); idx = next++) {
      try {
        LateStopConfig c = base;
        c.m_percent = jobs[idx].m;
        c.master_seed = jobs[idx].seed;
        c.keep_logs = false;
        const RunResult r = run(c, view, test);
        SweepRow row{jobs[idx].m, jobs[idx].seed, r.iterations.size(), r.kept.size(), {}, {}, {}};
        if (train.has_truth()) row.final_noise_rate = noise_rate_of(r.kept, train);
        if (test) {
          row.test_accuracy = test_accuracy(r.final_params, *test);
          if (r.retrained_params) row.retrain_test_accuracy = test_accuracy(*r.retrained_params, *test);
        }
        rows[idx] = row;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace latestop
