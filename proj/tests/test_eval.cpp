#include <cmath>
#include <numeric>

#include "doctest.h"
#include "latestop/errors.hpp"
#include "latestop/eval.hpp"
#include "latestop/noise.hpp"
#include "support.hpp"

using namespace latestop;

namespace {

// 0..n-1 with every third id mislabeled.
Dataset labelled(std::size_t n, int classes = 3) {
  Dataset d;
  d.num_classes = classes;
  d.features = Matrix(n, 2, 0.0);
  std::vector<int> clean;
  for (std::size_t i = 0; i < n; ++i) {
    d.ids.push_back(static_cast<ExampleId>(i));
    const int y = static_cast<int>(i % static_cast<std::size_t>(classes));
    clean.push_back(y);
    d.given_labels.push_back(i % 3 == 0 ? (y + 1) % classes : y);
    d.features(i, 0) = static_cast<double>(y);
  }
  d.clean_labels = clean;
  return d;
}

Ranking oracle_ranking(const Dataset& d) {
  Ranking r{Criterion::fkl, {}};
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.given_labels[i] == (*d.clean_labels)[i]) r.ids.push_back(d.ids[i]);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.given_labels[i] != (*d.clean_labels)[i]) r.ids.push_back(d.ids[i]);
  return r;
}

// Network whose logits ignore the input and favour `cls`.
Parameters constant_predictor(std::size_t dim, int classes, int cls) {
  Parameters p;
  Layer l{Matrix(dim, static_cast<std::size_t>(classes), 0.0), std::vector<double>(static_cast<std::size_t>(classes), 0.0)};
  l.bias[static_cast<std::size_t>(cls)] = 1.0;
  p.layers.push_back(l);
  return p;
}

}  // namespace

TEST_CASE("oracle ranking has perfect precision everywhere") {
  const Dataset d = labelled(300);
  const Ranking r = oracle_ranking(d);
  // Clean fraction is 2/3, so the head cuts stay inside the clean block up to 200.
  std::vector<RankRange> head{{0, 100}, {0, 150}, {0, 200}};
  for (const auto& row : label_precision(r, d, head, PrecisionMode::clean_head).rows) CHECK(row.precision == 1.0);
  std::vector<RankRange> tail{{200, 300}, {250, 300}};
  for (const auto& row : label_precision(r, d, tail, PrecisionMode::mislabeled_tail).rows) CHECK(row.precision == 1.0);
}

TEST_CASE("full range equals the global clean fraction for any ranking") {
  const Dataset d = labelled(99);
  Ranking r = oracle_ranking(d);
  std::reverse(r.ids.begin(), r.ids.end());
  std::vector<RankRange> all{{0, 99}};
  CHECK(label_precision(r, d, all, PrecisionMode::clean_head).rows[0].precision == doctest::Approx(66.0 / 99.0));
  CHECK(label_precision(r, d, all, PrecisionMode::mislabeled_tail).rows[0].precision == doctest::Approx(33.0 / 99.0));
}

TEST_CASE("random ranking head precision is hypergeometric") {
  // N = 3000, 2000 clean; a random head of n = 500 has mean 2/3 and
  // sd = sqrt(p(1-p)/n * (N-n)/(N-1)).
  const Dataset d = labelled(3000);
  const double p = 2.0 / 3.0, n = 500.0, big_n = 3000.0;
  const double sd = std::sqrt(p * (1 - p) / n * (big_n - n) / (big_n - 1));
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Ranking r{Criterion::loss, d.ids};
    rng.shuffle(std::span<ExampleId>(r.ids));
    std::vector<RankRange> head{{0, 500}};
    const double prec = label_precision(r, d, head, PrecisionMode::clean_head).rows[0].precision;
    CHECK(std::abs(prec - p) < 3 * sd);
  }
}

TEST_CASE("default rank ranges") {
  const auto head = default_ranges(45000, PrecisionMode::clean_head);
  REQUIRE(head.size() == 3);
  CHECK(head[0].hi == 10000);
  CHECK(head[1].hi == 15000);
  CHECK(head[2].hi == 25000);
  const auto tail = default_ranges(45000, PrecisionMode::mislabeled_tail);
  REQUIRE(tail.size() == 3);
  CHECK(tail[0].lo == 30000);
  CHECK(tail[2].lo == 40000);
  CHECK(tail[2].hi == 45000);
  const auto dec = default_ranges(4500, PrecisionMode::clean_head);
  REQUIRE(dec.size() == 10);
  CHECK(dec[0].hi == 450);
  CHECK(dec[9].hi == 4500);
  const auto dtail = decile_tail_ranges(4500);
  CHECK(dtail[9].lo == 4050);
  CHECK(dtail[9].hi == 4500);
}

TEST_CASE("precision errors") {
  Dataset d = labelled(30);
  const Ranking r = oracle_ranking(d);
  std::vector<RankRange> bad{{10, 40}};
  CHECK_THROWS_AS(label_precision(r, d, bad, PrecisionMode::clean_head), InputError);
  d.clean_labels.reset();
  std::vector<RankRange> ok{{0, 10}};
  CHECK_THROWS_AS(label_precision(r, d, ok, PrecisionMode::clean_head), EvaluationError);
}

TEST_CASE("retention accounting") {
  const Dataset d = labelled(90);
  const RetentionReport all = retention(d.ids, d);
  CHECK(all.total_clean == 60);
  CHECK(all.clean_kept == 60);
  CHECK(all.mislabeled_kept == 30);
  std::vector<ExampleId> clean_only;
  for (std::size_t i = 0; i < 90; ++i)
    if (i % 3 != 0) clean_only.push_back(static_cast<ExampleId>(i));
  const RetentionReport oracle = retention(clean_only, d);
  CHECK(oracle.mislabeled_kept == 0);
  CHECK(oracle.clean_kept + oracle.clean_removed == oracle.total_clean);
  CHECK(oracle.mislabeled_removed == 30);
  CHECK(noise_rate_of(clean_only, d) == 0.0);
  CHECK(noise_rate_of(d.ids, d) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("falsely retained ids and label fixing") {
  const Dataset d = labelled(12);
  const std::vector<ExampleId> kept{0, 1, 3, 4, 9};
  CHECK(falsely_retained(kept, d) == std::vector<ExampleId>{0, 3, 9});
  const Dataset fixed = fix_labels(d, std::vector<ExampleId>{0, 3});
  CHECK(fixed.given_labels[0] == (*d.clean_labels)[0]);
  CHECK(fixed.given_labels[3] == (*d.clean_labels)[3]);
  CHECK(fixed.given_labels[6] == d.given_labels[6]);
  CHECK(fixed.clean_labels == d.clean_labels);
  CHECK_THROWS_AS(fix_labels(d, std::vector<ExampleId>{99}), InputError);
}

TEST_CASE("rank shift") {
  const Ranking f1{Criterion::fkl, {1, 2, 3, 4}}, l1{Criterion::loss, {4, 3, 2, 1}};
  const Ranking f2{Criterion::fkl, {2, 3, 4, 1}}, l2{Criterion::loss, {4, 3, 2, 1}};
  CHECK(rank_shift(f1, l1, f2, l2, std::vector<ExampleId>{}).entries.empty());
  const RankShiftReport same = rank_shift(f1, l1, f1, l1, std::vector<ExampleId>{1, 3});
  CHECK(same.avg_fkl_before == same.avg_fkl_after);
  CHECK(same.fkl_change_percent == 0.0);
  const RankShiftReport r = rank_shift(f1, l1, f2, l2, std::vector<ExampleId>{1, 2});
  // id 1: 0 -> 3, id 2: 1 -> 0.
  CHECK(r.avg_fkl_before == 0.5);
  CHECK(r.avg_fkl_after == 1.5);
  CHECK(r.fkl_change_percent == doctest::Approx(200.0));
  CHECK(r.avg_loss_before == r.avg_loss_after);
  CHECK_THROWS_AS(rank_shift(f1, l1, f2, l2, std::vector<ExampleId>{7}), InputError);
}

TEST_CASE("test accuracy and confusion matrix") {
  const Dataset d = labelled(120, 4);
  const Parameters p = constant_predictor(2, 4, 2);
  CHECK(test_accuracy(p, d) == doctest::Approx(0.25));
  const auto cm = confusion_matrix(p, d);
  std::size_t total = 0, trace = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) total += cm[i][j];
    trace += cm[i][i];
    CHECK(cm[i][2] == 30);
  }
  CHECK(total == 120);
  CHECK(static_cast<double>(trace) / 120.0 == test_accuracy(p, d));
}

TEST_CASE("noise curve and sweep") {
  SyntheticSpec s;
  s.num_classes = 3;
  s.examples_per_class = 60;
  s.feature_dim = 4;
  s.seed = 2;
  const Dataset clean = generate_synthetic(s);
  auto [noisy, rep] = inject_symmetric(clean, {NoiseKind::symmetric, 0.3, 5});
  LateStopConfig c;
  c.trainer.hidden_widths = {16};
  c.t_max = 40;
  c.n_percent = 30;

  const RunResult r = run(c, noisy.training_view());
  const auto curve = noise_curve(r, noisy);
  REQUIRE(curve.size() == r.iterations.size());
  CHECK(curve[0] == doctest::Approx(rep.realized_rate));
  for (std::size_t i = 0; i < curve.size(); ++i)
    CHECK(curve[i] == doctest::Approx(noise_rate_of(r.iterations[i].training_ids, noisy)));
  const RunResult rc = run(c, clean.training_view());
  for (double v : noise_curve(rc, clean)) CHECK(v == 0.0);

  const std::vector<double> ms{10.0, 5.0};
  const std::vector<std::uint64_t> seeds{0, 1};
  const auto rows = m_sweep(c, ms, seeds, noisy, &clean, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].m_percent == 10.0);
  CHECK(rows[1].seed == 1);
  CHECK(rows[2].m_percent == 5.0);
  const auto serial = m_sweep(c, ms, seeds, noisy, &clean, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].kept == serial[i].kept);
    CHECK(rows[i].final_noise_rate == serial[i].final_noise_rate);
    CHECK(rows[i].test_accuracy == serial[i].test_accuracy);
  }
  // A singleton sweep equals a direct run.
  const std::vector<double> one_m{10.0};
  const std::vector<std::uint64_t> one_seed{0};
  const auto single = m_sweep(c, one_m, one_seed, noisy, nullptr, 1);
  CHECK(single[0].kept == r.kept.size());
  CHECK(single[0].iterations == r.iterations.size());
  CHECK(*single[0].final_noise_rate == doctest::Approx(noise_rate_of(r.kept, noisy)));

  const std::vector<double> bad_m{0.0};
  CHECK_THROWS_AS(m_sweep(c, bad_m, one_seed, noisy, nullptr, 1), ConfigError);
}
