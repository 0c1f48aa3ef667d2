#include <numeric>

#include "doctest.h"
#include "latestop/errors.hpp"
#include "latestop/tracker.hpp"
#include "support.hpp"

using namespace latestop;

namespace {

using Bits = std::vector<std::vector<std::uint8_t>>;

Bits random_bits(std::size_t epochs, std::size_t n, double p, Rng& rng) {
  Bits b(epochs, std::vector<std::uint8_t>(n));
  for (auto& row : b)
    for (auto& v : row) v = rng.bernoulli(p);
  return b;
}

FklTracker replay(const Bits& b, int k, int first_epoch, std::vector<ExampleId> ids) {
  FklTracker t(std::move(ids), k, first_epoch);
  for (int e = first_epoch; e <= static_cast<int>(b.size()); ++e) t.update_epoch(e, b[e - 1]);
  return t;
}

std::vector<ExampleId> iota_ids(std::size_t n, ExampleId start = 0) {
  std::vector<ExampleId> ids(n);
  std::iota(ids.begin(), ids.end(), start);
  return ids;
}

}  // namespace

TEST_CASE("online FkL equals the window-scan oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = 0.3 + 0.6 * rng.uniform();
    const Bits b = random_bits(60, 80, p, rng);
    for (int k : {1, 2, 3, 5}) {
      for (int first : {1, 4}) {
        const FklTracker t = replay(b, k, first, iota_ids(80));
        CHECK(t.record().fkl == support::fkl_window_scan(b, k, first));
      }
    }
  }
}

TEST_CASE("worked FkL cases") {
  // 1,1,0,1,1,1 with k=3 -> epoch 6; k=2 -> epoch 2; k=1 -> epoch 1.
  const Bits b{{1}, {1}, {0}, {1}, {1}, {1}};
  CHECK(replay(b, 3, 1, {7}).record().fkl[0] == 6);
  CHECK(replay(b, 2, 1, {7}).record().fkl[0] == 2);
  CHECK(replay(b, 1, 1, {7}).record().fkl[0] == 1);
  CHECK_FALSE(replay(b, 4, 1, {7}).record().fkl[0].has_value());
  // Warm-up: epochs before first_epoch do not count towards the run.
  CHECK(replay(b, 2, 2, {7}).record().fkl[0] == 5);
}

TEST_CASE("FkL is sticky once set") {
  const Bits b{{1}, {1}, {0}, {0}, {1}, {1}};
  const FklTracker t = replay(b, 2, 1, {0});
  CHECK(t.record().fkl[0] == 2);
  CHECK(t.num_learned() == 1);
}

TEST_CASE("newly learned ids and learned order") {
  FklTracker t({30, 10, 20}, 1);
  CHECK(t.update_epoch(1, std::vector<std::uint8_t>{1, 0, 1}) == std::vector<ExampleId>{20, 30});
  CHECK(t.update_epoch(2, std::vector<std::uint8_t>{1, 1, 1}) == std::vector<ExampleId>{10});
  CHECK(t.learned_in_order() == std::vector<ExampleId>{20, 30, 10});
  CHECK(t.num_learned() == 3);
  CHECK(t.last_epoch() == 2);
}

TEST_CASE("tracker misuse is an internal error") {
  FklTracker t({1, 2}, 2);
  CHECK_THROWS_AS(t.update_epoch(2, std::vector<std::uint8_t>{1, 1}), InternalError);
  CHECK_THROWS_AS(t.update_epoch(1, std::vector<std::uint8_t>{1}), InternalError);
  CHECK_THROWS_AS(FklTracker({1, 2}, 0), ConfigError);
}

TEST_CASE("FkL ranking: unset last, ties by id") {
  FklRecord r{3, {5, 3, 9, 1, 4}, {6, std::nullopt, 4, 6, std::nullopt}};
  const Ranking rk = rank_by_fkl(r);
  CHECK(rk.criterion == Criterion::fkl);
  CHECK(rk.ids == std::vector<ExampleId>{9, 1, 5, 3, 4});
}

TEST_CASE("loss ranking uses the trailing window") {
  PredictionLog log({2, 1, 3});
  log.append(std::vector<std::uint8_t>{0, 0, 0}, std::vector<double>{9.0, 0.0, 0.0});
  log.append(std::vector<std::uint8_t>{1, 1, 1}, std::vector<double>{1.0, 2.0, 1.0});
  log.append(std::vector<std::uint8_t>{1, 1, 1}, std::vector<double>{1.0, 2.0, 1.0});
  const auto means = trailing_mean_loss(log, 2);
  CHECK(means == std::vector<double>{1.0, 2.0, 1.0});
  CHECK(rank_by_loss(log, 2).ids == std::vector<ExampleId>{2, 3, 1});
  CHECK(rank_by_loss(log, 3).ids == std::vector<ExampleId>{3, 1, 2});
  CHECK_THROWS_AS(trailing_mean_loss(log, 0), ConfigError);
  CHECK_THROWS_AS(trailing_mean_loss(log, 10), ConfigError);
}

TEST_CASE("prediction log shape checks") {
  PredictionLog log({1, 2});
  CHECK_THROWS(log.append(std::vector<std::uint8_t>{1}, std::vector<double>{0.0}));
  log.append(std::vector<std::uint8_t>{1, 0}, std::vector<double>{0.1, 0.2});
  CHECK(log.num_epochs() == 1);
  CHECK(log.correct(1)[1] == 0);
  CHECK(log.loss(1)[0] == 0.1);
}

TEST_CASE("rank slices") {
  const Ranking r{Criterion::fkl, {4, 2, 8, 6}};
  CHECK(slice_precision_inputs(r, 1, 3) == std::vector<ExampleId>{2, 8});
  CHECK_THROWS_AS(slice_precision_inputs(r, 0, 0), InputError);
  CHECK_THROWS_AS(slice_precision_inputs(r, 3, 2), InputError);
  CHECK_THROWS_AS(slice_precision_inputs(r, 0, 5), InputError);
  CHECK(parse_criterion("loss") == Criterion::loss);
  CHECK_THROWS_AS(parse_criterion("margin"), ConfigError);
}
