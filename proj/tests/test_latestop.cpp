#include <algorithm>
#include <set>

#include "doctest.h"
#include "latestop/errors.hpp"
#include "latestop/eval.hpp"
#include "latestop/late_stopping.hpp"
#include "latestop/noise.hpp"
#include "support.hpp"

using namespace latestop;

namespace {

Dataset separable(std::size_t per_class, std::uint64_t seed = 3, double scale = 3.0) {
  SyntheticSpec s;
  s.num_classes = 4;
  s.examples_per_class = per_class;
  s.feature_dim = 8;
  s.mean_scale = scale;
  s.seed = seed;
  return generate_synthetic(s);
}

LateStopConfig small_config() {
  LateStopConfig c;
  c.trainer.hidden_widths = {32, 32};
  c.t_max = 60;
  return c;
}

int first_stop(double m, double n, bool strict, int limit = 1000) {
  for (int i = 1; i <= limit; ++i)
    if (outer_stop(i, m, n, OuterStop::budget, strict)) return i;
  return -1;
}

}  // namespace

TEST_CASE("inner halt arithmetic") {
  CHECK(inner_halt(901, 1000, 10));
  CHECK_FALSE(inner_halt(900, 1000, 10));
  CHECK(inner_halt(1, 1, 10));
  CHECK_FALSE(inner_halt(0, 1, 10));
  CHECK(inner_halt(961, 1000, 4));
  CHECK_FALSE(inner_halt(960, 1000, 4));
}

TEST_CASE("outer stop arithmetic") {
  CHECK(first_stop(10, 40, true) == 5);
  CHECK(first_stop(10, 40, false) == 4);
  CHECK(first_stop(4, 40, true) == 11);
  CHECK(first_stop(4, 40, false) == 10);
  CHECK(first_stop(10, 0, true) == 1);
  // 0.1 * 400 is not exactly 40 in binary; the comparison must still be strict.
  CHECK(first_stop(0.1, 40, true) == 401);
  for (double m : {10.0, 5.0, 4.0, 3.0, 2.0}) CHECK(first_stop(m, 40, true) == static_cast<int>(40 / m) + 1);
  // Noise-target mode: 1 - 0.9^2 = 0.19 < 0.2 <= 1 - 0.9^3 = 0.271.
  CHECK_FALSE(outer_stop(2, 10, 40, OuterStop::noise_target, true, 20));
  CHECK(outer_stop(3, 10, 40, OuterStop::noise_target, true, 20));
  CHECK(outer_stop(1, 10, 40, OuterStop::noise_target, true, 40));
}

TEST_CASE("iteration seeds are distinct") {
  for (std::uint64_t master : {0ull, 1ull, 12345ull}) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i <= 1000; ++i) seen.insert(derive_iteration_seed(master, i));
    CHECK(seen.size() == 1001);
  }
  CHECK(derive_iteration_seed(0, 1) != derive_iteration_seed(1, 1));
}

TEST_CASE("config validation") {
  LateStopConfig c;
  c.validate();
  auto bad = [](auto mutate) {
    LateStopConfig x;
    mutate(x);
    CHECK_THROWS_AS(x.validate(), ConfigError);
  };
  bad([](LateStopConfig& x) { x.m_percent = 0; });
  bad([](LateStopConfig& x) { x.n_percent = 100; });
  bad([](LateStopConfig& x) { x.k = 0; });
  bad([](LateStopConfig& x) { x.t_max = 7; });
  bad([](LateStopConfig& x) { x.i_max = 0; });
  bad([](LateStopConfig& x) { x.trainer.batch_size = 0; });
  bad([](LateStopConfig& x) { x.trainer.learning_rate = -1; });
  bad([](LateStopConfig& x) {
    x.outer_stop = OuterStop::noise_target;
    x.noise_target_percent = 50;
  });
  CHECK_THROWS_AS(parse_outer_stop("forever"), ConfigError);
}

TEST_CASE("learning-rate schedule") {
  TrainerConfig t;
  CHECK(t.learning_rate_at(1) == t.learning_rate);
  CHECK(t.learning_rate_at(500) == t.learning_rate);
  t.lr_decay_every = 10;
  CHECK(t.learning_rate_at(10) == doctest::Approx(0.02));
  CHECK(t.learning_rate_at(11) == doctest::Approx(0.002));
}

TEST_CASE("clean run with n = 0 stops after one iteration keeping about 90%") {
  // At scale 3 every example is learned by the first eligible epoch; 1.5
  // spreads learning out so the halt lands near 90%.
  const Dataset d = separable(50, 3, 1.5);
  LateStopConfig c = small_config();
  c.n_percent = 0;
  const RunResult r = run(c, d.training_view());
  REQUIRE(r.iterations.size() == 1);
  CHECK(r.stop_reason == StopReason::outer_condition);
  CHECK(r.iterations[0].halt_reason == HaltReason::threshold);
  CHECK(r.kept.size() > 180);
  CHECK(r.kept.size() < 200);
  CHECK(r.kept.size() + r.removed.size() == 200);
  // With no noise every slice of the ranking is clean.
  const auto table = label_precision(r.iterations[0].fkl_ranking(), d, decile_head_ranges(200), PrecisionMode::clean_head);
  for (const auto& row : table.rows) CHECK(row.precision == 1.0);
}

TEST_CASE("noisy run invariants") {
  const Dataset clean = separable(100, 5);
  auto [noisy, report] = inject_symmetric(clean, {NoiseKind::symmetric, 0.4, 1});
  LateStopConfig c = small_config();
  const RunResult r = run(c, noisy.training_view());
  REQUIRE(!r.iterations.empty());
  CHECK(r.iterations.size() <= 5);

  // Nested sets, S_F0 = |D_1|, D_{i+1} = D_{F_i}.
  CHECK(r.iterations[0].previous_size == noisy.size());
  for (std::size_t i = 0; i < r.iterations.size(); ++i) {
    const auto& it = r.iterations[i];
    CHECK(it.iteration == static_cast<int>(i + 1));
    CHECK(it.size == it.fkl_ids.size());
    std::set<ExampleId> di(it.training_ids.begin(), it.training_ids.end());
    for (ExampleId id : it.fkl_ids) CHECK(di.count(id) == 1);
    if (i + 1 < r.iterations.size()) {
      const auto& next = r.iterations[i + 1];
      CHECK(next.previous_size == it.size);
      CHECK(std::set<ExampleId>(next.training_ids.begin(), next.training_ids.end()) ==
            std::set<ExampleId>(it.fkl_ids.begin(), it.fkl_ids.end()));
    }
    if (it.halt_reason == HaltReason::threshold) {
      CHECK(inner_halt(it.size, it.previous_size, c.m_percent));
      CHECK(it.epochs_trained <= c.t_max);
    } else {
      CHECK(it.epochs_trained == c.t_max);
    }
    CHECK(it.train_loss.size() == static_cast<std::size_t>(it.epochs_trained));
    REQUIRE(it.log);
    CHECK(it.log->num_epochs() == static_cast<std::size_t>(it.epochs_trained));
  }
  // The next training set is ordered by ascending FkL.
  if (r.iterations.size() > 1) CHECK(r.iterations[1].training_ids == r.iterations[0].fkl_ids);

  // Kept and removed partition the original ids; one removal iteration each.
  std::set<ExampleId> all(r.kept.begin(), r.kept.end());
  for (auto [id, iter] : r.removed) {
    CHECK(all.insert(id).second);
    CHECK(iter >= 1);
    CHECK(iter <= static_cast<int>(r.iterations.size()));
  }
  CHECK(all.size() == noisy.size());
  CHECK(std::is_sorted(r.kept.begin(), r.kept.end()));
  CHECK(r.final_params.all_finite());

  // Reproducibility, including the logs.
  const RunResult again = run(c, noisy.training_view());
  REQUIRE(again.iterations.size() == r.iterations.size());
  CHECK(again.kept == r.kept);
  CHECK(again.final_params == r.final_params);
  for (std::size_t i = 0; i < r.iterations.size(); ++i) {
    CHECK(again.iterations[i].fkl.fkl == r.iterations[i].fkl.fkl);
    CHECK(again.iterations[i].train_loss == r.iterations[i].train_loss);
    CHECK(again.iterations[i].loss_snapshot == r.iterations[i].loss_snapshot);
  }

  // A different master seed gives a different run.
  c.master_seed = 99;
  CHECK_FALSE(run(c, noisy.training_view()).final_params == r.final_params);
}

TEST_CASE("warm-up epochs never commit FkL") {
  const Dataset d = separable(25);
  LateStopConfig c = small_config();
  c.warmup_epochs = 4;
  c.k = 2;
  c.n_percent = 0;
  const RunResult r = run(c, d.training_view());
  for (const auto& v : r.iterations[0].fkl.fkl)
    if (v) CHECK(*v >= c.warmup_epochs + c.k);
}

TEST_CASE("I_max caps the number of iterations") {
  const Dataset d = separable(25);
  LateStopConfig c = small_config();
  c.m_percent = 4;
  c.n_percent = 40;
  c.i_max = 2;
  const RunResult r = run(c, d.training_view());
  CHECK(r.iterations.size() == 2);
  CHECK(r.stop_reason == StopReason::i_max_reached);
}

TEST_CASE("final retrain and plain classifier") {
  const Dataset d = separable(25);
  LateStopConfig c = small_config();
  c.n_percent = 0;
  c.retrain_final = true;
  c.retrain_epochs = 10;
  const RunResult r = run(c, d.training_view(), &d);
  REQUIRE(r.retrained_params);
  CHECK(r.retrain_test_accuracy.size() == 10);
  CHECK(r.iterations[0].test_accuracy.size() == static_cast<std::size_t>(r.iterations[0].epochs_trained));

  const TrainedModel a = train_classifier(c.trainer, d.training_view(), 5, 7, &d);
  const TrainedModel b = train_classifier(c.trainer, d.training_view(), 5, 7, &d);
  CHECK(a.params == b.params);
  CHECK(a.test_accuracy.size() == 5);
}

TEST_CASE("bad inputs") {
  LateStopConfig c = small_config();
  TrainingSet empty;
  empty.num_classes = 2;
  CHECK_THROWS_AS(run(c, empty), InputError);
  const Dataset d = separable(10);
  Dataset other = separable(10);
  other.features = Matrix(other.size(), 3, 0.0);
  CHECK_THROWS_AS(run(c, d.training_view(), &other), InputError);
  c.k = 0;
  CHECK_THROWS_AS(run(c, d.training_view()), ConfigError);
}
