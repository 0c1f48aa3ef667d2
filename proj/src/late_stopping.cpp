#include "latestop/late_stopping.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "latestop/errors.hpp"

namespace latestop {

namespace {

// Comparisons on percentages tolerate representation error, e.g. 1 - 0.8 vs 0.2.
constexpr double kPercentEps = 1e-9;

constexpr std::uint64_t kShuffleStream = 0x73687566ULL;

double test_accuracy_of(const Parameters& params, const Dataset& test) {
  if (test.size() == 0) return 0.0;
  return evaluate(params, test.features, test.reference_labels()).accuracy;
}

void check_training_set(const TrainingSet& train) {
  if (train.ids.empty()) throw InputError("training set is empty");
  if (train.features.rows() != train.ids.size() || train.labels.size() != train.ids.size()) {
    throw InputError("training set arrays disagree in length");
  }
}

TrainingSet subset_of(const TrainingSet& full, const std::unordered_map<ExampleId, std::size_t>& row_of,
                      const std::vector<ExampleId>& ids) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  TrainingSet out;
  out.num_classes = full.num_classes;
  out.ids = ids;
  out.labels.reserve(ids.size());
  for (ExampleId id : ids) {
    const auto r = row_of.at(id);
    rows.push_back(r);
    out.labels.push_back(full.labels[r]);
  }
  out.features = full.features.gather_rows(rows);
  return out;
}

}  // namespace

void TrainerConfig::validate() const {
  for (auto w : hidden_widths) {
    if (w == 0) throw ConfigError("hidden widths must be >= 1");
  }
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (lr_decay_every < 0) throw ConfigError("lr_decay_every must be >= 0");
  if (!(lr_decay_factor > 0.0) || !std::isfinite(lr_decay_factor)) throw ConfigError("lr_decay_factor must be positive");
  OptimizerState{learning_rate, momentum, weight_decay, {}}.validate();
}

NetworkSpec TrainerConfig::network_for(std::size_t input_width, int num_classes) const {
  NetworkSpec spec;
  spec.activation = activation;
  spec.layer_widths.push_back(input_width);
  spec.layer_widths.insert(spec.layer_widths.end(), hidden_widths.begin(), hidden_widths.end());
  spec.layer_widths.push_back(static_cast<std::size_t>(std::max(num_classes, 0)));
  spec.validate();
  return spec;
}

double TrainerConfig::learning_rate_at(int epoch) const {
  if (lr_decay_every <= 0) return learning_rate;
  return learning_rate * std::pow(lr_decay_factor, (epoch - 1) / lr_decay_every);
}

OuterStop parse_outer_stop(const std::string& s) {
  if (s == "budget") return OuterStop::budget;
  if (s == "noise_target") return OuterStop::noise_target;
  throw ConfigError("unknown outer_stop '" + s + "' (expected budget or noise_target)");
}

const char* to_string(OuterStop s) noexcept { return s == OuterStop::budget ? "budget" : "noise_target"; }
const char* to_string(HaltReason r) noexcept { return r == HaltReason::threshold ? "threshold" : "t_max_exhausted"; }
const char* to_string(StopReason r) noexcept {
  return r == StopReason::outer_condition ? "outer_condition" : "i_max_reached";
}

void LateStopConfig::validate() const {
  if (!(m_percent > 0.0 && m_percent <= 100.0)) throw ConfigError("m_percent must lie in (0, 100]");
  if (!(n_percent >= 0.0 && n_percent < 100.0)) throw ConfigError("n_percent must lie in [0, 100)");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
  if (t_max < k + warmup_epochs) throw ConfigError("t_max must be >= k + warmup_epochs");
  if (i_max < 1) throw ConfigError("i_max must be >= 1");
  if (retrain_epochs < 0) throw ConfigError("retrain_epochs must be >= 0");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) throw ConfigError("holdout_fraction must lie in [0, 1)");
  if (outer_stop == OuterStop::noise_target &&
      !(noise_target_percent >= 0.0 && noise_target_percent <= n_percent)) {
    throw ConfigError("noise_target_percent must lie in [0, n_percent]");
  }
  trainer.validate();
}

bool inner_halt(std::size_t s_fi, std::size_t s_fi_prev, double m_percent) {
  return static_cast<double>(s_fi) > static_cast<double>(s_fi_prev) * (1.0 - m_percent / 100.0);
}

bool outer_stop(int i, double m_percent, double n_percent, OuterStop mode, bool strict, double noise_target_percent) {
  if (mode == OuterStop::budget) {
    const double spent = m_percent * static_cast<double>(i);
    return strict ? spent > n_percent + kPercentEps * n_percent : spent >= n_percent - kPercentEps;
  }
  const double planned = 1.0 - std::pow(1.0 - m_percent / 100.0, i);
  const double needed = (n_percent - noise_target_percent) / 100.0;
  return planned >= needed - kPercentEps;
}

std::uint64_t derive_iteration_seed(std::uint64_t master_seed, std::uint64_t iteration) {
  return mix_seed(master_seed, iteration);
}

TrainedModel train_classifier(const TrainerConfig& trainer, const TrainingSet& train, int epochs,
                              std::uint64_t seed, const Dataset* test) {
  trainer.validate();
  check_training_set(train);
  const NetworkSpec spec = trainer.network_for(train.features.cols(), train.num_classes);
  Rng init_rng(seed);
  Rng shuffle_rng(mix_seed(seed, kShuffleStream));
  TrainedModel out{init_parameters(spec, init_rng), {}, {}, {}};
  OptimizerState opt = make_optimizer(out.params, trainer.learning_rate, trainer.momentum, trainer.weight_decay);
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    opt.learning_rate = trainer.learning_rate_at(epoch);
    out.train_loss.push_back(train_epoch(out.params, opt, train.features, train.labels, trainer.batch_size, shuffle_rng));
    out.train_accuracy.push_back(evaluate(out.params, train.features, train.labels).accuracy);
    if (test) out.test_accuracy.push_back(test_accuracy_of(out.params, *test));
  }
  return out;
}

RunResult run(const LateStopConfig& config, const TrainingSet& train, const Dataset* test) {
  config.validate();
  check_training_set(train);
  if (test && test->feature_dim() != train.features.cols()) {
    throw InputError("test set feature dimension differs from training set");
  }

  std::unordered_map<ExampleId, std::size_t> row_of;
  row_of.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!row_of.emplace(train.ids[i], i).second) throw InputError("duplicate id " + std::to_string(train.ids[i]));
  }

  RunResult result;
  result.network = config.trainer.network_for(train.features.cols(), train.num_classes);

  std::vector<ExampleId> current = train.ids;
  std::size_t previous_size = current.size();  // S_{F_0} := |D_1|
  std::unordered_map<ExampleId, int> removed_at;

  for (int i = 1; i <= config.i_max; ++i) {
    const TrainingSet d_i = subset_of(train, row_of, current);
    const std::uint64_t seed = derive_iteration_seed(config.master_seed, static_cast<std::uint64_t>(i));
    Rng init_rng(seed);
    Rng shuffle_rng(mix_seed(seed, kShuffleStream));
    Parameters params = init_parameters(result.network, init_rng);
    OptimizerState opt = make_optimizer(params, config.trainer.learning_rate, config.trainer.momentum,
                                        config.trainer.weight_decay);

    IterationResult it;
    it.iteration = i;
    it.training_ids = current;
    it.previous_size = previous_size;
    FklTracker tracker(current, config.k, config.warmup_epochs + 1);
    PredictionLog log(current);
    it.halt_reason = HaltReason::t_max_exhausted;

    for (int epoch = 1; epoch <= config.t_max; ++epoch) {
      opt.learning_rate = config.trainer.learning_rate_at(epoch);
      it.train_loss.push_back(
          train_epoch(params, opt, d_i.features, d_i.labels, config.trainer.batch_size, shuffle_rng));
      const EvalPass pass = evaluate(params, d_i.features, d_i.labels);
      it.train_accuracy.push_back(pass.accuracy);
      if (test) it.test_accuracy.push_back(test_accuracy_of(params, *test));
      log.append(pass.correct, pass.loss);
      it.epochs_trained = epoch;
      if (epoch <= config.warmup_epochs) continue;
      tracker.update_epoch(epoch, pass.correct);
      if (inner_halt(tracker.num_learned(), previous_size, config.m_percent)) {
        it.halt_reason = HaltReason::threshold;
        break;
      }
    }

    it.fkl_ids = tracker.learned_in_order();
    it.size = it.fkl_ids.size();
    it.fkl = tracker.record();
    const std::size_t window = std::min<std::size_t>(
        config.loss_window > 0 ? config.loss_window : static_cast<std::size_t>(config.k),
        static_cast<std::size_t>(it.epochs_trained));
    it.loss_window = window;
    it.loss_snapshot = trailing_mean_loss(log, window);
    if (config.keep_logs) it.log = std::move(log);

    if (it.fkl_ids.empty()) {
      throw RunError("iteration " + std::to_string(i) + ": no example reached FkL (k=" + std::to_string(config.k) +
                     ") within " + std::to_string(it.epochs_trained) + " epochs on " +
                     std::to_string(current.size()) + " examples; final train accuracy " +
                     std::to_string(it.train_accuracy.empty() ? 0.0 : it.train_accuracy.back()));
    }

    const std::unordered_set<ExampleId> survivors(it.fkl_ids.begin(), it.fkl_ids.end());
    for (ExampleId id : current) {
      if (!survivors.count(id)) removed_at.emplace(id, i);
    }
    current = it.fkl_ids;
    previous_size = it.size;
    result.final_params = std::move(params);
    result.iterations.push_back(std::move(it));

    if (outer_stop(i, config.m_percent, config.n_percent, config.outer_stop, config.strict_comparison,
                   config.noise_target_percent)) {
      result.stop_reason = StopReason::outer_condition;
      break;
    }
    if (i == config.i_max) result.stop_reason = StopReason::i_max_reached;
  }

  result.kept = current;
  std::sort(result.kept.begin(), result.kept.end());
  result.removed.assign(removed_at.begin(), removed_at.end());
  std::sort(result.removed.begin(), result.removed.end());

  if (config.retrain_final) {
    const TrainingSet kept = subset_of(train, row_of, result.kept);
    const int epochs = config.retrain_epochs > 0 ? config.retrain_epochs : config.t_max;
    TrainedModel m = train_classifier(config.trainer, kept, epochs, derive_iteration_seed(config.master_seed, 0), test);
    result.retrained_params = std::move(m.params);
    result.retrain_test_accuracy = std::move(m.test_accuracy);
  }
  return result;
}

}  // namespace latestop
