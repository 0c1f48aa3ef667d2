#include "latestop/config.hpp"

#include <fstream>
#include <set>

#include "latestop/errors.hpp"
#include "latestop/hash.hpp"

namespace latestop {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace

LateStopConfig config_from_json(const Json& j) {
  static const std::set<std::string> known = {
      "m_percent",      "n_percent",     "k",           "t_max",          "i_max",
      "warmup_epochs",  "outer_stop",    "noise_target_percent",            "strict_comparison",
      "hidden_widths",  "activation",    "learning_rate", "momentum",       "weight_decay",
      "batch_size",     "lr_decay_every", "lr_decay_factor", "master_seed", "retrain_final",
      "retrain_epochs", "loss_window",   "holdout_fraction", "keep_logs"};
  reject_unknown(j, known, "config");
  LateStopConfig c;
  read(j, "m_percent", c.m_percent);
  read(j, "n_percent", c.n_percent);
  read(j, "k", c.k);
  read(j, "t_max", c.t_max);
  read(j, "i_max", c.i_max);
  read(j, "warmup_epochs", c.warmup_epochs);
  if (j.contains("outer_stop")) {
    std::string s;
    read(j, "outer_stop", s);
    c.outer_stop = parse_outer_stop(s);
  }
  read(j, "noise_target_percent", c.noise_target_percent);
  read(j, "strict_comparison", c.strict_comparison);
  read(j, "hidden_widths", c.trainer.hidden_widths);
  if (j.contains("activation")) {
    std::string s;
    read(j, "activation", s);
    c.trainer.activation = parse_activation(s);
  }
  read(j, "learning_rate", c.trainer.learning_rate);
  read(j, "momentum", c.trainer.momentum);
  read(j, "weight_decay", c.trainer.weight_decay);
  read(j, "batch_size", c.trainer.batch_size);
  read(j, "lr_decay_every", c.trainer.lr_decay_every);
  read(j, "lr_decay_factor", c.trainer.lr_decay_factor);
  read(j, "master_seed", c.master_seed);
  read(j, "retrain_final", c.retrain_final);
  read(j, "retrain_epochs", c.retrain_epochs);
  read(j, "loss_window", c.loss_window);
  read(j, "holdout_fraction", c.holdout_fraction);
  read(j, "keep_logs", c.keep_logs);
  c.validate();
  return c;
}

Json config_to_json(const LateStopConfig& c) {
  return Json{{"m_percent", c.m_percent},
              {"n_percent", c.n_percent},
              {"k", c.k},
              {"t_max", c.t_max},
              {"i_max", c.i_max},
              {"warmup_epochs", c.warmup_epochs},
              {"outer_stop", to_string(c.outer_stop)},
              {"noise_target_percent", c.noise_target_percent},
              {"strict_comparison", c.strict_comparison},
              {"hidden_widths", c.trainer.hidden_widths},
              {"activation", to_string(c.trainer.activation)},
              {"learning_rate", c.trainer.learning_rate},
              {"momentum", c.trainer.momentum},
              {"weight_decay", c.trainer.weight_decay},
              {"batch_size", c.trainer.batch_size},
              {"lr_decay_every", c.trainer.lr_decay_every},
              {"lr_decay_factor", c.trainer.lr_decay_factor},
              {"master_seed", c.master_seed},
              {"retrain_final", c.retrain_final},
              {"retrain_epochs", c.retrain_epochs},
              {"loss_window", c.loss_window},
              {"holdout_fraction", c.holdout_fraction},
              {"keep_logs", c.keep_logs}};
}

std::string config_hash(const LateStopConfig& c) { return hash_hex(config_to_json(c).dump()); }

GenSpec gen_spec_from_json(const Json& j) {
  static const std::set<std::string> known = {"num_classes",   "examples_per_class", "clusters_per_class",
                                              "cluster_weights", "cluster_spreads",  "cluster_means",
                                              "mean_scale",    "feature_dim",        "seed",
                                              "test_fraction", "layout"};
  reject_unknown(j, known, "synthetic spec");
  GenSpec g;
  auto& s = g.synthetic;
  read(j, "num_classes", s.num_classes);
  read(j, "examples_per_class", s.examples_per_class);
  read(j, "clusters_per_class", s.clusters_per_class);
  if (j.contains("cluster_weights")) {
    read(j, "cluster_weights", s.cluster_weights);
  } else {
    s.cluster_weights.assign(s.clusters_per_class, 1.0 / static_cast<double>(s.clusters_per_class));
  }
  read(j, "cluster_spreads", s.cluster_spreads);
  read(j, "cluster_means", s.cluster_means);
  read(j, "mean_scale", s.mean_scale);
  read(j, "feature_dim", s.feature_dim);
  read(j, "seed", s.seed);
  read(j, "test_fraction", g.test_fraction);
  std::string layout = "random";
  read(j, "layout", layout);
  if (layout == "overlapping_subgroups") {
    if (s.clusters_per_class != 2) throw ConfigError("layout overlapping_subgroups needs clusters_per_class = 2");
    if (!s.cluster_means.empty()) throw ConfigError("layout overlapping_subgroups conflicts with cluster_means");
    s.cluster_means = overlapping_subgroup_means(s.num_classes, s.feature_dim, s.mean_scale, s.seed);
  } else if (layout != "random") {
    throw ConfigError("unknown layout '" + layout + "' (expected random or overlapping_subgroups)");
  }
  s.validate();
  if (!(g.test_fraction >= 0.0 && g.test_fraction < 1.0)) throw ConfigError("test_fraction must lie in [0, 1)");
  return g;
}

Json gen_spec_to_json(const GenSpec& g) {
  const auto& s = g.synthetic;
  Json j{{"num_classes", s.num_classes},
         {"examples_per_class", s.examples_per_class},
         {"clusters_per_class", s.clusters_per_class},
         {"cluster_weights", s.cluster_weights},
         {"cluster_spreads", s.cluster_spreads},
         {"mean_scale", s.mean_scale},
         {"feature_dim", s.feature_dim},
         {"seed", s.seed},
         {"test_fraction", g.test_fraction}};
  if (!s.cluster_means.empty()) j["cluster_means"] = s.cluster_means;
  return j;
}

Json noise_report_to_json(const NoiseReport& r) {
  return Json{{"kind", to_string(r.kind)},
              {"requested_rate", r.requested_rate},
              {"num_examples", r.num_examples},
              {"num_flipped", r.num_flipped},
              {"realized_rate", r.realized_rate},
              {"per_class_flip_counts", r.per_class_flip_counts}};
}

NoiseReport noise_report_from_json(const Json& j) {
  NoiseReport r;
  try {
    r.kind = parse_noise_kind(j.at("kind").get<std::string>());
    r.requested_rate = j.at("requested_rate").get<double>();
    r.num_examples = j.at("num_examples").get<std::size_t>();
    r.num_flipped = j.at("num_flipped").get<std::size_t>();
    r.realized_rate = j.at("realized_rate").get<double>();
    r.per_class_flip_counts = j.at("per_class_flip_counts").get<std::vector<std::vector<std::size_t>>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed noise report: ") + e.what());
  }
  return r;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("write failed for " + path);
}

}  // namespace latestop
