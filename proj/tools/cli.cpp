#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "latestop/config.hpp"
#include "latestop/data.hpp"
#include "latestop/errors.hpp"
#include "latestop/eval.hpp"
#include "latestop/late_stopping.hpp"
#include "latestop/noise.hpp"
#include "latestop/rundir.hpp"

namespace fs = std::filesystem;

namespace latestop::cli {
namespace {

// Stream used to split the holdout off a data directory that has none.
constexpr std::uint64_t kHoldoutStream = 0x686f6c64;
// Stream used by `gen` for the test split.
constexpr std::uint64_t kTestStream = 1;

struct DataDir {
  Dataset train;
  std::optional<Dataset> holdout;
  std::optional<Dataset> test;
  std::optional<NoiseReport> noise;
  int num_classes = 0;
};

int classes_hint(const fs::path& dir) {
  const fs::path meta = dir / "dataset.json";
  if (!fs::exists(meta)) return 0;
  const Json j = read_json_file(meta.string());
  return j.value("num_classes", 0);
}

DataDir load_data_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("data directory " + dir.string() + " does not exist");
  if (!fs::exists(dir / "train.csv")) throw InputError("data directory " + dir.string() + " has no train.csv");
  DataDir d;
  d.num_classes = classes_hint(dir);
  d.train = load_csv(dir / "train.csv", d.num_classes);
  d.num_classes = std::max(d.num_classes, d.train.num_classes);
  if (fs::exists(dir / "holdout.csv")) d.holdout = load_csv(dir / "holdout.csv", d.num_classes);
  if (fs::exists(dir / "test.csv")) d.test = load_csv(dir / "test.csv", d.num_classes);
  if (d.holdout) d.num_classes = std::max(d.num_classes, d.holdout->num_classes);
  if (d.test) d.num_classes = std::max(d.num_classes, d.test->num_classes);
  d.train.num_classes = d.num_classes;
  if (d.holdout) d.holdout->num_classes = d.num_classes;
  if (d.test) d.test->num_classes = d.num_classes;
  if (fs::exists(dir / "noise.json")) d.noise = noise_report_from_json(read_json_file((dir / "noise.json").string()));
  return d;
}

void write_dataset_meta(const fs::path& dir, const DataDir& d) {
  Json j{{"num_classes", d.num_classes},
         {"feature_dim", d.train.features.cols()},
         {"num_train", d.train.size()},
         {"train_fingerprint", d.train.fingerprint()}};
  if (d.holdout) j["num_holdout"] = d.holdout->size();
  if (d.test) j["num_test"] = d.test->size();
  write_json_file((dir / "dataset.json").string(), j);
}

void ensure_output_dir(const fs::path& out, std::initializer_list<fs::path> inputs) {
  for (const auto& in : inputs) {
    if (fs::exists(in) && fs::exists(out) && fs::equivalent(in, out)) {
      throw ConfigError("output directory " + out.string() + " must differ from input " + in.string());
    }
  }
  fs::create_directories(out);
}

void print_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

// ---- gen -------------------------------------------------------------------

void cmd_gen(const std::string& spec_path, const fs::path& out_dir, std::ostream& out) {
  const GenSpec g = gen_spec_from_json(read_json_file(spec_path));
  ensure_output_dir(out_dir, {});
  Dataset all = generate_synthetic(g.synthetic);
  DataDir d;
  d.num_classes = g.synthetic.num_classes;
  if (g.test_fraction > 0.0) {
    auto [train, test] = split_holdout(all, {g.test_fraction, mix_seed(g.synthetic.seed, kTestStream)});
    d.train = std::move(train);
    d.test = std::move(test);
    save_csv(*d.test, out_dir / "test.csv");
  } else {
    d.train = std::move(all);
  }
  save_csv(d.train, out_dir / "train.csv");
  write_dataset_meta(out_dir, d);
  write_json_file((out_dir / "spec.json").string(), gen_spec_to_json(g));
  print_json(out, read_json_file((out_dir / "dataset.json").string()));
}

// ---- noise -----------------------------------------------------------------

void cmd_noise(const fs::path& in_dir, const std::string& kind, double rate, std::uint64_t seed, const fs::path& out_dir,
               std::ostream& out) {
  DataDir d = load_data_dir(in_dir);
  NoiseSpec spec;
  spec.kind = parse_noise_kind(kind);
  spec.rate = rate;
  spec.seed = seed;
  ensure_output_dir(out_dir, {in_dir});
  auto [noisy, report] = inject_noise(d.train, spec);
  d.train = std::move(noisy);
  d.noise = report;
  save_csv(d.train, out_dir / "train.csv");
  if (d.holdout) save_csv(*d.holdout, out_dir / "holdout.csv");
  if (d.test) save_csv(*d.test, out_dir / "test.csv");
  write_dataset_meta(out_dir, d);
  const Json rj = noise_report_to_json(report);
  write_json_file((out_dir / "noise.json").string(), rj);
  print_json(out, rj);
}

// ---- run -------------------------------------------------------------------

LateStopConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

RunInputs prepare_inputs(const DataDir& d, const LateStopConfig& c) {
  RunInputs in;
  if (d.holdout) {
    in.train = d.train;
    in.holdout = *d.holdout;
  } else {
    auto [train, hold] = split_holdout(d.train, {c.holdout_fraction, mix_seed(c.master_seed, kHoldoutStream)});
    in.train = std::move(train);
    in.holdout = std::move(hold);
  }
  in.test = d.test;
  return in;
}

void cmd_run(const fs::path& data_dir, const std::string& config_path, const fs::path& out_dir, bool retrain_final,
             std::ostream& out) {
  LateStopConfig config = load_config(config_path);
  if (retrain_final) config.retrain_final = true;
  config.validate();
  const DataDir d = load_data_dir(data_dir);
  ensure_output_dir(out_dir, {data_dir});

  RunManifest manifest;
  manifest.config = config_to_json(config);
  manifest.config_hash = config_hash(config);
  manifest.master_seed = config.master_seed;
  manifest.dataset_fingerprint = d.train.fingerprint();
  manifest.noise_report = d.noise;
  manifest.started_at = utc_timestamp();

  const RunInputs inputs = prepare_inputs(d, config);
  RunResult result = run(config, inputs.train.training_view(), inputs.test ? &*inputs.test : nullptr);
  if (inputs.train.has_truth()) annotate_noise(result, inputs.train);

  manifest.finished_at = utc_timestamp();
  manifest.network = network_to_json(result.network);
  write_run_dir(out_dir, manifest, result, inputs);
  print_json(out, read_json_file((out_dir / "result.json").string()));
}

// ---- rank ------------------------------------------------------------------

void cmd_rank(const fs::path& run_dir, const std::string& criterion, int iteration, const std::string& out_path,
              std::ostream& out) {
  const LoadedRun r = load_run_dir(run_dir);
  const Ranking ranking = r.ranking(iteration, parse_criterion(criterion));
  if (out_path.empty()) {
    write_ranking_csv(out, ranking);
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw InputError("cannot write " + out_path);
  write_ranking_csv(f, ranking);
}

// ---- eval ------------------------------------------------------------------

Json precision_json(const PrecisionTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    rows.push_back({{"lo", row.range.lo}, {"hi", row.range.hi}, {"precision", row.precision}});
  }
  return Json{{"criterion", to_string(t.criterion)}, {"mode", to_string(t.mode)}, {"rows", rows}};
}

void report_precision(const LoadedRun& r, int iteration, bool csv, std::ostream& out) {
  std::vector<PrecisionTable> tables;
  std::size_t n = 0;
  for (Criterion c : {Criterion::fkl, Criterion::loss}) {
    const Ranking ranking = r.ranking(iteration, c);
    n = ranking.ids.size();
    for (PrecisionMode m : {PrecisionMode::clean_head, PrecisionMode::mislabeled_tail}) {
      const auto ranges = default_ranges(n, m);
      tables.push_back(label_precision(ranking, r.train, ranges, m));
    }
  }
  if (csv) {
    out << "criterion,mode,lo,hi,precision\n";
    for (const auto& t : tables) {
      for (const auto& row : t.rows) {
        out << to_string(t.criterion) << ',' << to_string(t.mode) << ',' << row.range.lo << ',' << row.range.hi << ','
            << format_double(row.precision) << '\n';
      }
    }
    return;
  }
  Json j{{"iteration", iteration}, {"n", n}, {"tables", Json::array()}};
  for (const auto& t : tables) j["tables"].push_back(precision_json(t));
  print_json(out, j);
}

void report_retention(const LoadedRun& r, bool csv, std::ostream& out) {
  const RetentionReport rep = retention(r.kept, r.train);
  const Json j{{"total_clean", rep.total_clean},         {"total_mislabeled", rep.total_mislabeled},
               {"clean_kept", rep.clean_kept},           {"mislabeled_kept", rep.mislabeled_kept},
               {"clean_removed", rep.clean_removed},     {"mislabeled_removed", rep.mislabeled_removed},
               {"kept", r.kept.size()}};
  if (csv) {
    out << "total_clean,total_mislabeled,clean_kept,mislabeled_kept,clean_removed,mislabeled_removed\n"
        << rep.total_clean << ',' << rep.total_mislabeled << ',' << rep.clean_kept << ',' << rep.mislabeled_kept << ','
        << rep.clean_removed << ',' << rep.mislabeled_removed << '\n';
    return;
  }
  print_json(out, j);
}

void report_noise_curve(const LoadedRun& r, bool csv, std::ostream& out) {
  // Recounted from the persisted id lists rather than read from the summaries.
  std::vector<double> curve;
  for (std::size_t i = 1; i <= r.num_iterations(); ++i) {
    const auto ids = r.training_ids(static_cast<int>(i));
    curve.push_back(noise_rate_of(ids, r.train));
  }
  const double final_rate = noise_rate_of(r.kept, r.train);
  if (csv) {
    out << "iteration,noise_rate\n";
    for (std::size_t i = 0; i < curve.size(); ++i) out << i + 1 << ',' << format_double(curve[i]) << '\n';
    out << "final," << format_double(final_rate) << '\n';
    return;
  }
  print_json(out, Json{{"noise_curve", curve}, {"final_noise_rate", final_rate}});
}

void report_rank_shift(const LoadedRun& before, const fs::path& after_dir, bool csv, std::ostream& out) {
  if (after_dir.empty()) throw ConfigError("--report rank-shift needs --after <rundir>");
  const LoadedRun after = load_run_dir(after_dir);
  const auto ids = falsely_retained(before.kept, before.train);
  const RankShiftReport rep =
      rank_shift(before.ranking(1, Criterion::fkl), before.ranking(1, Criterion::loss), after.ranking(1, Criterion::fkl),
                 after.ranking(1, Criterion::loss), ids);
  if (csv) {
    out << "id,fkl_rank_before,fkl_rank_after,loss_rank_before,loss_rank_after\n";
    for (const auto& e : rep.entries) {
      out << e.id << ',' << e.fkl_rank_before << ',' << e.fkl_rank_after << ',' << e.loss_rank_before << ','
          << e.loss_rank_after << '\n';
    }
    return;
  }
  Json entries = Json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"id", e.id},
                       {"fkl_rank_before", e.fkl_rank_before},
                       {"fkl_rank_after", e.fkl_rank_after},
                       {"loss_rank_before", e.loss_rank_before},
                       {"loss_rank_after", e.loss_rank_after}});
  }
  print_json(out, Json{{"falsely_retained", ids.size()},
                       {"avg_fkl_rank_before", rep.avg_fkl_before},
                       {"avg_fkl_rank_after", rep.avg_fkl_after},
                       {"fkl_change_percent", rep.fkl_change_percent},
                       {"avg_loss_rank_before", rep.avg_loss_before},
                       {"avg_loss_rank_after", rep.avg_loss_after},
                       {"loss_change_percent", rep.loss_change_percent},
                       {"entries", entries}});
}

void report_accuracy(const LoadedRun& r, bool csv, std::ostream& out) {
  const Parameters params = r.final_params();
  Json j{{"holdout_accuracy", nullptr}, {"test_accuracy", nullptr}, {"retrained_test_accuracy", nullptr}};
  // The holdout carries noisy labels; accuracy there is against given labels.
  if (r.holdout && r.holdout->size() > 0) {
    const auto pred = predict(forward(params, r.holdout->features));
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == r.holdout->given_labels[i];
    j["holdout_accuracy"] = static_cast<double>(hit) / static_cast<double>(pred.size());
  }
  if (r.test && r.test->size() > 0) {
    j["test_accuracy"] = test_accuracy(params, *r.test);
    j["confusion_matrix"] = confusion_matrix(params, *r.test);
    if (fs::exists(r.dir / "retrained_model.bin")) {
      j["retrained_test_accuracy"] = test_accuracy(read_model(r.dir / "retrained_model.bin", r.network), *r.test);
    }
  }
  if (csv) {
    out << "metric,value\n";
    for (const char* key : {"holdout_accuracy", "test_accuracy", "retrained_test_accuracy"}) {
      out << key << ',' << (j[key].is_null() ? std::string() : format_double(j[key].get<double>())) << '\n';
    }
    return;
  }
  print_json(out, j);
}

// Long format for plotting training curves and the noise curve.
void report_plot_data(const LoadedRun& r, std::ostream& out) {
  out << "iteration,epoch,metric,value\n";
  for (const auto& s : r.iteration_summaries) {
    const int it = s.at("iteration").get<int>();
    for (const char* metric : {"train_loss", "train_accuracy", "test_accuracy"}) {
      const auto values = s.at(metric).get<std::vector<double>>();
      for (std::size_t e = 0; e < values.size(); ++e) {
        out << it << ',' << e + 1 << ',' << metric << ',' << format_double(values[e]) << '\n';
      }
    }
    out << it << ',' << s.at("epochs_trained").get<int>() << ",training_size," << s.at("training_size").get<std::size_t>()
        << '\n';
    out << it << ',' << s.at("epochs_trained").get<int>() << ",fkl_size," << s.at("fkl_size").get<std::size_t>() << '\n';
    if (!s.at("noise_rate").is_null()) {
      out << it << ",0,noise_rate," << format_double(s.at("noise_rate").get<double>()) << '\n';
    }
  }
}

void cmd_eval(const fs::path& run_dir, const std::string& report, int iteration, const std::string& format,
              const fs::path& after, std::ostream& out) {
  if (format != "json" && format != "csv") throw ConfigError("--format must be json or csv");
  const bool csv = format == "csv";
  const LoadedRun r = load_run_dir(run_dir);
  if (report == "precision") {
    report_precision(r, iteration, csv, out);
  } else if (report == "retention") {
    report_retention(r, csv, out);
  } else if (report == "noise-curve") {
    report_noise_curve(r, csv, out);
  } else if (report == "rank-shift") {
    report_rank_shift(r, after, csv, out);
  } else if (report == "accuracy") {
    report_accuracy(r, csv, out);
  } else if (report == "plot-data") {
    report_plot_data(r, out);
  } else {
    throw ConfigError("unknown report '" + report + "'");
  }
}

// ---- fix-labels --------------------------------------------------------------

void cmd_fix_labels(const fs::path& run_dir, const fs::path& out_dir, std::ostream& out) {
  const LoadedRun r = load_run_dir(run_dir);
  const auto ids = falsely_retained(r.kept, r.train);
  ensure_output_dir(out_dir, {run_dir});
  DataDir d;
  d.train = fix_labels(r.train, ids);
  d.holdout = r.holdout;
  d.test = r.test;
  d.num_classes = static_cast<int>(r.network.num_classes());
  save_csv(d.train, out_dir / "train.csv");
  if (d.holdout) save_csv(*d.holdout, out_dir / "holdout.csv");
  if (d.test) save_csv(*d.test, out_dir / "test.csv");
  write_dataset_meta(out_dir, d);
  std::ofstream f(out_dir / "fixed_ids.txt");
  for (ExampleId id : ids) f << id << '\n';
  print_json(out, Json{{"fixed", ids.size()}, {"out", out_dir.string()}});
}

// ---- sweep -----------------------------------------------------------------

unsigned thread_cap() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LATESTOP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("LATESTOP_THREADS must be a positive integer");
    n = static_cast<unsigned>(v);
  }
  return n;
}

std::vector<double> parse_m_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--m: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--m needs at least one value");
  return out;
}

void cmd_sweep(const fs::path& data_dir, const std::string& config_path, const std::string& m_list, int num_seeds,
               const fs::path& out_dir, std::ostream& out) {
  if (num_seeds < 1) throw ConfigError("--seeds must be positive");
  const LateStopConfig config = load_config(config_path);
  const auto m_values = parse_m_list(m_list);
  const DataDir d = load_data_dir(data_dir);
  ensure_output_dir(out_dir, {data_dir});
  const RunInputs inputs = prepare_inputs(d, config);
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < num_seeds; ++s) seeds.push_back(config.master_seed + static_cast<std::uint64_t>(s));

  const auto rows = m_sweep(config, m_values, seeds, inputs.train, inputs.test ? &*inputs.test : nullptr, thread_cap());

  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json all = Json::array();
  std::ofstream csv(out_dir / "sweep.csv");
  csv << "m_percent,seed,iterations,kept,final_noise_rate,test_accuracy,retrain_test_accuracy\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& row : rows) {
    const Json j{{"m_percent", row.m_percent},
                 {"seed", row.seed},
                 {"iterations", row.iterations},
                 {"kept", row.kept},
                 {"final_noise_rate", opt(row.final_noise_rate)},
                 {"test_accuracy", opt(row.test_accuracy)},
                 {"retrain_test_accuracy", opt(row.retrain_test_accuracy)}};
    const fs::path sub = out_dir / ("m" + format_double(row.m_percent) + "_seed" + std::to_string(row.seed));
    fs::create_directories(sub);
    write_json_file((sub / "row.json").string(), j);
    all.push_back(j);
    csv << format_double(row.m_percent) << ',' << row.seed << ',' << row.iterations << ',' << row.kept << ','
        << cell(row.final_noise_rate) << ',' << cell(row.test_accuracy) << ',' << cell(row.retrain_test_accuracy)
        << '\n';
  }
  write_json_file((out_dir / "sweep.json").string(), all);
  print_json(out, all);
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Late Stopping: iterative removal of late-learned (likely mislabeled) examples"};
  app.require_subcommand(1);

  std::string spec_path, config_path, kind = "sym", criterion = "fkl", report, format = "json", m_list = "10,5,4,3,2",
                         out_file;
  fs::path in_dir, out_dir, data_dir, run_dir, after_dir;
  double rate = 0.0;
  std::uint64_t seed = 0;
  int iteration = 1, num_seeds = 5;
  bool retrain_final = false;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic Gaussian-mixture dataset");
  gen->add_option("--spec", spec_path, "Synthetic spec JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out_dir, "Output data directory")->required();

  auto* noise = app.add_subcommand("noise", "Inject label noise into a data directory");
  noise->add_option("--in", in_dir, "Input data directory")->required();
  noise->add_option("--kind", kind, "sym or ins")->check(CLI::IsMember({"sym", "ins"}));
  noise->add_option("--rate", rate, "Noise rate in [0, 1]")->required();
  noise->add_option("--seed", seed, "Noise seed");
  noise->add_option("--out", out_dir, "Output data directory")->required();

  auto* runc = app.add_subcommand("run", "Run Late Stopping on a data directory");
  runc->add_option("--data", data_dir, "Data directory")->required();
  runc->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  runc->add_option("--out", out_dir, "Run directory")->required();
  runc->add_flag("--retrain-final", retrain_final, "Retrain a fresh network on the final kept set");

  auto* rank = app.add_subcommand("rank", "Emit a ranking CSV for one iteration");
  rank->add_option("--rundir", run_dir, "Run directory")->required();
  rank->add_option("--criterion", criterion, "fkl or loss")->check(CLI::IsMember({"fkl", "loss"}));
  rank->add_option("--iteration", iteration, "Iteration (1-based)");
  rank->add_option("--out", out_file, "Write to a file instead of stdout");

  auto* eval = app.add_subcommand("eval", "Emit an evaluation report for a finished run");
  eval->add_option("--rundir", run_dir, "Run directory")->required();
  eval->add_option("--report", report, "precision|retention|noise-curve|rank-shift|accuracy|plot-data")
      ->required()
      ->check(CLI::IsMember({"precision", "retention", "noise-curve", "rank-shift", "accuracy", "plot-data"}));
  eval->add_option("--iteration", iteration, "Iteration for precision (1-based)");
  eval->add_option("--after", after_dir, "Run on label-fixed data, for rank-shift");
  eval->add_option("--format", format, "json or csv");

  auto* fix = app.add_subcommand("fix-labels", "Write a data directory with falsely retained labels corrected");
  fix->add_option("--rundir", run_dir, "Run directory")->required();
  fix->add_option("--out", out_dir, "Output data directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run every (m, seed) pair; LATESTOP_THREADS caps parallelism");
  sweep->add_option("--data", data_dir, "Data directory")->required();
  sweep->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--m", m_list, "Comma-separated m values");
  sweep->add_option("--seeds", num_seeds, "Seeds per m, starting at master_seed");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    print_error(err, "config", e.what());
    return exit_code(ErrorKind::config);
  }

  try {
    if (gen->parsed()) cmd_gen(spec_path, out_dir, out);
    else if (noise->parsed()) cmd_noise(in_dir, kind, rate, seed, out_dir, out);
    else if (runc->parsed()) cmd_run(data_dir, config_path, out_dir, retrain_final, out);
    else if (rank->parsed()) cmd_rank(run_dir, criterion, iteration, out_file, out);
    else if (eval->parsed()) cmd_eval(run_dir, report, iteration, format, after_dir, out);
    else if (fix->parsed()) cmd_fix_labels(run_dir, out_dir, out);
    else if (sweep->parsed()) cmd_sweep(data_dir, config_path, m_list, num_seeds, out_dir, out);
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    print_error(err, "data", e.what());
    return exit_code(ErrorKind::data);
  } catch (const fs::filesystem_error& e) {
    print_error(err, "data", e.what());
    return exit_code(ErrorKind::data);
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return exit_code(ErrorKind::internal);
  }
  return 0;
}

}  // namespace latestop::cli
