#include "latestop/rundir.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "latestop/errors.hpp"
#include "latestop/eval.hpp"

namespace latestop {

namespace fs = std::filesystem;

namespace {

constexpr char kModelMagic[4] = {'L', 'S', 'T', 'P'};

static_assert(std::endian::native == std::endian::little, "model dump assumes a little-endian host");

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

long long to_ll(const std::string& s, const fs::path& p, std::size_t line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(p.string() + ":" + std::to_string(line) + ": bad integer '" + s + "'");
  }
}

double to_d(const std::string& s, const fs::path& p, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(p.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
}

Json accuracy_or_null(const Parameters& params, const Dataset* ds) {
  if (!ds || ds->size() == 0) return nullptr;
  return test_accuracy(params, *ds);
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json network_to_json(const NetworkSpec& spec) {
  return Json{{"layer_widths", spec.layer_widths}, {"activation", to_string(spec.activation)}};
}

NetworkSpec network_from_json(const Json& j) {
  NetworkSpec spec;
  try {
    spec.layer_widths = j.at("layer_widths").get<std::vector<std::size_t>>();
    spec.activation = parse_activation(j.at("activation").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed network description: ") + e.what());
  }
  spec.validate();
  return spec;
}

Json RunManifest::to_json() const {
  Json j{{"config", config},
         {"config_hash", config_hash},
         {"master_seed", master_seed},
         {"tool_version", tool_version},
         {"dataset_fingerprint", dataset_fingerprint},
         {"network", network},
         {"started_at", started_at},
         {"finished_at", finished_at}};
  j["noise_report"] = noise_report ? noise_report_to_json(*noise_report) : Json(nullptr);
  return j;
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  try {
    m.config = j.at("config");
    m.config_hash = j.at("config_hash").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
    m.network = j.at("network");
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    if (j.contains("noise_report") && !j.at("noise_report").is_null()) {
      m.noise_report = noise_report_from_json(j.at("noise_report"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

bool RunManifest::hash_matches() const { return latestop::config_hash(config_from_json(config)) == config_hash; }

Json iteration_summary(const IterationResult& it) {
  Json j{{"iteration", it.iteration},
         {"training_size", it.training_ids.size()},
         {"fkl_size", it.size},
         {"previous_size", it.previous_size},
         {"removed", it.training_ids.size() - it.size},
         {"epochs_trained", it.epochs_trained},
         {"halt_reason", to_string(it.halt_reason)},
         {"k", it.fkl.k},
         {"loss_window", it.loss_window},
         {"train_loss", it.train_loss},
         {"train_accuracy", it.train_accuracy},
         {"test_accuracy", it.test_accuracy}};
  j["noise_rate"] = it.noise_rate ? Json(*it.noise_rate) : Json(nullptr);
  return j;
}

Json result_summary(const RunResult& run, const RunInputs& inputs) {
  Json j{{"iterations", run.iterations.size()},
         {"stop_reason", to_string(run.stop_reason)},
         {"kept", run.kept.size()},
         {"removed", run.removed.size()},
         {"training_sizes", Json::array()},
         {"fkl_sizes", Json::array()}};
  for (const auto& it : run.iterations) {
    j["training_sizes"].push_back(it.training_ids.size());
    j["fkl_sizes"].push_back(it.size);
  }
  j["holdout_accuracy"] = accuracy_or_null(run.final_params, &inputs.holdout);
  j["test_accuracy"] = accuracy_or_null(run.final_params, inputs.test ? &*inputs.test : nullptr);
  j["retrained_test_accuracy"] =
      run.retrained_params ? accuracy_or_null(*run.retrained_params, inputs.test ? &*inputs.test : nullptr) : Json(nullptr);
  if (inputs.train.has_truth()) {
    const auto curve = noise_curve(run, inputs.train);
    j["noise_curve"] = curve;
    j["final_noise_rate"] = noise_rate_of(run.kept, inputs.train);
    const auto r = retention(run, inputs.train);
    j["retention"] = Json{{"total_clean", r.total_clean},
                          {"total_mislabeled", r.total_mislabeled},
                          {"clean_kept", r.clean_kept},
                          {"mislabeled_kept", r.mislabeled_kept},
                          {"clean_removed", r.clean_removed},
                          {"mislabeled_removed", r.mislabeled_removed}};
  }
  return j;
}

void write_model(const fs::path& path, const Parameters& params) {
  const auto values = params.flatten();
  auto out = open_out(path);
  const std::uint32_t version = kModelFormatVersion;
  const std::uint64_t count = values.size();
  out.write(kModelMagic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw InputError("write failed for " + path.string());
}

std::vector<double> read_model_values(const fs::path& path) {
  auto in = open_in(path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t count = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&count), 8);
  if (!in) throw InputError(path.string() + ": truncated model header");
  if (std::memcmp(magic, kModelMagic, 4) != 0) throw InputError(path.string() + ": offset 0: bad model magic");
  if (version != kModelFormatVersion) {
    throw InputError(path.string() + ": offset 4: unsupported model version " + std::to_string(version));
  }
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw InputError(path.string() + ": offset 16: truncated parameter payload");
  return values;
}

Parameters read_model(const fs::path& path, const NetworkSpec& spec) {
  Rng unused(0);
  Parameters p = init_parameters(spec, unused);
  p.assign_flat(read_model_values(path));
  return p;
}

void write_fkl_csv(const fs::path& path, const FklRecord& record) {
  auto out = open_out(path);
  out << "id,fkl\n";
  for (std::size_t i = 0; i < record.ids.size(); ++i) {
    out << record.ids[i] << ',';
    if (record.fkl[i]) out << *record.fkl[i];
    out << '\n';
  }
}

FklRecord read_fkl_csv(const fs::path& path, int k) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != "id,fkl") throw InputError(path.string() + ":1: expected header 'id,fkl'");
  FklRecord r;
  r.k = k;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2) throw InputError(path.string() + ":" + std::to_string(n) + ": expected 2 fields");
    r.ids.push_back(to_ll(f[0], path, n));
    if (f[1].empty()) {
      r.fkl.emplace_back(std::nullopt);
    } else {
      r.fkl.emplace_back(static_cast<int>(to_ll(f[1], path, n)));
    }
  }
  return r;
}

void write_epochs_csv(const fs::path& path, const PredictionLog& log) {
  auto out = open_out(path);
  out << "epoch,id,correct,loss\n";
  const auto& ids = log.ids();
  for (std::size_t e = 1; e <= log.num_epochs(); ++e) {
    const auto c = log.correct(e);
    const auto l = log.loss(e);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      out << e << ',' << ids[j] << ',' << static_cast<int>(c[j]) << ',' << format_double(l[j]) << '\n';
    }
  }
}

PredictionLog read_epochs_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != "epoch,id,correct,loss") throw InputError(path.string() + ":1: expected header 'epoch,id,correct,loss'");
  std::vector<ExampleId> ids;
  std::vector<std::uint8_t> correct;
  std::vector<double> loss;
  std::optional<PredictionLog> log;
  long long current_epoch = 1;
  std::size_t n = 1;
  auto flush = [&] {
    if (!log) log.emplace(ids);
    if (correct.size() != log->ids().size()) {
      throw InputError(path.string() + ": epoch " + std::to_string(current_epoch) + " does not cover every id");
    }
    log->append(correct, loss);
    correct.clear();
    loss.clear();
  };
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw InputError(path.string() + ":" + std::to_string(n) + ": expected 4 fields");
    const long long epoch = to_ll(f[0], path, n);
    if (epoch != current_epoch) {
      if (epoch != current_epoch + 1) throw InputError(path.string() + ":" + std::to_string(n) + ": non-contiguous epoch");
      flush();
      current_epoch = epoch;
    }
    const ExampleId id = to_ll(f[1], path, n);
    if (!log) {
      ids.push_back(id);
    } else if (log->ids()[correct.size()] != id) {
      throw InputError(path.string() + ":" + std::to_string(n) + ": id order differs from epoch 1");
    }
    correct.push_back(static_cast<std::uint8_t>(to_ll(f[2], path, n) != 0));
    loss.push_back(to_d(f[3], path, n));
  }
  if (!correct.empty()) flush();
  if (!log) log.emplace(ids);
  return std::move(*log);
}

void write_ranking_csv(std::ostream& out, const Ranking& r) {
  out << "rank,id\n";
  for (std::size_t i = 0; i < r.ids.size(); ++i) out << i << ',' << r.ids[i] << '\n';
}

std::vector<ExampleId> read_id_list(const fs::path& path) {
  auto in = open_in(path);
  std::vector<ExampleId> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty()) ids.push_back(to_ll(line, path, n));
  }
  return ids;
}

std::vector<std::pair<ExampleId, int>> read_removed_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (line != "id,iteration") throw InputError(path.string() + ":1: expected header 'id,iteration'");
  std::vector<std::pair<ExampleId, int>> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2) throw InputError(path.string() + ":" + std::to_string(n) + ": expected 2 fields");
    out.emplace_back(to_ll(f[0], path, n), static_cast<int>(to_ll(f[1], path, n)));
  }
  return out;
}

void write_run_dir(const fs::path& dir, const RunManifest& manifest, const RunResult& run, const RunInputs& inputs) {
  fs::create_directories(dir);
  write_json_file((dir / "run.json").string(), manifest.to_json());
  write_json_file((dir / "result.json").string(), result_summary(run, inputs));
  for (const auto& it : run.iterations) {
    const fs::path idir = dir / ("iter_" + std::to_string(it.iteration));
    fs::create_directories(idir);
    if (it.log) write_epochs_csv(idir / "epochs.csv", *it.log);
    write_fkl_csv(idir / "fkl.csv", it.fkl);
    write_json_file((idir / "summary.json").string(), iteration_summary(it));
  }
  {
    auto out = open_out(dir / "kept.txt");
    for (ExampleId id : run.kept) out << id << '\n';
  }
  {
    auto out = open_out(dir / "removed.csv");
    out << "id,iteration\n";
    for (const auto& [id, i] : run.removed) out << id << ',' << i << '\n';
  }
  write_model(dir / "final_model.bin", run.final_params);
  if (run.retrained_params) write_model(dir / "retrained_model.bin", *run.retrained_params);
  save_csv(inputs.train, dir / "train.csv");
  save_csv(inputs.holdout, dir / "holdout.csv");
  if (inputs.test) save_csv(*inputs.test, dir / "test.csv");
}

fs::path LoadedRun::iteration_dir(int i) const { return dir / ("iter_" + std::to_string(i)); }

FklRecord LoadedRun::fkl_record(int iteration) const {
  if (iteration < 1 || static_cast<std::size_t>(iteration) > num_iterations()) {
    throw InputError("iteration " + std::to_string(iteration) + " not in run (1.." + std::to_string(num_iterations()) + ")");
  }
  return read_fkl_csv(iteration_dir(iteration) / "fkl.csv", config.k);
}

std::vector<ExampleId> LoadedRun::training_ids(int iteration) const { return fkl_record(iteration).ids; }

Ranking LoadedRun::ranking(int iteration, Criterion criterion) const {
  const FklRecord rec = fkl_record(iteration);
  if (criterion == Criterion::fkl) return rank_by_fkl(rec);
  const fs::path epochs = iteration_dir(iteration) / "epochs.csv";
  if (!fs::exists(epochs)) throw InputError(epochs.string() + " missing; the loss criterion needs per-epoch logs");
  const PredictionLog log = read_epochs_csv(epochs);
  const auto window = iteration_summaries.at(static_cast<std::size_t>(iteration - 1)).at("loss_window").get<std::size_t>();
  return rank_by_loss(log, window);
}

Parameters LoadedRun::final_params() const { return read_model(dir / "final_model.bin", network); }

LoadedRun load_run_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("run directory " + dir.string() + " does not exist");
  LoadedRun r;
  r.dir = dir;
  r.manifest = RunManifest::from_json(read_json_file((dir / "run.json").string()));
  r.config = config_from_json(r.manifest.config);
  r.network = network_from_json(r.manifest.network);
  r.result = read_json_file((dir / "result.json").string());
  const auto iterations = r.result.at("iterations").get<std::size_t>();
  for (std::size_t i = 1; i <= iterations; ++i) {
    r.iteration_summaries.push_back(read_json_file((r.iteration_dir(static_cast<int>(i)) / "summary.json").string()));
  }
  r.kept = read_id_list(dir / "kept.txt");
  r.removed = read_removed_csv(dir / "removed.csv");
  const int classes = static_cast<int>(r.network.num_classes());
  r.train = load_csv(dir / "train.csv", classes);
  if (fs::exists(dir / "holdout.csv")) r.holdout = load_csv(dir / "holdout.csv", classes);
  if (fs::exists(dir / "test.csv")) r.test = load_csv(dir / "test.csv", classes);
  return r;
}

}  // namespace latestop
