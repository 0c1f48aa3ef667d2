#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstring>

#include "latestop/config.hpp"
#include "latestop/data.hpp"
#include "latestop/errors.hpp"
#include "latestop/eval.hpp"
#include "latestop/late_stopping.hpp"
#include "latestop/noise.hpp"
#include "latestop/tracker.hpp"

namespace py = pybind11;
using namespace latestop;

namespace {

using FloatArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const FloatArray& a) {
  if (a.ndim() != 2) throw InputError("features must be a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> data(a.data(), a.data() + rows * cols);
  return Matrix(rows, cols, std::move(data));
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Dataset make_dataset(std::vector<ExampleId> ids, const FloatArray& features, std::vector<int> given,
                     std::optional<std::vector<int>> clean, int num_classes) {
  Dataset ds;
  ds.ids = std::move(ids);
  ds.features = to_matrix(features);
  ds.given_labels = std::move(given);
  ds.clean_labels = std::move(clean);
  ds.num_classes = num_classes;
  if (ds.num_classes == 0) {
    for (int y : ds.given_labels) ds.num_classes = std::max(ds.num_classes, y + 1);
    if (ds.clean_labels)
      for (int y : *ds.clean_labels) ds.num_classes = std::max(ds.num_classes, y + 1);
  }
  ds.validate();
  return ds;
}

py::dict noise_report_dict(const NoiseReport& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["requested_rate"] = r.requested_rate;
  d["num_examples"] = r.num_examples;
  d["num_flipped"] = r.num_flipped;
  d["realized_rate"] = r.realized_rate;
  d["per_class_flip_counts"] = r.per_class_flip_counts;
  return d;
}

std::vector<RankRange> to_ranges(const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  std::vector<RankRange> out;
  for (auto [lo, hi] : ranges) out.push_back({lo, hi});
  return out;
}

PrecisionMode parse_mode(const std::string& s) {
  if (s == "clean_head") return PrecisionMode::clean_head;
  if (s == "mislabeled_tail") return PrecisionMode::mislabeled_tail;
  throw ConfigError("unknown precision mode '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Late Stopping: FkL tracking and iterative removal of late-learned examples.";

  // Translators run newest first, so the base class goes in first.
  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<RunError>(m, "RunError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
  py::register_exception<InternalError>(m, "InternalError", base.ptr());

  // ---- data ----
  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("ids"), py::arg("features"), py::arg("given_labels"),
           py::arg("clean_labels") = py::none(), py::arg("num_classes") = 0)
      .def_readonly("ids", &Dataset::ids)
      .def_property_readonly("features", [](const Dataset& d) { return to_array(d.features); })
      .def_readonly("given_labels", &Dataset::given_labels)
      .def_readonly("clean_labels", &Dataset::clean_labels)
      .def_readonly("num_classes", &Dataset::num_classes)
      .def_property_readonly("has_truth", &Dataset::has_truth)
      .def("subset", [](const Dataset& d, const std::vector<ExampleId>& ids) { return d.subset(ids); })
      .def("fingerprint", &Dataset::fingerprint)
      .def("__len__", &Dataset::size);

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("num_classes", &SyntheticSpec::num_classes)
      .def_readwrite("examples_per_class", &SyntheticSpec::examples_per_class)
      .def_readwrite("clusters_per_class", &SyntheticSpec::clusters_per_class)
      .def_readwrite("cluster_weights", &SyntheticSpec::cluster_weights)
      .def_readwrite("cluster_spreads", &SyntheticSpec::cluster_spreads)
      .def_readwrite("cluster_means", &SyntheticSpec::cluster_means)
      .def_readwrite("mean_scale", &SyntheticSpec::mean_scale)
      .def_readwrite("feature_dim", &SyntheticSpec::feature_dim)
      .def_readwrite("seed", &SyntheticSpec::seed);

  m.def("generate_synthetic", [](const SyntheticSpec& s) { return generate_synthetic(s); });
  m.def("overlapping_subgroup_means", &overlapping_subgroup_means, py::arg("num_classes"), py::arg("feature_dim"),
        py::arg("mean_scale"), py::arg("seed"));
  m.def(
      "split_holdout",
      [](const Dataset& d, double fraction, std::uint64_t seed) { return split_holdout(d, {fraction, seed}); },
      py::arg("dataset"), py::arg("fraction"), py::arg("seed"));
  m.def("load_csv", [](const std::string& p, int hint) { return load_csv(p, hint); }, py::arg("path"),
        py::arg("num_classes") = 0);
  m.def("save_csv", [](const Dataset& d, const std::string& p) { save_csv(d, p); });

  // ---- noise ----
  m.def(
      "inject_noise",
      [](const Dataset& d, const std::string& kind, double rate, std::uint64_t seed) {
        NoiseSpec spec;
        spec.kind = parse_noise_kind(kind);
        spec.rate = rate;
        spec.seed = seed;
        auto [noisy, report] = inject_noise(d, spec);
        return py::make_tuple(std::move(noisy), noise_report_dict(report));
      },
      py::arg("dataset"), py::arg("kind"), py::arg("rate"), py::arg("seed"));
  m.def("measure_noise_rate", &measure_noise_rate);

  // ---- tracker ----
  py::class_<FklTracker>(m, "FklTracker")
      .def(py::init<std::vector<ExampleId>, int, int>(), py::arg("ids"), py::arg("k"), py::arg("first_epoch") = 1)
      .def("update_epoch",
           [](FklTracker& t, int epoch, const std::vector<bool>& correct) {
             std::vector<std::uint8_t> bits(correct.begin(), correct.end());
             return t.update_epoch(epoch, bits);
           })
      .def_property_readonly("fkl", [](const FklTracker& t) { return t.record().fkl; })
      .def_property_readonly("ids", &FklTracker::ids)
      .def_property_readonly("num_learned", &FklTracker::num_learned)
      .def_property_readonly("learned_in_order", &FklTracker::learned_in_order)
      .def_property_readonly("last_epoch", &FklTracker::last_epoch);

  py::class_<Ranking>(m, "Ranking")
      .def(py::init([](const std::string& criterion, std::vector<ExampleId> ids) {
        return Ranking{parse_criterion(criterion), std::move(ids)};
      }))
      .def_property_readonly("criterion", [](const Ranking& r) { return std::string(to_string(r.criterion)); })
      .def_readonly("ids", &Ranking::ids);

  m.def(
      "rank_by_fkl",
      [](std::vector<ExampleId> ids, std::vector<std::optional<int>> fkl, int k) {
        return rank_by_fkl(FklRecord{k, std::move(ids), std::move(fkl)});
      },
      py::arg("ids"), py::arg("fkl"), py::arg("k") = 1);

  // ---- orchestrator ----
  py::class_<LateStopConfig>(m, "LateStopConfig")
      .def(py::init<>())
      .def_static("from_json", [](const std::string& s) { return config_from_json(Json::parse(s)); })
      .def("to_json", [](const LateStopConfig& c) { return config_to_json(c).dump(); })
      .def("validate", &LateStopConfig::validate)
      .def_readwrite("m_percent", &LateStopConfig::m_percent)
      .def_readwrite("n_percent", &LateStopConfig::n_percent)
      .def_readwrite("k", &LateStopConfig::k)
      .def_readwrite("t_max", &LateStopConfig::t_max)
      .def_readwrite("i_max", &LateStopConfig::i_max)
      .def_readwrite("warmup_epochs", &LateStopConfig::warmup_epochs)
      .def_property(
          "outer_stop", [](const LateStopConfig& c) { return std::string(to_string(c.outer_stop)); },
          [](LateStopConfig& c, const std::string& s) { c.outer_stop = parse_outer_stop(s); })
      .def_readwrite("noise_target_percent", &LateStopConfig::noise_target_percent)
      .def_readwrite("strict_comparison", &LateStopConfig::strict_comparison)
      .def_readwrite("master_seed", &LateStopConfig::master_seed)
      .def_readwrite("retrain_final", &LateStopConfig::retrain_final)
      .def_readwrite("retrain_epochs", &LateStopConfig::retrain_epochs)
      .def_readwrite("loss_window", &LateStopConfig::loss_window)
      .def_readwrite("keep_logs", &LateStopConfig::keep_logs)
      .def_property(
          "hidden_widths", [](const LateStopConfig& c) { return c.trainer.hidden_widths; },
          [](LateStopConfig& c, std::vector<std::size_t> w) { c.trainer.hidden_widths = std::move(w); })
      .def_property(
          "learning_rate", [](const LateStopConfig& c) { return c.trainer.learning_rate; },
          [](LateStopConfig& c, double v) { c.trainer.learning_rate = v; })
      .def_property(
          "batch_size", [](const LateStopConfig& c) { return c.trainer.batch_size; },
          [](LateStopConfig& c, std::size_t v) { c.trainer.batch_size = v; });

  py::enum_<OuterStop>(m, "OuterStop").value("budget", OuterStop::budget).value("noise_target", OuterStop::noise_target);
  m.def("inner_halt", &inner_halt, py::arg("s_fi"), py::arg("s_fi_prev"), py::arg("m_percent"));
  m.def("outer_stop", &outer_stop, py::arg("i"), py::arg("m_percent"), py::arg("n_percent"),
        py::arg("mode") = OuterStop::budget, py::arg("strict") = true, py::arg("noise_target_percent") = 0.0);
  m.def("derive_iteration_seed", &derive_iteration_seed);

  py::class_<Parameters>(m, "Parameters")
      .def("flatten", &Parameters::flatten)
      .def("count", &Parameters::count)
      .def("__eq__", [](const Parameters& a, const Parameters& b) { return a == b; });

  py::class_<IterationResult>(m, "IterationResult")
      .def_readonly("iteration", &IterationResult::iteration)
      .def_readonly("training_ids", &IterationResult::training_ids)
      .def_readonly("fkl_ids", &IterationResult::fkl_ids)
      .def_readonly("size", &IterationResult::size)
      .def_readonly("previous_size", &IterationResult::previous_size)
      .def_readonly("epochs_trained", &IterationResult::epochs_trained)
      .def_property_readonly("halt_reason",
                             [](const IterationResult& it) { return std::string(to_string(it.halt_reason)); })
      .def_readonly("noise_rate", &IterationResult::noise_rate)
      .def_readonly("train_loss", &IterationResult::train_loss)
      .def_readonly("train_accuracy", &IterationResult::train_accuracy)
      .def_readonly("test_accuracy", &IterationResult::test_accuracy)
      .def_property_readonly("fkl", [](const IterationResult& it) { return it.fkl.fkl; })
      .def("fkl_ranking", &IterationResult::fkl_ranking)
      .def("loss_ranking", &IterationResult::loss_ranking);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("iterations", &RunResult::iterations)
      .def_readonly("kept", &RunResult::kept)
      .def_readonly("removed", &RunResult::removed)
      .def_readonly("final_params", &RunResult::final_params)
      .def_readonly("retrained_params", &RunResult::retrained_params)
      .def_property_readonly("stop_reason", [](const RunResult& r) { return std::string(to_string(r.stop_reason)); });

  m.def(
      "run",
      [](const LateStopConfig& c, const Dataset& train, const Dataset* test) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c, train.training_view(), test);
          if (train.has_truth()) annotate_noise(r, train);
        }
        return r;
      },
      py::arg("config"), py::arg("train"), py::arg("test") = nullptr);

  // ---- eval ----
  m.def(
      "label_precision",
      [](const Ranking& r, const Dataset& truth, const std::vector<std::pair<std::size_t, std::size_t>>& ranges,
         const std::string& mode) {
        const auto rr = to_ranges(ranges);
        std::vector<std::tuple<std::size_t, std::size_t, double>> out;
        for (const auto& row : label_precision(r, truth, rr, parse_mode(mode)).rows)
          out.emplace_back(row.range.lo, row.range.hi, row.precision);
        return out;
      },
      py::arg("ranking"), py::arg("truth"), py::arg("ranges"), py::arg("mode"));
  m.def("default_ranges", [](std::size_t n, const std::string& mode) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (auto r : default_ranges(n, parse_mode(mode))) out.emplace_back(r.lo, r.hi);
    return out;
  });
  m.def("retention", [](const std::vector<ExampleId>& kept, const Dataset& original) {
    const auto r = retention(kept, original);
    py::dict d;
    d["total_clean"] = r.total_clean;
    d["total_mislabeled"] = r.total_mislabeled;
    d["clean_kept"] = r.clean_kept;
    d["mislabeled_kept"] = r.mislabeled_kept;
    d["clean_removed"] = r.clean_removed;
    d["mislabeled_removed"] = r.mislabeled_removed;
    return d;
  });
  m.def("noise_curve", &noise_curve);
  m.def("falsely_retained",
        [](const std::vector<ExampleId>& kept, const Dataset& original) { return falsely_retained(kept, original); });
  m.def("fix_labels", [](const Dataset& d, const std::vector<ExampleId>& ids) { return fix_labels(d, ids); });
  m.def("rank_shift", [](const RunResult& before, const RunResult& after, const std::vector<ExampleId>& ids) {
    const auto r = rank_shift(before, after, ids);
    py::dict d;
    d["avg_fkl_before"] = r.avg_fkl_before;
    d["avg_fkl_after"] = r.avg_fkl_after;
    d["avg_loss_before"] = r.avg_loss_before;
    d["avg_loss_after"] = r.avg_loss_after;
    d["fkl_change_percent"] = r.fkl_change_percent;
    d["loss_change_percent"] = r.loss_change_percent;
    d["count"] = r.entries.size();
    return d;
  });
  m.def("test_accuracy", &test_accuracy);
  m.def("confusion_matrix", &confusion_matrix);
}
