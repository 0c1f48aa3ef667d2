#include "latestop/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latestop/errors.hpp"
#include "latestop/rng.hpp"

namespace latestop {

namespace {

constexpr std::uint64_t kProjectionStream = 0x70726f6aULL;

NoiseReport make_report(const Dataset& noisy, const NoiseSpec& spec) {
  NoiseReport r;
  r.kind = spec.kind;
  r.requested_rate = spec.rate;
  r.num_examples = noisy.size();
  const auto c = static_cast<std::size_t>(noisy.num_classes);
  r.per_class_flip_counts.assign(c, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const auto truth = static_cast<std::size_t>((*noisy.clean_labels)[i]);
    const auto given = static_cast<std::size_t>(noisy.given_labels[i]);
    ++r.per_class_flip_counts[truth][given];
    if (truth != given) ++r.num_flipped;
  }
  r.realized_rate = noisy.size() == 0 ? 0.0 : static_cast<double>(r.num_flipped) / static_cast<double>(noisy.size());
  return r;
}

Dataset with_truth(const Dataset& ds) {
  ds.validate();
  Dataset out = ds;
  if (!out.clean_labels) out.clean_labels = out.given_labels;
  out.given_labels = *out.clean_labels;
  return out;
}

}  // namespace

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "sym" || s == "symmetric") return NoiseKind::symmetric;
  if (s == "ins" || s == "instance" || s == "instance_dependent") return NoiseKind::instance_dependent;
  throw ConfigError("unknown noise kind '" + s + "' (expected sym or ins)");
}

const char* to_string(NoiseKind k) noexcept {
  return k == NoiseKind::symmetric ? "symmetric" : "instance_dependent";
}

void NoiseSpec::validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("noise rate must lie in [0, 1]");
  if (!(flip_rate_sd >= 0.0) || !std::isfinite(flip_rate_sd)) throw ConfigError("flip_rate_sd must be >= 0");
}

std::pair<Dataset, NoiseReport> inject_symmetric(const Dataset& ds, const NoiseSpec& spec) {
  spec.validate();
  Dataset out = with_truth(ds);
  if (spec.rate > 0.0 && out.num_classes < 2) throw ConfigError("symmetric noise needs at least 2 classes");
  const auto others = static_cast<std::uint64_t>(out.num_classes - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Per-example stream keyed on the stable id.
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(out.ids[i])));
    if (!(rng.uniform() < spec.rate)) continue;
    const int truth = (*out.clean_labels)[i];
    auto dest = static_cast<int>(rng.uniform_index(others));
    if (dest >= truth) ++dest;
    out.given_labels[i] = dest;
  }
  NoiseReport report = make_report(out, spec);
  return {std::move(out), std::move(report)};
}

std::vector<Matrix> instance_noise_projections(std::uint64_t seed, std::size_t feature_dim, int num_classes) {
  Rng rng(mix_seed(seed, kProjectionStream));
  std::vector<Matrix> w;
  for (int c = 0; c < num_classes; ++c) {
    Matrix m(feature_dim, static_cast<std::size_t>(num_classes));
    for (double& v : m.data()) v = rng.normal();
    w.push_back(std::move(m));
  }
  return w;
}

std::vector<double> instance_destination_distribution(std::span<const double> features, int clean_label,
                                                      const std::vector<Matrix>& projections) {
  const auto& w = projections.at(static_cast<std::size_t>(clean_label));
  const std::size_t c = w.cols();
  double norm = 0.0;
  for (double v : features) norm += v * v;
  norm = std::sqrt(norm);
  const double scale = norm > 0.0 ? 1.0 / norm : 0.0;

  std::vector<double> score(c, 0.0);
  for (std::size_t j = 0; j < features.size(); ++j) {
    const double x = features[j] * scale;
    for (std::size_t d = 0; d < c; ++d) score[d] += x * w(j, d);
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < c; ++d) {
    if (static_cast<int>(d) != clean_label) mx = std::max(mx, score[d]);
  }
  std::vector<double> p(c, 0.0);
  double sum = 0.0;
  for (std::size_t d = 0; d < c; ++d) {
    if (static_cast<int>(d) == clean_label) continue;
    p[d] = std::exp(score[d] - mx);
    sum += p[d];
  }
  for (double& v : p) v /= sum;
  return p;
}

double sample_flip_rate(double mean, double sd, Rng& rng) {
  if (mean <= 0.0) return 0.0;
  if (sd == 0.0) return std::min(mean, 1.0);
  // Rejection sampling; acceptance mass is at least ~0.5 for mean in (0, 1].
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double q = mean + sd * rng.normal();
    if (q >= 0.0 && q <= 1.0) return q;
  }
  return std::clamp(mean, 0.0, 1.0);
}

std::pair<Dataset, NoiseReport> inject_instance_dependent(const Dataset& ds, const NoiseSpec& spec) {
  spec.validate();
  Dataset out = with_truth(ds);
  if (out.feature_dim() < 1) throw ConfigError("instance-dependent noise needs feature_dim >= 1");
  if (spec.rate > 0.0 && out.num_classes < 2) throw ConfigError("instance-dependent noise needs at least 2 classes");
  if (spec.rate > 0.0) {
    const auto projections = instance_noise_projections(spec.seed, out.feature_dim(), out.num_classes);
    for (std::size_t i = 0; i < out.size(); ++i) {
      Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(out.ids[i])));
      const double q = sample_flip_rate(spec.rate, spec.flip_rate_sd, rng);
      if (!(rng.uniform() < q)) continue;
      const int truth = (*out.clean_labels)[i];
      const auto p = instance_destination_distribution(out.features.row(i), truth, projections);
      const double u = rng.uniform();
      double acc = 0.0;
      int dest = -1;
      for (std::size_t d = 0; d < p.size(); ++d) {
        if (static_cast<int>(d) == truth) continue;
        acc += p[d];
        dest = static_cast<int>(d);
        if (u < acc) break;
      }
      out.given_labels[i] = dest;
    }
  }
  NoiseReport report = make_report(out, spec);
  return {std::move(out), std::move(report)};
}

std::pair<Dataset, NoiseReport> inject_noise(const Dataset& ds, const NoiseSpec& spec) {
  return spec.kind == NoiseKind::symmetric ? inject_symmetric(ds, spec) : inject_instance_dependent(ds, spec);
}

double measure_noise_rate(const Dataset& ds) {
  if (!ds.clean_labels) throw EvaluationError("noise rate needs clean labels");
  if (ds.size() == 0) return 0.0;
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) flipped += ds.given_labels[i] != (*ds.clean_labels)[i] ? 1 : 0;
  return static_cast<double>(flipped) / static_cast<double>(ds.size());
}

}  // namespace latestop
