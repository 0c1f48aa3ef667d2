#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "latestop/matrix.hpp"

namespace latestop {

using ExampleId = std::int64_t;

// Labels and features for training and selection. Carries no ground truth,
// so code that only receives a TrainingSet cannot peek at clean labels.
struct TrainingSet {
  std::vector<ExampleId> ids;
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const noexcept { return ids.size(); }
};

struct Dataset {
  std::vector<ExampleId> ids;
  Matrix features;
  std::vector<int> given_labels;
  // Ground truth; evaluation only.
  std::optional<std::vector<int>> clean_labels;
  int num_classes = 0;

  std::size_t size() const noexcept { return ids.size(); }
  std::size_t feature_dim() const noexcept { return features.cols(); }
  bool has_truth() const noexcept { return clean_labels.has_value(); }

  // Throws InputError on any broken invariant.
  void validate() const;

  std::unordered_map<ExampleId, std::size_t> index() const;
  // Rows for the given ids, in the order given. Unknown id -> InputError.
  Dataset subset(std::span<const ExampleId> ids) const;
  TrainingSet training_view() const;
  // Labels used when the set serves as a test set: truth when known.
  const std::vector<int>& reference_labels() const { return clean_labels ? *clean_labels : given_labels; }
  std::string fingerprint() const;
};

struct SyntheticSpec {
  int num_classes = 2;
  std::size_t examples_per_class = 100;
  std::size_t clusters_per_class = 1;
  // Shared by every class; sums to 1. Small weights create rare sub-populations.
  std::vector<double> cluster_weights{1.0};
  // Per-cluster isotropic standard deviation; one entry or one per cluster.
  std::vector<double> cluster_spreads{1.0};
  // num_classes * clusters_per_class rows of feature_dim means, class-major.
  // When empty, means are drawn from N(0, mean_scale^2) using the seed.
  std::vector<std::vector<double>> cluster_means;
  double mean_scale = 3.0;
  std::size_t feature_dim = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitSpec {
  double holdout_fraction = 0.1;
  std::uint64_t seed = 0;
};

// Means for a two-cluster-per-class layout in which each class's second
// (minority) cluster sits on the next class's first cluster mean. The
// minority examples of class c look like the bulk of class c+1.
std::vector<std::vector<double>> overlapping_subgroup_means(int num_classes, std::size_t feature_dim,
                                                            double mean_scale, std::uint64_t seed);

// Gaussian-mixture dataset, clean labels equal given labels, ids 0..N-1 in
// class-major order. Each example also reports its cluster via `clusters`.
Dataset generate_synthetic(const SyntheticSpec& spec, std::vector<std::size_t>* clusters = nullptr);

// CSV: header `id,label[,clean_label],f0,...,f{D-1}`.
Dataset load_csv(const std::filesystem::path& path, int num_classes_hint = 0);
void save_csv(const Dataset& ds, const std::filesystem::path& path);

// IDX image/label pair; bytes scaled to [0, 1]; ids 0..N-1.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, const SplitSpec& split);

// Shortest round-trip formatting used by every CSV/JSON writer.
std::string format_double(double v);

}  // namespace latestop
