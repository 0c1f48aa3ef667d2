#pragma once

// Independent reference implementations and fixtures shared by the unit and
// acceptance tests. Nothing here calls into the code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "latestop/data.hpp"
#include "latestop/nncore.hpp"
#include "latestop/rng.hpp"

namespace support {

// FkL by scanning every window: the first t (1-based) such that epochs
// t-k+1..t are all observed (>= first_epoch) and all correct.
// correct[e][j] is example j at epoch e+1.
inline std::vector<std::optional<int>> fkl_window_scan(const std::vector<std::vector<std::uint8_t>>& correct, int k,
                                                       int first_epoch = 1) {
  const std::size_t n = correct.empty() ? 0 : correct.front().size();
  std::vector<std::optional<int>> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (int t = first_epoch + k - 1; t <= static_cast<int>(correct.size()); ++t) {
      bool all = true;
      for (int e = t - k + 1; e <= t; ++e) all = all && correct[e - 1][j];
      if (all) {
        out[j] = t;
        break;
      }
    }
  }
  return out;
}

// Softmax cross-entropy of a plain forward pass, written without the
// library's layer code. Mean over rows.
inline double reference_mean_loss(const latestop::Parameters& p, const latestop::Matrix& x, const std::vector<int>& y) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::vector<double> a(x.row(r).begin(), x.row(r).end());
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      const auto& layer = p.layers[l];
      std::vector<double> z(layer.weight.cols());
      for (std::size_t o = 0; o < z.size(); ++o) {
        double s = layer.bias[o];
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * layer.weight(i, o);
        z[o] = s;
      }
      if (l + 1 < p.layers.size()) {
        for (auto& v : z) v = p.activation == latestop::Activation::relu ? std::max(0.0, v) : std::tanh(v);
      }
      a = std::move(z);
    }
    const double mx = *std::max_element(a.begin(), a.end());
    double se = 0.0;
    for (double v : a) se += std::exp(v - mx);
    total += -(a[static_cast<std::size_t>(y[r])] - mx - std::log(se));
  }
  return total / static_cast<double>(x.rows());
}

// Largest relative error between analytic and central-difference gradients.
inline double max_gradient_error(latestop::Parameters p, const latestop::Matrix& x, const std::vector<int>& y,
                                 const std::vector<double>& analytic, double eps = 1e-5) {
  std::vector<double> flat = p.flatten();
  double worst = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double keep = flat[i];
    flat[i] = keep + eps;
    p.assign_flat(flat);
    const double up = reference_mean_loss(p, x, y);
    flat[i] = keep - eps;
    p.assign_flat(flat);
    const double down = reference_mean_loss(p, x, y);
    flat[i] = keep;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  p.assign_flat(flat);
  return worst;
}

// Desk-scale benchmark: 4 classes, 16 features, two clusters per class. The
// minority cluster (a quarter of each class, tight) sits on the next class's
// main cluster, which makes its clean examples hard and its labels easy to
// confuse with the neighbour's.
inline latestop::SyntheticSpec benchmark_spec(std::uint64_t seed, std::size_t examples_per_class = 1750) {
  latestop::SyntheticSpec s;
  s.num_classes = 4;
  s.examples_per_class = examples_per_class;
  s.clusters_per_class = 2;
  s.cluster_weights = {0.75, 0.25};
  s.cluster_spreads = {1.0, 0.3};
  s.feature_dim = 16;
  s.mean_scale = 3.0;
  s.seed = seed;
  s.cluster_means = latestop::overlapping_subgroup_means(s.num_classes, s.feature_dim, s.mean_scale, seed);
  return s;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory under the build tree's temp location.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("latestop_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
