#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latestop/data.hpp"
#include "latestop/matrix.hpp"
#include "latestop/rng.hpp"

namespace latestop {

enum class NoiseKind { symmetric, instance_dependent };

NoiseKind parse_noise_kind(const std::string& s);
const char* to_string(NoiseKind k) noexcept;

struct NoiseSpec {
  NoiseKind kind = NoiseKind::symmetric;
  double rate = 0.0;
  std::uint64_t seed = 0;
  // Standard deviation of the per-instance flip-rate distribution
  // (instance-dependent noise only).
  double flip_rate_sd = 0.1;

  void validate() const;
};

struct NoiseReport {
  NoiseKind kind = NoiseKind::symmetric;
  double requested_rate = 0.0;
  std::size_t num_examples = 0;
  std::size_t num_flipped = 0;
  double realized_rate = 0.0;
  // [clean][given] counts over all examples.
  std::vector<std::vector<std::size_t>> per_class_flip_counts;
};

// Each example flips with probability `rate` to a uniformly chosen other class.
std::pair<Dataset, NoiseReport> inject_symmetric(const Dataset& ds, const NoiseSpec& spec);

// Per-instance flip rate ~ N(rate, sd) truncated to [0, 1]; destination drawn
// from a softmax over the non-true classes of x^T W_y with x L2-normalized and
// W_y a per-class Gaussian projection.
std::pair<Dataset, NoiseReport> inject_instance_dependent(const Dataset& ds, const NoiseSpec& spec);

std::pair<Dataset, NoiseReport> inject_noise(const Dataset& ds, const NoiseSpec& spec);

// The per-class projections W_y (feature_dim x num_classes each), as drawn
// by inject_instance_dependent for this seed.
std::vector<Matrix> instance_noise_projections(std::uint64_t seed, std::size_t feature_dim, int num_classes);

// Destination distribution conditioned on a flip; the true class gets 0.
std::vector<double> instance_destination_distribution(std::span<const double> features, int clean_label,
                                                      const std::vector<Matrix>& projections);

// Draw from N(mean, sd) truncated to [0, 1]. mean == 0 yields 0.
double sample_flip_rate(double mean, double sd, Rng& rng);

// Fraction of examples whose given label differs from the clean label.
double measure_noise_rate(const Dataset& ds);

}  // namespace latestop
