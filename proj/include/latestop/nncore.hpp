#pragma once

// Dense feed-forward classifier with softmax cross-entropy and SGD.
//
// Layer l maps activations a_{l} (batch x in) to a_{l} W_l + b_l (batch x out).
// Hidden layers apply the configured activation; the last layer emits logits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "latestop/matrix.hpp"
#include "latestop/rng.hpp"

namespace latestop {

enum class Activation { relu, tanh };

Activation parse_activation(const std::string& name);
const char* to_string(Activation a) noexcept;

struct NetworkSpec {
  // input width, hidden widths..., number of classes
  std::vector<std::size_t> layer_widths;
  Activation activation = Activation::relu;

  void validate() const;
  std::size_t input_width() const { return layer_widths.front(); }
  std::size_t num_classes() const { return layer_widths.back(); }
};

struct Layer {
  Matrix weight;  // fan_in x fan_out
  std::vector<double> bias;

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct Parameters {
  Activation activation = Activation::relu;
  std::vector<Layer> layers;

  std::size_t count() const noexcept;
  std::size_t input_width() const { return layers.front().weight.rows(); }
  std::size_t num_classes() const { return layers.back().weight.cols(); }
  bool all_finite() const noexcept;
  // Zero-valued parameters with the same shapes.
  Parameters zeros_like() const;
  // Layer by layer: weights row-major, then biases.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> values);

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

using Gradient = Parameters;

struct OptimizerState {
  double learning_rate = 0.02;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  Parameters velocity;

  void validate() const;
};

OptimizerState make_optimizer(const Parameters& params, double learning_rate, double momentum,
                              double weight_decay);

// Uniform(-b, b) weights with b = sqrt(6 / (fan_in + fan_out)); zero biases.
Parameters init_parameters(const NetworkSpec& spec, Rng& rng);
double init_bound(std::size_t fan_in, std::size_t fan_out);

Matrix forward(const Parameters& params, const Matrix& batch);

struct LossAndGrad {
  std::vector<double> per_example_loss;
  Gradient grad;  // gradient of the batch-mean loss
};

LossAndGrad loss_and_grad(const Parameters& params, const Matrix& batch, std::span<const int> labels);

// Per-row cross-entropy of logits against labels.
std::vector<double> cross_entropy(const Matrix& logits, std::span<const int> labels);
Matrix softmax_rows(const Matrix& logits);

// velocity <- momentum * velocity + grad + weight_decay * params
// params   <- params - learning_rate * velocity
void sgd_step(Parameters& params, const Gradient& grad, OptimizerState& opt);

// Row-wise argmax, lowest index wins ties.
std::vector<int> predict(const Matrix& logits);

struct EvalPass {
  std::vector<std::uint8_t> correct;
  std::vector<double> loss;
  double accuracy = 0.0;
};

// Full forward pass in fixed row order, chunked to bound memory.
EvalPass evaluate(const Parameters& params, const Matrix& features, std::span<const int> labels);

// One pass over the data in a shuffled order, mean-loss updates per batch.
// Returns the mean of the per-batch mean losses.
double train_epoch(Parameters& params, OptimizerState& opt, const Matrix& features,
                   std::span<const int> labels, std::size_t batch_size, Rng& rng);

}  // namespace latestop
