#include "latestop/nncore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "latestop/errors.hpp"

namespace latestop {

namespace {

constexpr std::size_t kEvalChunk = 1024;

// out = in * W + b
void affine(const Matrix& in, const Layer& layer, Matrix& out) {
  const std::size_t n = in.rows();
  const std::size_t fan_in = layer.weight.rows();
  const std::size_t fan_out = layer.weight.cols();
  out = Matrix(n, fan_out);
  for (std::size_t r = 0; r < n; ++r) {
    double* dst = out.row(r).data();
    std::copy(layer.bias.begin(), layer.bias.end(), dst);
    const double* src = in.row(r).data();
    for (std::size_t i = 0; i < fan_in; ++i) {
      const double x = src[i];
      if (x == 0.0) continue;
      const double* w = layer.weight.row(i).data();
      for (std::size_t c = 0; c < fan_out; ++c) dst[c] += x * w[c];
    }
  }
}

void activate(Activation act, Matrix& m) {
  for (double& v : m.data()) {
    v = act == Activation::relu ? (v > 0.0 ? v : 0.0) : std::tanh(v);
  }
}

void check_batch(const Parameters& params, const Matrix& batch) {
  if (params.layers.empty()) throw InputError("parameters have no layers");
  if (batch.cols() != params.input_width()) {
    throw InputError("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                     std::to_string(params.input_width()));
  }
}

void check_labels(std::span<const int> labels, std::size_t rows, std::size_t classes) {
  if (labels.size() != rows) {
    throw InputError("label count " + std::to_string(labels.size()) + " != batch rows " +
                     std::to_string(rows));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw InputError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                       " outside [0, " + std::to_string(classes) + ")");
    }
  }
}

double log_sum_exp(std::span<const double> row) {
  const double mx = *std::max_element(row.begin(), row.end());
  double s = 0.0;
  for (double v : row) s += std::exp(v - mx);
  return mx + std::log(s);
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + name + "' (expected relu or tanh)");
}

const char* to_string(Activation a) noexcept { return a == Activation::relu ? "relu" : "tanh"; }

void NetworkSpec::validate() const {
  if (layer_widths.size() < 2) throw ConfigError("network needs at least input and output widths");
  for (std::size_t i = 0; i < layer_widths.size(); ++i) {
    if (layer_widths[i] == 0) throw ConfigError("layer width " + std::to_string(i) + " is zero");
  }
}

std::size_t Parameters::count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

bool Parameters::all_finite() const noexcept {
  for (const auto& l : layers) {
    if (!l.weight.all_finite()) return false;
    for (double b : l.bias) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

Parameters Parameters::zeros_like() const {
  Parameters z;
  z.activation = activation;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) {
    z.layers.push_back({Matrix(l.weight.rows(), l.weight.cols()), std::vector<double>(l.bias.size())});
  }
  return z;
}

std::vector<double> Parameters::flatten() const {
  std::vector<double> out;
  out.reserve(count());
  for (const auto& l : layers) {
    out.insert(out.end(), l.weight.data().begin(), l.weight.data().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void Parameters::assign_flat(std::span<const double> values) {
  if (values.size() != count()) {
    throw InputError("flat parameter count " + std::to_string(values.size()) + " != " +
                     std::to_string(count()));
  }
  std::size_t pos = 0;
  for (auto& l : layers) {
    auto w = l.weight.data();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.begin());
    pos += w.size();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.begin());
    pos += l.bias.size();
  }
}

void OptimizerState::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive and finite");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("weight_decay must be non-negative and finite");
  }
}

OptimizerState make_optimizer(const Parameters& params, double learning_rate, double momentum,
                              double weight_decay) {
  OptimizerState opt{learning_rate, momentum, weight_decay, params.zeros_like()};
  opt.validate();
  return opt;
}

double init_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Parameters init_parameters(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  Parameters p;
  p.activation = spec.activation;
  for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
    const std::size_t fan_in = spec.layer_widths[l];
    const std::size_t fan_out = spec.layer_widths[l + 1];
    const double b = init_bound(fan_in, fan_out);
    Layer layer{Matrix(fan_in, fan_out), std::vector<double>(fan_out, 0.0)};
    for (double& w : layer.weight.data()) w = rng.uniform(-b, b);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

Matrix forward(const Parameters& params, const Matrix& batch) {
  check_batch(params, batch);
  Matrix cur;
  const Matrix* in = &batch;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix next;
    affine(*in, params.layers[l], next);
    if (l + 1 < params.layers.size()) activate(params.activation, next);
    cur = std::move(next);
    in = &cur;
  }
  return cur;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto src = logits.row(r);
    auto dst = p.row(r);
    const double mx = *std::max_element(src.begin(), src.end());
    double s = 0.0;
    for (std::size_t c = 0; c < src.size(); ++c) {
      dst[c] = std::exp(src[c] - mx);
      s += dst[c];
    }
    for (double& v : dst) v /= s;
  }
  return p;
}

std::vector<double> cross_entropy(const Matrix& logits, std::span<const int> labels) {
  check_labels(labels, logits.rows(), logits.cols());
  std::vector<double> loss(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    // max(0, .) guards against -0 and rounding below zero.
    loss[r] = std::max(0.0, log_sum_exp(row) - row[static_cast<std::size_t>(labels[r])]);
  }
  return loss;
}

LossAndGrad loss_and_grad(const Parameters& params, const Matrix& batch, std::span<const int> labels) {
  check_batch(params, batch);
  check_labels(labels, batch.rows(), params.num_classes());
  const std::size_t n_layers = params.layers.size();
  const std::size_t n = batch.rows();

  // acts[l] is the input of layer l; acts[n_layers] holds the logits.
  std::vector<Matrix> acts(n_layers + 1);
  acts[0] = batch;
  for (std::size_t l = 0; l < n_layers; ++l) {
    affine(acts[l], params.layers[l], acts[l + 1]);
    if (l + 1 < n_layers) activate(params.activation, acts[l + 1]);
  }

  LossAndGrad out;
  out.per_example_loss = cross_entropy(acts[n_layers], labels);
  out.grad = params.zeros_like();
  if (n == 0) return out;

  // dL/dlogits for the batch-mean loss.
  Matrix delta = softmax_rows(acts[n_layers]);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    delta(r, static_cast<std::size_t>(labels[r])) -= 1.0;
    for (double& v : delta.row(r)) v *= inv_n;
  }

  for (std::size_t l = n_layers; l-- > 0;) {
    const Layer& layer = params.layers[l];
    Layer& g = out.grad.layers[l];
    const Matrix& input = acts[l];
    const std::size_t fan_in = layer.weight.rows();
    const std::size_t fan_out = layer.weight.cols();
    for (std::size_t r = 0; r < n; ++r) {
      const double* d = delta.row(r).data();
      const double* x = input.row(r).data();
      for (std::size_t i = 0; i < fan_in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        double* gw = g.weight.row(i).data();
        for (std::size_t c = 0; c < fan_out; ++c) gw[c] += xi * d[c];
      }
      for (std::size_t c = 0; c < fan_out; ++c) g.bias[c] += d[c];
    }
    if (l == 0) break;

    // Propagate through W and the activation of the previous layer's output.
    Matrix prev(n, fan_in);
    for (std::size_t r = 0; r < n; ++r) {
      const double* d = delta.row(r).data();
      double* p = prev.row(r).data();
      const double* a = input.row(r).data();
      for (std::size_t i = 0; i < fan_in; ++i) {
        const double* w = layer.weight.row(i).data();
        double s = 0.0;
        for (std::size_t c = 0; c < fan_out; ++c) s += w[c] * d[c];
        if (params.activation == Activation::relu) {
          p[i] = a[i] > 0.0 ? s : 0.0;
        } else {
          p[i] = s * (1.0 - a[i] * a[i]);
        }
      }
    }
    delta = std::move(prev);
  }
  return out;
}

void sgd_step(Parameters& params, const Gradient& grad, OptimizerState& opt) {
  if (params.layers.size() != grad.layers.size() || params.layers.size() != opt.velocity.layers.size()) {
    throw InputError("sgd_step: layer count mismatch");
  }
  if (!grad.all_finite()) throw NumericError("non-finite gradient encountered; aborting iteration");
  const double mu = opt.momentum;
  const double wd = opt.weight_decay;
  const double lr = opt.learning_rate;
  auto update = [&](std::span<double> p, std::span<const double> g, std::span<double> v) {
    if (p.size() != g.size() || p.size() != v.size()) throw InputError("sgd_step: shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      v[i] = mu * v[i] + g[i] + wd * p[i];
      p[i] -= lr * v[i];
    }
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight.data(), grad.layers[l].weight.data(), opt.velocity.layers[l].weight.data());
    update(params.layers[l].bias, grad.layers[l].bias, opt.velocity.layers[l].bias);
  }
}

std::vector<int> predict(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    // max_element returns the first maximum.
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

EvalPass evaluate(const Parameters& params, const Matrix& features, std::span<const int> labels) {
  check_labels(labels, features.rows(), params.num_classes());
  EvalPass out;
  out.correct.resize(features.rows());
  out.loss.resize(features.rows());
  std::size_t n_correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < features.rows(); start += kEvalChunk) {
    const std::size_t end = std::min(features.rows(), start + kEvalChunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const Matrix logits = forward(params, features.gather_rows(idx));
    const auto pred = predict(logits);
    const auto loss = cross_entropy(logits, labels.subspan(start, end - start));
    for (std::size_t r = 0; r < pred.size(); ++r) {
      const bool ok = pred[r] == labels[start + r];
      out.correct[start + r] = ok ? 1 : 0;
      out.loss[start + r] = loss[r];
      n_correct += ok ? 1 : 0;
    }
  }
  out.accuracy = features.rows() == 0 ? 0.0 : static_cast<double>(n_correct) / static_cast<double>(features.rows());
  return out;
}

double train_epoch(Parameters& params, OptimizerState& opt, const Matrix& features,
                   std::span<const int> labels, std::size_t batch_size, Rng& rng) {
  const std::size_t n = features.rows();
  if (n == 0) return 0.0;
  if (labels.size() != n) throw InputError("train_epoch: label count mismatch");
  const std::size_t bs = std::clamp<std::size_t>(batch_size, 1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<int> batch_labels;
  double loss_sum = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < n; start += bs) {
    const std::size_t end = std::min(n, start + bs);
    std::span<const std::size_t> rows(order.data() + start, end - start);
    batch_labels.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) batch_labels[i] = labels[rows[i]];
    auto lg = loss_and_grad(params, features.gather_rows(rows), batch_labels);
    sgd_step(params, lg.grad, opt);
    double s = 0.0;
    for (double v : lg.per_example_loss) s += v;
    loss_sum += s / static_cast<double>(rows.size());
    ++batches;
  }
  return loss_sum / static_cast<double>(batches);
}

}  // namespace latestop
