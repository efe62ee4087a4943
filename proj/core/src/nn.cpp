#include "ipdd/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ipdd/rng.hpp"

namespace ipdd {

std::vector<int> Architecture::layer_dims() const {
  std::vector<int> dims;
  dims.reserve(hidden_layers.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
  dims.push_back(num_classes);
  return dims;
}

std::size_t Architecture::param_count() const {
  const auto dims = layer_dims();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    n += static_cast<std::size_t>(dims[l] + 1) * static_cast<std::size_t>(dims[l + 1]);
  return n;
}

void Architecture::validate() const {
  if (input_dim <= 0) throw std::invalid_argument("architecture: input_dim must be positive");
  if (num_classes < 2) throw std::invalid_argument("architecture: num_classes must be >= 2");
  for (const int h : hidden_layers)
    if (h <= 0) throw std::invalid_argument("architecture: hidden layer width must be positive");
}

ModelParams init_model(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  Rng rng(seed);
  ModelParams model;
  model.arch = arch;
  model.init_seed = seed;
  const auto dims = arch.layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

namespace {

void check_input_dim(const ModelParams& model, Eigen::Index dim) {
  if (dim != model.arch.input_dim)
    throw std::invalid_argument("forward: input dimension does not match architecture");
}

// Row-wise stable softmax, in place.
void softmax_rows(Eigen::MatrixXd& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp();
    z.row(r) /= z.row(r).sum();
  }
}

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = X
  std::vector<Eigen::MatrixXd> pre;          // pre-activation per layer
  Eigen::MatrixXd probs;
};

ForwardTrace run_forward(const ModelParams& model, const Eigen::MatrixXd& X) {
  ForwardTrace t;
  t.activations.push_back(X);
  const std::size_t layers = model.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z =
        (t.activations.back() * model.weights[l].transpose()).rowwise() +
        model.biases[l].transpose();
    t.pre.push_back(z);
    if (l + 1 < layers) {
      t.activations.push_back(z.cwiseMax(0.0));
    } else {
      softmax_rows(z);
      t.probs = std::move(z);
    }
  }
  return t;
}

}  // namespace

Eigen::VectorXd forward(const ModelParams& model, const Eigen::VectorXd& x) {
  check_input_dim(model, x.size());
  return forward_batch(model, x.transpose()).row(0).transpose();
}

Eigen::MatrixXd forward_batch(const ModelParams& model, const Eigen::MatrixXd& X) {
  check_input_dim(model, X.cols());
  return run_forward(model, X).probs;
}

double mean_cross_entropy(const ModelParams& model, const Eigen::MatrixXd& X,
                          std::span<const int> y) {
  check_input_dim(model, X.cols());
  if (X.rows() == 0) throw std::invalid_argument("mean_cross_entropy: empty batch");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw std::invalid_argument("mean_cross_entropy: label count mismatch");

  ForwardTrace t = run_forward(model, X);
  const Eigen::MatrixXd& logits = t.pre.back();
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
    total += lse - logits(r, y[static_cast<std::size_t>(r)]);
  }
  return total / static_cast<double>(logits.rows());
}

Gradients mean_gradient(const ModelParams& model, const Eigen::MatrixXd& X,
                        std::span<const int> y) {
  check_input_dim(model, X.cols());
  const Eigen::Index n = X.rows();
  if (n == 0) throw std::invalid_argument("mean_gradient: empty batch");
  if (static_cast<std::size_t>(n) != y.size())
    throw std::invalid_argument("mean_gradient: label count mismatch");

  ForwardTrace t = run_forward(model, X);
  const std::size_t layers = model.weights.size();

  // Softmax + cross-entropy: output delta is (p - onehot) / n.
  Eigen::MatrixXd delta = t.probs;
  for (Eigen::Index r = 0; r < n; ++r) delta(r, y[static_cast<std::size_t>(r)]) -= 1.0;
  delta /= static_cast<double>(n);

  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta.transpose() * t.activations[l];
    g.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * model.weights[l]).cwiseProduct(
          (t.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  for (const auto& b : biases) s += b.squaredNorm();
  return s;
}

void Gradients::scale(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
}

void apply_step(ModelParams& model, const Gradients& grads, double lr) {
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    model.weights[l].noalias() -= lr * grads.weights[l];
    model.biases[l] -= lr * grads.biases[l];
  }
}

ModelParams train(ModelParams model, const LabeledDataset& data, const TrainConfig& cfg) {
  const int n = data.rows();
  if (n == 0) throw std::invalid_argument("train: empty dataset");
  if (cfg.epochs <= 0) throw std::invalid_argument("train: epochs must be positive");
  if (cfg.batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
  if (cfg.batch_size > n)
    throw std::invalid_argument("train: batch_size exceeds training-set size");
  if (cfg.learning_rate < 0.0)
    throw std::invalid_argument("train: learning_rate must be non-negative");
  for (const int label : data.labels)
    if (label < 0 || label >= model.arch.num_classes)
      throw std::invalid_argument("train: label outside [0, num_classes)");

  Rng order_rng(cfg.shuffle_seed);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd xb(b, data.features.cols());
      std::vector<int> yb(static_cast<std::size_t>(b));
      for (int i = 0; i < b; ++i) {
        xb.row(i) = data.features.row(order[static_cast<std::size_t>(start + i)]);
        yb[static_cast<std::size_t>(i)] =
            data.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
      }
      const Gradients g = mean_gradient(model, xb, yb);
      if (!std::isfinite(g.squared_norm()))
        throw std::runtime_error("train: non-finite gradient encountered");
      apply_step(model, g, cfg.learning_rate);
    }
  }
  return model;
}

double model_distance(const ModelParams& a, const ModelParams& b) {
  if (a.arch != b.arch)
    throw std::invalid_argument("model_distance: architecture mismatch");
  double worst = 0.0;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    for (Eigen::Index neuron = 0; neuron < a.weights[l].rows(); ++neuron) {
      const double d2 =
          (a.weights[l].row(neuron) - b.weights[l].row(neuron)).squaredNorm() +
          (a.biases[l](neuron) - b.biases[l](neuron)) *
              (a.biases[l](neuron) - b.biases[l](neuron));
      worst = std::max(worst, d2);
    }
  }
  return std::sqrt(worst);
}

ModelParams mean_models(std::span<const ModelParams> models) {
  if (models.empty()) throw std::invalid_argument("mean_models: empty model list");
  ModelParams out = models[0];
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (models[i].arch != out.arch)
      throw std::invalid_argument("mean_models: architecture mismatch");
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
      out.weights[l] += models[i].weights[l];
      out.biases[l] += models[i].biases[l];
    }
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  for (std::size_t l = 0; l < out.weights.size(); ++l) {
    out.weights[l] *= inv;
    out.biases[l] *= inv;
  }
  return out;
}

Eigen::VectorXd flatten_params(const ModelParams& model) {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(model.param_count()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat(at++) = w(r, c);
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r)
      flat(at++) = model.biases[l](r);
  }
  return flat;
}

void set_flat_params(ModelParams& model, const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(model.param_count()))
    throw std::invalid_argument("set_flat_params: size mismatch");
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat(at++);
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r)
      model.biases[l](r) = flat(at++);
  }
}

Eigen::VectorXd flatten_gradients(const Gradients& grads) {
  Eigen::Index total = 0;
  for (const auto& w : grads.weights) total += w.size();
  for (const auto& b : grads.biases) total += b.size();
  Eigen::VectorXd flat(total);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    const auto& w = grads.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat(at++) = w(r, c);
    for (Eigen::Index r = 0; r < grads.biases[l].size(); ++r)
      flat(at++) = grads.biases[l](r);
  }
  return flat;
}

}  // namespace ipdd
