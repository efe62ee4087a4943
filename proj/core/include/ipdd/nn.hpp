#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "ipdd/data.hpp"

namespace ipdd {

/// Feedforward network shape: input width, hidden widths, output classes.
struct Architecture {
  int input_dim = 0;
  std::vector<int> hidden_layers;
  int num_classes = 2;

  /// [input_dim, hidden..., num_classes]
  std::vector<int> layer_dims() const;
  std::size_t param_count() const;
  void validate() const;

  bool operator==(const Architecture&) const = default;
};

/// All weights and biases of one network, layer-ordered. weights[l] is
/// (fan_out x fan_in); biases[l] is (fan_out). This is the unit that gets
/// compared, bucketed and averaged.
struct ModelParams {
  Architecture arch;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::uint64_t init_seed = 0;

  std::size_t param_count() const { return arch.param_count(); }
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t shuffle_seed = 0;
};

/// Per-layer gradient (or generic parameter-shaped) buffer.
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  double squared_norm() const;
  void scale(double s);
};

/// Deterministic initialization: weights uniform in
/// [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
ModelParams init_model(const Architecture& arch, std::uint64_t seed);

/// Single-instance forward pass: ReLU hidden layers, softmax output.
/// Returns a probability vector of length num_classes.
Eigen::VectorXd forward(const ModelParams& model, const Eigen::VectorXd& x);

/// Batched forward pass; one probability row per input row.
Eigen::MatrixXd forward_batch(const ModelParams& model, const Eigen::MatrixXd& X);

/// Mean cross-entropy of the model on (X, y), computed via log-sum-exp.
double mean_cross_entropy(const ModelParams& model, const Eigen::MatrixXd& X,
                          std::span<const int> y);

/// Gradient of mean cross-entropy w.r.t. every weight and bias.
Gradients mean_gradient(const ModelParams& model, const Eigen::MatrixXd& X,
                        std::span<const int> y);

/// In-place SGD step: params -= lr * grads.
void apply_step(ModelParams& model, const Gradients& grads, double lr);

/// Minibatch SGD on mean cross-entropy. Pure function of
/// (model, data order, cfg); a rerun is bit-identical. Throws on an empty
/// dataset and on non-finite loss/gradients.
ModelParams train(ModelParams model, const LabeledDataset& data, const TrainConfig& cfg);

/// Distance between two models with identical architectures: for every
/// neuron, the Euclidean norm of the difference of its incoming weights and
/// bias; aggregated by the maximum over all neurons of all layers. Neurons
/// are aligned positionally.
double model_distance(const ModelParams& a, const ModelParams& b);

/// Coordinate-wise arithmetic mean of the given models.
ModelParams mean_models(std::span<const ModelParams> models);

/// Parameters as one flat vector (layer order; weights row-major, then bias).
Eigen::VectorXd flatten_params(const ModelParams& model);
void set_flat_params(ModelParams& model, const Eigen::VectorXd& flat);
Eigen::VectorXd flatten_gradients(const Gradients& grads);

}  // namespace ipdd
