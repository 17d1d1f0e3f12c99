// Orthogonal autoencoder: a symmetric fully connected encoder/decoder pair
// trained to minimize
//
//   total = recon + lambda * orth
//   recon = (1/(b*p)) sum_i |x_i - x^_i|^2
//   orth  = |(1/b) Z^T Z - I_k|_F^2,   Z = bottleneck activations (b x k)
//
// Hidden layers use tanh; the bottleneck and the decoder output are linear.
// Gradients are exact analytic derivatives of the full objective, including
// the orthogonality term's dependence on Z through the encoder.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace sal {

enum class Activation { Tanh, Linear };

struct OAEArchitecture {
  // Encoder widths from input p down to the bottleneck k; the decoder is
  // the exact mirror.
  std::vector<int> layer_sizes;
  Activation hidden_activation = Activation::Tanh;

  static OAEArchitecture defaults(); // {16, 160, 80, 40, 20, 10}

  int input_dim() const { return layer_sizes.front(); }
  int bottleneck_dim() const { return layer_sizes.back(); }
  void validate() const;
};

struct Layer {
  Eigen::MatrixXd W; // out x in
  Eigen::VectorXd b; // out
  Activation activation = Activation::Tanh;
};

struct EpochLog {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct OAEModel {
  OAEArchitecture architecture;
  std::vector<Layer> layers; // encoder layers then decoder layers
  double lambda = 0.10;
  std::vector<EpochLog> train_log;

  int input_dim() const { return architecture.input_dim(); }
  int bottleneck_dim() const { return architecture.bottleneck_dim(); }
  size_t encoder_layers() const { return architecture.layer_sizes.size() - 1; }
};

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-3;
  int max_epochs = 1000;
  int patience = 10;
  double validation_fraction = 0.20;
  std::uint64_t seed = 0;
};

// Seeded uniform(+-sqrt(6/(fan_in+fan_out))) initialization.
OAEModel init_oae(const OAEArchitecture& arch, double lambda,
                  std::uint64_t seed);

Eigen::VectorXd encode(const OAEModel& m, const Eigen::VectorXd& x);
Eigen::MatrixXd encode(const OAEModel& m, const Eigen::MatrixXd& X);
Eigen::VectorXd reconstruct(const OAEModel& m, const Eigen::VectorXd& x);
Eigen::MatrixXd reconstruct(const OAEModel& m, const Eigen::MatrixXd& X);

struct OrthoLoss {
  double total = 0.0;
  double reconstruction = 0.0;
  double orthogonality = 0.0;
};

OrthoLoss ortho_loss(const OAEModel& m, const Eigen::MatrixXd& batch);

struct LayerGrad {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
};

// d(total)/d(parameters) on the given batch, aligned with m.layers.
std::vector<LayerGrad> backprop(const OAEModel& m,
                                const Eigen::MatrixXd& batch);

// Mini-batch Adam with early stopping on the validation split (the last
// validation_fraction of the rows, in index order). Returns the parameters
// of the best validation epoch; train_log covers every epoch run.
OAEModel train_oae(const Eigen::MatrixXd& data, const OAEArchitecture& arch,
                   double lambda, const TrainConfig& cfg);

// Flat text format: one header block, then one line per parameter tensor
// with 17-significant-digit decimals. save(load(f)) reproduces f byte for
// byte.
void save_oae(const OAEModel& m, const std::string& path);
OAEModel load_oae(const std::string& path);

} // namespace sal
