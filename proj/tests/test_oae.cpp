#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sal/oae.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace sal;

namespace {

OAEArchitecture small_arch() {
  OAEArchitecture arch;
  arch.layer_sizes = {4, 8, 3};
  return arch;
}

} // namespace

TEST_CASE("default architecture matches the reference widths") {
  const OAEArchitecture arch = OAEArchitecture::defaults();
  CHECK(arch.layer_sizes == std::vector<int>{16, 160, 80, 40, 20, 10});
  CHECK(arch.input_dim() == 16);
  CHECK(arch.bottleneck_dim() == 10);
}

TEST_CASE("init builds a mirrored stack with linear bottleneck and output") {
  const OAEModel m = init_oae(small_arch(), 0.1, 1);
  REQUIRE(m.layers.size() == 4);
  CHECK(m.layers[0].W.rows() == 8);
  CHECK(m.layers[0].W.cols() == 4);
  CHECK(m.layers[1].W.rows() == 3);
  CHECK(m.layers[1].W.cols() == 8);
  CHECK(m.layers[2].W.rows() == 8);
  CHECK(m.layers[2].W.cols() == 3);
  CHECK(m.layers[3].W.rows() == 4);
  CHECK(m.layers[3].W.cols() == 8);
  CHECK(m.layers[0].activation == Activation::Tanh);
  CHECK(m.layers[1].activation == Activation::Linear);
  CHECK(m.layers[2].activation == Activation::Tanh);
  CHECK(m.layers[3].activation == Activation::Linear);
  for (const Layer& l : m.layers) CHECK(l.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero network encodes and reconstructs to zero") {
  OAEModel m = init_oae(small_arch(), 0.1, 1);
  for (Layer& l : m.layers) l.W.setZero();
  std::mt19937_64 rng(2);
  const Eigen::VectorXd x = oracle::random_vector(4, rng);
  CHECK(encode(m, x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(reconstruct(m, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity single-layer network passes input through") {
  OAEArchitecture arch;
  arch.layer_sizes = {3, 3};
  OAEModel m = init_oae(arch, 0.0, 1);
  m.layers[0].W.setIdentity();
  m.layers[0].b.setZero();
  std::mt19937_64 rng(3);
  const Eigen::VectorXd x = oracle::random_vector(3, rng);
  CHECK((encode(m, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass matches the per-neuron oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const OAEModel m = init_oae(small_arch(), 0.1, 100 + trial);
    const Eigen::VectorXd x = oracle::random_vector(4, rng, 1.5);
    const Eigen::VectorXd z_ref =
        oracle::naive_forward(m, x, m.encoder_layers());
    const Eigen::VectorXd x_ref =
        oracle::naive_forward(m, x, m.layers.size());
    CHECK((encode(m, x) - z_ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((reconstruct(m, x) - x_ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const OAEModel m = init_oae(small_arch(), 0.1, 1);
  std::mt19937_64 rng(7);
  CHECK_THROWS_AS(encode(m, oracle::random_vector(5, rng)),
                  std::invalid_argument);
}

TEST_CASE("non-finite intermediates report the layer") {
  OAEModel m = init_oae(small_arch(), 0.1, 1);
  m.layers[1].W(0, 0) = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(11);
  const Eigen::VectorXd x = oracle::random_vector(4, rng);
  CHECK_THROWS_WITH_AS(reconstruct(m, x), doctest::Contains("layer 1"),
                       std::runtime_error);
}

TEST_CASE("ortho loss components") {
  std::mt19937_64 rng(13);
  const OAEModel m = init_oae(small_arch(), 0.1, 17);
  const Eigen::MatrixXd batch = oracle::random_matrix(8, 4, rng);

  const OrthoLoss loss = ortho_loss(m, batch);
  CHECK(loss.total ==
        doctest::Approx(loss.reconstruction + 0.1 * loss.orthogonality)
            .epsilon(1e-12));

  // independent recomputation from the public forward passes
  double recon = 0.0;
  Eigen::MatrixXd Z(8, 3);
  for (int i = 0; i < 8; ++i) {
    const Eigen::VectorXd x = batch.row(i).transpose();
    recon += (reconstruct(m, x) - x).squaredNorm();
    Z.row(i) = encode(m, x).transpose();
  }
  recon /= 8.0 * 4.0;
  const Eigen::MatrixXd gram = Z.transpose() * Z / 8.0;
  const double orth = (gram - Eigen::MatrixXd::Identity(3, 3)).squaredNorm();
  CHECK(loss.reconstruction == doctest::Approx(recon).epsilon(1e-12));
  CHECK(loss.orthogonality == doctest::Approx(orth).epsilon(1e-12));

  CHECK_THROWS_AS(ortho_loss(m, batch.topRows(1)), std::invalid_argument);
}

TEST_CASE("orthonormal bottleneck batch has zero penalty") {
  OAEArchitecture arch;
  arch.layer_sizes = {1, 1};
  OAEModel m = init_oae(arch, 0.1, 1);
  m.layers[0].W(0, 0) = 1.0; // encode is the identity on one variable
  m.layers[1].W(0, 0) = 1.0;
  Eigen::MatrixXd batch(2, 1);
  batch << 1.0, -1.0; // Z^T Z / b = 1 exactly
  const OrthoLoss loss = ortho_loss(m, batch);
  CHECK(loss.orthogonality == 0.0);
  CHECK(loss.reconstruction == 0.0);
}

TEST_CASE("lambda 0 reduces total to reconstruction") {
  std::mt19937_64 rng(19);
  const OAEModel m = init_oae(small_arch(), 0.0, 23);
  const Eigen::MatrixXd batch = oracle::random_matrix(6, 4, rng);
  const OrthoLoss loss = ortho_loss(m, batch);
  CHECK(loss.total == loss.reconstruction);
}

TEST_CASE("analytic gradients match central finite differences") {
  std::mt19937_64 rng(23);
  const OAEModel m = init_oae(small_arch(), 0.1, 31);
  const Eigen::MatrixXd batch = oracle::random_matrix(8, 4, rng);
  CHECK(oracle::gradient_check(m, batch, 1e-5) < 1e-5);
}

TEST_CASE("gradients vanish at a perfect linear reconstruction") {
  OAEArchitecture arch;
  arch.layer_sizes = {2, 2};
  OAEModel m = init_oae(arch, 0.0, 1);
  m.layers[0].W.setIdentity();
  m.layers[1].W.setIdentity();
  std::mt19937_64 rng(29);
  const Eigen::MatrixXd batch = oracle::random_matrix(6, 2, rng);
  const auto grads = backprop(m, batch);
  for (const LayerGrad& g : grads) {
    CHECK(g.dW.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.db.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("orthogonality gradient switches off with lambda") {
  std::mt19937_64 rng(31);
  OAEModel with = init_oae(small_arch(), 0.5, 37);
  OAEModel without = with;
  without.lambda = 0.0;
  const Eigen::MatrixXd batch = oracle::random_matrix(8, 4, rng);
  const auto g_with = backprop(with, batch);
  const auto g_without = backprop(without, batch);
  // encoder gradients must differ, and the lambda=0 ones are pure recon
  bool differs = false;
  for (size_t l = 0; l < with.encoder_layers(); ++l)
    differs |= (g_with[l].dW - g_without[l].dW).cwiseAbs().maxCoeff() > 1e-12;
  CHECK(differs);
  CHECK(oracle::gradient_check(without, batch, 1e-5) < 1e-5);
}

TEST_CASE("training recovers a linear low-rank map") {
  // x = T * M with a 2-dim latent, noiseless; a [4,8,2] net must nail it
  std::mt19937_64 rng(37);
  const Eigen::MatrixXd latent = oracle::random_matrix(400, 2, rng);
  const Eigen::MatrixXd mix = oracle::random_matrix(2, 4, rng);
  Eigen::MatrixXd data = latent * mix;
  // standardized units
  for (int j = 0; j < 4; ++j) {
    const double mean = data.col(j).mean();
    data.col(j) =
        (data.col(j).array() - mean) / oracle::sample_std(data.col(j));
  }

  OAEArchitecture arch;
  arch.layer_sizes = {4, 8, 2};
  TrainConfig cfg;
  cfg.max_epochs = 2000;
  cfg.patience = 80;
  cfg.batch_size = 32;
  cfg.seed = 5;
  const OAEModel m = train_oae(data, arch, 0.0, cfg);
  CHECK(ortho_loss(m, data).reconstruction < 1e-3);
}

TEST_CASE("training is deterministic under a fixed seed") {
  std::mt19937_64 rng(41);
  const Eigen::MatrixXd data = oracle::random_matrix(120, 4, rng);
  OAEArchitecture arch;
  arch.layer_sizes = {4, 6, 2};
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.batch_size = 16;
  cfg.seed = 9;
  const OAEModel a = train_oae(data, arch, 0.1, cfg);
  const OAEModel b = train_oae(data, arch, 0.1, cfg);
  REQUIRE(a.train_log.size() == b.train_log.size());
  for (size_t i = 0; i < a.train_log.size(); ++i) {
    CHECK(a.train_log[i].train_loss == b.train_log[i].train_loss);
    CHECK(a.train_log[i].val_loss == b.train_log[i].val_loss);
  }
  for (size_t l = 0; l < a.layers.size(); ++l)
    CHECK((a.layers[l].W - b.layers[l].W).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("returned model is the best validation epoch") {
  std::mt19937_64 rng(43);
  const Eigen::MatrixXd data = oracle::random_matrix(150, 4, rng);
  OAEArchitecture arch;
  arch.layer_sizes = {4, 10, 3};
  TrainConfig cfg;
  cfg.max_epochs = 60;
  cfg.batch_size = 16;
  cfg.seed = 3;
  const OAEModel m = train_oae(data, arch, 0.05, cfg);
  REQUIRE_FALSE(m.train_log.empty());
  const Eigen::MatrixXd val = data.bottomRows(30);
  const double returned = ortho_loss(m, val).total;
  for (const EpochLog& log : m.train_log)
    CHECK(returned <= log.val_loss + 1e-12);
}

TEST_CASE("training rejects undersized datasets") {
  std::mt19937_64 rng(47);
  const Eigen::MatrixXd tiny = oracle::random_matrix(6, 4, rng);
  TrainConfig cfg;
  cfg.validation_fraction = 0.2; // 1-row validation split
  CHECK_THROWS_AS(train_oae(tiny, small_arch(), 0.1, cfg),
                  std::invalid_argument);
}

TEST_CASE("save/load round-trips byte for byte") {
  std::mt19937_64 rng(53);
  const Eigen::MatrixXd data = oracle::random_matrix(100, 4, rng);
  OAEArchitecture arch;
  arch.layer_sizes = {4, 6, 2};
  TrainConfig cfg;
  cfg.max_epochs = 10;
  cfg.batch_size = 16;
  cfg.seed = 11;
  const OAEModel m = train_oae(data, arch, 0.1, cfg);

  namespace fs = std::filesystem;
  const std::string p1 = (fs::temp_directory_path() / "oae_a.txt").string();
  const std::string p2 = (fs::temp_directory_path() / "oae_b.txt").string();
  save_oae(m, p1);
  const OAEModel loaded = load_oae(p1);
  save_oae(loaded, p2);

  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().size() > 100);

  std::mt19937_64 rng2(54);
  const Eigen::VectorXd x = oracle::random_vector(4, rng2);
  CHECK((reconstruct(m, x) - reconstruct(loaded, x)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("load rejects malformed files") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "oae_bad.txt").string();
  {
    std::ofstream out(path);
    out << "not-a-model\n";
  }
  CHECK_THROWS_AS(load_oae(path), std::runtime_error);
  CHECK_THROWS_AS(load_oae("/nonexistent/oae.txt"), std::runtime_error);
}
