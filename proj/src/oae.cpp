#include "sal/oae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sal {

namespace {

const char* activation_name(Activation a) {
  return a == Activation::Tanh ? "tanh" : "linear";
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "linear") return Activation::Linear;
  throw std::runtime_error("unknown activation '" + name + "'");
}

Eigen::MatrixXd apply_activation(Activation a, Eigen::MatrixXd pre) {
  if (a == Activation::Tanh) pre = pre.array().tanh().matrix();
  return pre;
}

void check_finite(const Eigen::MatrixXd& a, size_t layer) {
  if (!a.allFinite())
    throw std::runtime_error("oae forward: non-finite activation after layer " +
                             std::to_string(layer));
}

// Activations for every layer; activations[0] is the input batch,
// activations[i+1] the output of layers[i].
std::vector<Eigen::MatrixXd> forward(const OAEModel& m,
                                     const Eigen::MatrixXd& X,
                                     size_t layer_count) {
  if (X.cols() != m.input_dim())
    throw std::invalid_argument("oae forward: dimension mismatch");
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layer_count + 1);
  acts.push_back(X);
  for (size_t l = 0; l < layer_count; ++l) {
    const Layer& layer = m.layers[l];
    Eigen::MatrixXd pre =
        (acts.back() * layer.W.transpose()).rowwise() + layer.b.transpose();
    acts.push_back(apply_activation(layer.activation, std::move(pre)));
    check_finite(acts.back(), l);
  }
  return acts;
}

struct AdamState {
  Eigen::MatrixXd mW, vW;
  Eigen::VectorXd mb, vb;
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

void adam_step(OAEModel& m, const std::vector<LayerGrad>& grads,
               std::vector<AdamState>& state, long t, double lr) {
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
  for (size_t l = 0; l < m.layers.size(); ++l) {
    AdamState& s = state[l];
    const LayerGrad& g = grads[l];
    s.mW = kAdamBeta1 * s.mW + (1.0 - kAdamBeta1) * g.dW;
    s.vW = kAdamBeta2 * s.vW.array().matrix() +
           (1.0 - kAdamBeta2) * g.dW.array().square().matrix();
    s.mb = kAdamBeta1 * s.mb + (1.0 - kAdamBeta1) * g.db;
    s.vb = kAdamBeta2 * s.vb.array().matrix() +
           (1.0 - kAdamBeta2) * g.db.array().square().matrix();
    m.layers[l].W.array() -=
        lr * (s.mW.array() / c1) / ((s.vW.array() / c2).sqrt() + kAdamEps);
    m.layers[l].b.array() -=
        lr * (s.mb.array() / c1) / ((s.vb.array() / c2).sqrt() + kAdamEps);
  }
}

} // namespace

OAEArchitecture OAEArchitecture::defaults() {
  OAEArchitecture arch;
  arch.layer_sizes = {16, 160, 80, 40, 20, 10};
  return arch;
}

void OAEArchitecture::validate() const {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("OAEArchitecture: need at least 2 layer sizes");
  for (int s : layer_sizes)
    if (s < 1)
      throw std::invalid_argument("OAEArchitecture: layer sizes must be >= 1");
}

OAEModel init_oae(const OAEArchitecture& arch, double lambda,
                  std::uint64_t seed) {
  arch.validate();
  OAEModel m;
  m.architecture = arch;
  m.lambda = lambda;

  const size_t enc = arch.layer_sizes.size() - 1;
  std::vector<std::pair<int, int>> shapes; // (in, out) per affine layer
  for (size_t i = 0; i < enc; ++i)
    shapes.emplace_back(arch.layer_sizes[i], arch.layer_sizes[i + 1]);
  for (size_t i = 0; i < enc; ++i)
    shapes.emplace_back(arch.layer_sizes[enc - i], arch.layer_sizes[enc - i - 1]);

  std::mt19937_64 rng(seed);
  for (size_t l = 0; l < shapes.size(); ++l) {
    const auto [in, out] = shapes[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> unif(-limit, limit);
    Layer layer;
    layer.W.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < in; ++c) layer.W(r, c) = unif(rng);
    layer.b = Eigen::VectorXd::Zero(out);
    // bottleneck (last encoder layer) and decoder output are linear
    const bool linear = (l == enc - 1) || (l == shapes.size() - 1);
    layer.activation = linear ? Activation::Linear : arch.hidden_activation;
    m.layers.push_back(std::move(layer));
  }
  return m;
}

Eigen::MatrixXd encode(const OAEModel& m, const Eigen::MatrixXd& X) {
  return forward(m, X, m.encoder_layers()).back();
}

Eigen::VectorXd encode(const OAEModel& m, const Eigen::VectorXd& x) {
  return encode(m, Eigen::MatrixXd(x.transpose())).row(0).transpose();
}

Eigen::MatrixXd reconstruct(const OAEModel& m, const Eigen::MatrixXd& X) {
  return forward(m, X, m.layers.size()).back();
}

Eigen::VectorXd reconstruct(const OAEModel& m, const Eigen::VectorXd& x) {
  return reconstruct(m, Eigen::MatrixXd(x.transpose())).row(0).transpose();
}

OrthoLoss ortho_loss(const OAEModel& m, const Eigen::MatrixXd& batch) {
  const Eigen::Index b = batch.rows();
  if (b < 2) throw std::invalid_argument("ortho_loss: need a batch of >= 2");
  const auto acts = forward(m, batch, m.layers.size());
  const Eigen::MatrixXd& Z = acts[m.encoder_layers()];
  const Eigen::MatrixXd& Xhat = acts.back();

  OrthoLoss loss;
  loss.reconstruction = (Xhat - batch).squaredNorm() /
                        static_cast<double>(b * batch.cols());
  const Eigen::Index k = Z.cols();
  const Eigen::MatrixXd gram =
      (Z.transpose() * Z) / static_cast<double>(b);
  loss.orthogonality =
      (gram - Eigen::MatrixXd::Identity(k, k)).squaredNorm();
  loss.total = loss.reconstruction + m.lambda * loss.orthogonality;
  return loss;
}

std::vector<LayerGrad> backprop(const OAEModel& m,
                                const Eigen::MatrixXd& batch) {
  const Eigen::Index b = batch.rows();
  if (b < 2) throw std::invalid_argument("backprop: need a batch of >= 2");
  const size_t layer_count = m.layers.size();
  const size_t enc = m.encoder_layers();
  const auto acts = forward(m, batch, layer_count);
  const Eigen::MatrixXd& Z = acts[enc];
  const Eigen::MatrixXd& Xhat = acts.back();

  std::vector<LayerGrad> grads(layer_count);

  // d(recon)/d(Xhat); the orthogonality term joins at the bottleneck below.
  Eigen::MatrixXd dA =
      (2.0 / static_cast<double>(b * batch.cols())) * (Xhat - batch);

  for (size_t li = layer_count; li-- > 0;) {
    const Layer& layer = m.layers[li];
    Eigen::MatrixXd dPre;
    if (layer.activation == Activation::Tanh) {
      // tanh' = 1 - tanh^2, and acts[li+1] already holds tanh(pre)
      dPre = dA.array() * (1.0 - acts[li + 1].array().square());
    } else {
      dPre = std::move(dA);
    }
    grads[li].dW = dPre.transpose() * acts[li];
    grads[li].db = dPre.colwise().sum().transpose();
    dA = dPre * layer.W;
    if (li == enc && m.lambda != 0.0) {
      // d(orth)/dZ = (4/b) Z (G - I), G = Z^T Z / b
      const Eigen::Index k = Z.cols();
      const Eigen::MatrixXd gram =
          (Z.transpose() * Z) / static_cast<double>(b);
      dA += m.lambda * (4.0 / static_cast<double>(b)) *
            (Z * (gram - Eigen::MatrixXd::Identity(k, k)));
    }
  }
  return grads;
}

OAEModel train_oae(const Eigen::MatrixXd& data, const OAEArchitecture& arch,
                   double lambda, const TrainConfig& cfg) {
  arch.validate();
  if (data.cols() != arch.input_dim())
    throw std::invalid_argument("train_oae: data width does not match input");
  if (cfg.batch_size < 2)
    throw std::invalid_argument("train_oae: batch_size must be >= 2");
  if (cfg.patience < 1)
    throw std::invalid_argument("train_oae: patience must be >= 1");
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0))
    throw std::invalid_argument("train_oae: validation_fraction not in (0,1)");

  const Eigen::Index n = data.rows();
  const Eigen::Index n_val = static_cast<Eigen::Index>(
      std::floor(static_cast<double>(n) * cfg.validation_fraction));
  const Eigen::Index n_train = n - n_val;
  if (n_train < 2 || n_val < 2)
    throw std::invalid_argument(
        "train_oae: dataset too small for the validation split");

  // last 20% in index order serves as validation, respecting time order
  const Eigen::MatrixXd train = data.topRows(n_train);
  const Eigen::MatrixXd val = data.bottomRows(n_val);

  OAEModel model = init_oae(arch, lambda, cfg.seed);
  std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ull);

  std::vector<AdamState> adam(model.layers.size());
  for (size_t l = 0; l < model.layers.size(); ++l) {
    adam[l].mW = Eigen::MatrixXd::Zero(model.layers[l].W.rows(),
                                       model.layers[l].W.cols());
    adam[l].vW = adam[l].mW;
    adam[l].mb = Eigen::VectorXd::Zero(model.layers[l].b.size());
    adam[l].vb = adam[l].mb;
  }

  std::vector<Eigen::Index> perm(n_train);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<Layer> best_layers = model.layers;
  double best_val = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;
  long t = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);

    double loss_sum = 0.0;
    Eigen::Index rows_seen = 0;
    for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
      const Eigen::Index rows =
          std::min<Eigen::Index>(cfg.batch_size, n_train - start);
      if (rows < 2) break; // a 1-row tail cannot form a batch
      Eigen::MatrixXd batch(rows, data.cols());
      for (Eigen::Index i = 0; i < rows; ++i)
        batch.row(i) = train.row(perm[start + i]);

      const auto grads = backprop(model, batch);
      adam_step(model, grads, adam, ++t, cfg.learning_rate);

      const double batch_loss = ortho_loss(model, batch).total;
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_oae: diverged at epoch " +
                                 std::to_string(epoch));
      loss_sum += batch_loss * static_cast<double>(rows);
      rows_seen += rows;
    }

    EpochLog log;
    log.train_loss = loss_sum / static_cast<double>(rows_seen);
    log.val_loss = ortho_loss(model, val).total;
    if (!std::isfinite(log.val_loss))
      throw std::runtime_error("train_oae: diverged at epoch " +
                               std::to_string(epoch));
    model.train_log.push_back(log);

    if (log.val_loss < best_val) {
      best_val = log.val_loss;
      best_layers = model.layers;
      stale_epochs = 0;
    } else if (++stale_epochs >= cfg.patience) {
      break;
    }
  }

  model.layers = std::move(best_layers);
  return model;
}

void save_oae(const OAEModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_oae: cannot open '" + path + "'");
  out << "sal-oae-v1\n";
  out << "layer_sizes";
  for (int s : m.architecture.layer_sizes) out << ' ' << s;
  out << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", m.lambda);
  out << "lambda " << buf << '\n';
  out << "hidden_activation "
      << activation_name(m.architecture.hidden_activation) << '\n';
  out << "output_activation linear\n";

  std::string line;
  for (size_t l = 0; l < m.layers.size(); ++l) {
    const Layer& layer = m.layers[l];
    line.clear();
    line += "W" + std::to_string(l) + " " + std::to_string(layer.W.rows()) +
            " " + std::to_string(layer.W.cols());
    for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.W.cols(); ++c) {
        std::snprintf(buf, sizeof buf, " %.17g", layer.W(r, c));
        line += buf;
      }
    out << line << '\n';
    line.clear();
    line += "b" + std::to_string(l) + " " + std::to_string(layer.b.size());
    for (Eigen::Index r = 0; r < layer.b.size(); ++r) {
      std::snprintf(buf, sizeof buf, " %.17g", layer.b(r));
      line += buf;
    }
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("save_oae: write to '" + path + "' failed");
}

OAEModel load_oae(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_oae: cannot open '" + path + "'");
  std::string line, word;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw std::runtime_error(std::string("load_oae: truncated file, expected ") +
                               what);
    return std::istringstream(line);
  };

  {
    auto ss = next_line("magic");
    ss >> word;
    if (word != "sal-oae-v1")
      throw std::runtime_error("load_oae: '" + path + "' is not an oae model");
  }

  OAEArchitecture arch;
  {
    auto ss = next_line("layer_sizes");
    ss >> word;
    if (word != "layer_sizes")
      throw std::runtime_error("load_oae: expected layer_sizes");
    int s;
    while (ss >> s) arch.layer_sizes.push_back(s);
  }
  double lambda = 0.0;
  {
    auto ss = next_line("lambda");
    ss >> word >> lambda;
    if (word != "lambda") throw std::runtime_error("load_oae: expected lambda");
  }
  {
    auto ss = next_line("hidden_activation");
    ss >> word;
    if (word != "hidden_activation")
      throw std::runtime_error("load_oae: expected hidden_activation");
    ss >> word;
    arch.hidden_activation = parse_activation(word);
  }
  {
    auto ss = next_line("output_activation");
    ss >> word;
    if (word != "output_activation")
      throw std::runtime_error("load_oae: expected output_activation");
  }

  OAEModel m = init_oae(arch, lambda, 0);
  for (size_t l = 0; l < m.layers.size(); ++l) {
    {
      auto ss = next_line("weight tensor");
      Eigen::Index rows, cols;
      ss >> word >> rows >> cols;
      if (word != "W" + std::to_string(l) || rows != m.layers[l].W.rows() ||
          cols != m.layers[l].W.cols())
        throw std::runtime_error("load_oae: malformed tensor header in '" +
                                 path + "'");
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          if (!(ss >> m.layers[l].W(r, c)))
            throw std::runtime_error("load_oae: truncated weight tensor");
    }
    {
      auto ss = next_line("bias tensor");
      Eigen::Index size;
      ss >> word >> size;
      if (word != "b" + std::to_string(l) || size != m.layers[l].b.size())
        throw std::runtime_error("load_oae: malformed tensor header in '" +
                                 path + "'");
      for (Eigen::Index r = 0; r < size; ++r)
        if (!(ss >> m.layers[l].b(r)))
          throw std::runtime_error("load_oae: truncated bias tensor");
    }
  }
  return m;
}

} // namespace sal
