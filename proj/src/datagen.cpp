#include "sal/datagen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sal {

namespace {

constexpr std::uint64_t kDefaultStructureSeed = 20240616ull;

// Table-style variable identifiers for the 16-variable fixture.
const char* const kXmeasNames[16] = {
    "XMEAS_1",  "XMEAS_2",  "XMEAS_3",  "XMEAS_4", "XMEAS_5",  "XMEAS_6",
    "XMEAS_9",  "XMEAS_10", "XMEAS_11", "XMEAS_13", "XMEAS_14", "XMEAS_16",
    "XMEAS_18", "XMEAS_19", "XMEAS_21", "XMEAS_22"};

} // namespace

ProcessSpec ProcessSpec::random_structure(int observed_dim, int latent_dim,
                                          std::uint64_t structure_seed) {
  if (observed_dim < 1 || latent_dim < 1)
    throw std::invalid_argument("ProcessSpec: dimensions must be >= 1");
  ProcessSpec spec;
  spec.latent_dim = latent_dim;
  spec.observed_dim = observed_dim;

  std::mt19937_64 rng(structure_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> coef(0.35, 0.85);
  std::uniform_int_distribution<int> latent(0, latent_dim - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  spec.mixing.resize(observed_dim, latent_dim);
  for (int j = 0; j < observed_dim; ++j)
    for (int r = 0; r < latent_dim; ++r) spec.mixing(j, r) = normal(rng);

  spec.quad_latent.resize(observed_dim);
  spec.quad_coef.resize(observed_dim);
  spec.inter_a.resize(observed_dim);
  spec.inter_b.resize(observed_dim);
  spec.inter_coef.resize(observed_dim);
  for (int j = 0; j < observed_dim; ++j) {
    spec.quad_latent(j) = latent(rng);
    const double qc = coef(rng) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    spec.quad_coef(j) = unit(rng) < 0.5 ? qc : 0.0;
    spec.inter_a(j) = latent(rng);
    spec.inter_b(j) = latent(rng);
    const double ic = coef(rng) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    spec.inter_coef(j) = unit(rng) < 0.5 ? ic : 0.0;
  }
  // the misspecification must actually be present
  if (latent_dim >= 2) {
    spec.quad_coef(0) = 0.6;
    spec.quad_latent(0) = 1;
    spec.inter_coef(1 % observed_dim) = 0.5;
    spec.inter_a(1 % observed_dim) = 0;
    spec.inter_b(1 % observed_dim) = 1;
  }

  spec.noise_std = Eigen::VectorXd::Constant(observed_dim, 0.1);
  return spec;
}

// Default plant: eight noisy linear gauges (two per latent, opposite signs)
// and eight precise nonlinear gauges (four squares, four pair products).
// A linear model can only exploit the noisy half, while the nonlinear
// gauges carry most of the latent information in a form only a nonlinear
// encoder can fuse.
ProcessSpec ProcessSpec::defaults() {
  ProcessSpec spec;
  spec.latent_dim = 4;
  spec.observed_dim = 16;

  std::mt19937_64 rng(kDefaultStructureSeed);
  std::uniform_real_distribution<double> gain(0.6, 1.0);
  std::uniform_real_distribution<double> gauge(0.9, 1.3);

  spec.mixing = Eigen::MatrixXd::Zero(16, 4);
  spec.quad_latent = Eigen::VectorXi::Zero(16);
  spec.quad_coef = Eigen::VectorXd::Zero(16);
  spec.inter_a = Eigen::VectorXi::Zero(16);
  spec.inter_b = Eigen::VectorXi::Zero(16);
  spec.inter_coef = Eigen::VectorXd::Zero(16);
  spec.noise_std = Eigen::VectorXd::Zero(16);

  for (int j = 0; j < 8; ++j) {
    spec.mixing(j, j % 4) = gain(rng) * (j < 4 ? 1.0 : -1.0);
    spec.noise_std(j) = 1.0;
  }
  for (int j = 8; j < 12; ++j) {
    spec.quad_latent(j) = j - 8;
    spec.quad_coef(j) = gauge(rng) * (j % 2 ? -1.0 : 1.0);
    spec.noise_std(j) = 0.15;
  }
  const int pair_a[4] = {0, 1, 2, 0};
  const int pair_b[4] = {1, 2, 3, 3};
  for (int j = 12; j < 16; ++j) {
    spec.inter_a(j) = pair_a[j - 12];
    spec.inter_b(j) = pair_b[j - 12];
    spec.inter_coef(j) = gauge(rng) * (j % 2 ? -1.0 : 1.0);
    spec.noise_std(j) = 0.15;
  }
  return spec;
}

void ProcessSpec::validate() const {
  if (latent_dim < 1 || observed_dim < 1)
    throw std::invalid_argument("ProcessSpec: dimensions must be >= 1");
  if (!(std::abs(ar_coefficient) < 1.0))
    throw std::invalid_argument("ProcessSpec: |phi| must be < 1");
  if (mixing.rows() != observed_dim || mixing.cols() != latent_dim)
    throw std::invalid_argument("ProcessSpec: mixing shape mismatch");
  const auto check_len = [&](Eigen::Index len, const char* what) {
    if (len != observed_dim)
      throw std::invalid_argument(std::string("ProcessSpec: ") + what +
                                  " length mismatch");
  };
  check_len(quad_latent.size(), "quad_latent");
  check_len(quad_coef.size(), "quad_coef");
  check_len(inter_a.size(), "inter_a");
  check_len(inter_b.size(), "inter_b");
  check_len(inter_coef.size(), "inter_coef");
  check_len(noise_std.size(), "noise_std");
  for (int j = 0; j < observed_dim; ++j) {
    if (quad_latent(j) < 0 || quad_latent(j) >= latent_dim ||
        inter_a(j) < 0 || inter_a(j) >= latent_dim || inter_b(j) < 0 ||
        inter_b(j) >= latent_dim)
      throw std::invalid_argument("ProcessSpec: latent index out of range");
    if (noise_std(j) < 0.0)
      throw std::invalid_argument("ProcessSpec: negative noise_std");
  }
  if (response_noise_std < 0.0)
    throw std::invalid_argument("ProcessSpec: negative response_noise_std");
}

double response_fn(const Eigen::VectorXd& t) {
  // Mostly linear in the latents plus mild curvature; extra latents past
  // the fourth contribute linearly with decaying weight.
  const Eigen::Index q = t.size();
  double y = 0.0;
  const double w[4] = {1.0, 0.8, -0.6, 0.5};
  for (Eigen::Index r = 0; r < q; ++r)
    y += (r < 4 ? w[r] : 0.3 / static_cast<double>(r)) * t(r);
  if (q >= 2) y += 0.2 * t(0) * t(1);
  if (q >= 3) y -= 0.15 * (t(2) * t(2) - 1.0);
  return y;
}

RawDataset generate(const ProcessSpec& spec, Eigen::Index n) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");

  const int q = spec.latent_dim;
  const int p = spec.observed_dim;
  const double phi = spec.ar_coefficient;
  const double innovation = std::sqrt(1.0 - phi * phi);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  RawDataset data;
  data.features.resize(n, p);
  Eigen::VectorXd y(n);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(q);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (int r = 0; r < q; ++r) {
      const double eta = normal(rng);
      t(r) = i == 0 ? eta : phi * t(r) + innovation * eta;
    }
    for (int j = 0; j < p; ++j) {
      double x = spec.mixing.row(j).dot(t);
      const double tq = t(spec.quad_latent(j));
      x += spec.quad_coef(j) * (tq * tq - 1.0); // centered square
      x += spec.inter_coef(j) * t(spec.inter_a(j)) * t(spec.inter_b(j));
      x += spec.noise_std(j) * normal(rng);
      data.features(i, j) = x;
    }
    y(i) = response_fn(t) + spec.response_noise_std * normal(rng);
  }
  data.response = std::move(y);

  data.feature_names.reserve(p);
  if (p == 16)
    for (const char* name : kXmeasNames) data.feature_names.push_back(name);
  else
    for (int j = 0; j < p; ++j)
      data.feature_names.push_back("x" + std::to_string(j + 1));
  return data;
}

Splits split(const RawDataset& data, const SplitFractions& fractions,
             bool contiguous) {
  const double fh = fractions.history;
  const double fs = fractions.stream;
  const double ft = fractions.test;
  if (fh <= 0.0 || fs <= 0.0 || ft <= 0.0)
    throw std::invalid_argument("split: fractions must be positive");
  if (fh + fs + ft > 1.0 + 1e-12)
    throw std::invalid_argument("split: fractions must sum to at most 1");
  if (!data.has_response())
    throw std::invalid_argument("split: dataset needs a response");

  const Eigen::Index n = data.rows();
  const auto count = [&](double f) {
    return static_cast<Eigen::Index>(std::floor(f * static_cast<double>(n)));
  };
  const Eigen::Index nh = count(fh);
  const Eigen::Index ns = count(fs);
  const Eigen::Index nt = count(ft);
  if (nh < 1 || ns < 1 || nt < 1)
    throw std::invalid_argument("split: a part would be empty");

  std::vector<Eigen::Index> ih, is, it;
  if (contiguous) {
    for (Eigen::Index i = 0; i < nh; ++i) ih.push_back(i);
    for (Eigen::Index i = 0; i < ns; ++i) is.push_back(nh + i);
    for (Eigen::Index i = 0; i < nt; ++i) it.push_back(nh + ns + i);
  } else {
    // proportional dealing, order preserved within each part
    const Eigen::Index total = nh + ns + nt;
    std::vector<Eigen::Index>* parts[3] = {&ih, &is, &it};
    const Eigen::Index want[3] = {nh, ns, nt};
    Eigen::Index err[3] = {0, 0, 0};
    for (Eigen::Index i = 0; i < total; ++i) {
      int best = -1;
      for (int p = 0; p < 3; ++p) {
        err[p] += want[p];
        if (parts[p]->size() < static_cast<size_t>(want[p]) &&
            (best < 0 || err[p] > err[best]))
          best = p;
      }
      err[best] -= total;
      parts[best]->push_back(i);
    }
  }

  const auto take = [&](const std::vector<Eigen::Index>& idx,
                        bool keep_response) {
    RawDataset part;
    part.feature_names = data.feature_names;
    part.features.resize(static_cast<Eigen::Index>(idx.size()), data.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) {
      part.features.row(static_cast<Eigen::Index>(i)) =
          data.features.row(idx[i]);
      y(static_cast<Eigen::Index>(i)) = (*data.response)(idx[i]);
    }
    if (keep_response) part.response = std::move(y);
    return part;
  };

  Splits out;
  out.history = take(ih, false);
  out.stream_data = take(is, true);
  out.test = take(it, true);
  return out;
}

} // namespace sal
