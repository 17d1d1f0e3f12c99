// Synthetic correlated-process generator. A low-dimensional AR(1) latent
// state drives many observed variables through a mixing map with quadratic
// and interaction terms, so the observed features are highly collinear and
// a linear model on them is misspecified, while the response is a fixed
// function of the latents. Stands in for a plant simulator at desk scale.
#pragma once

#include "sal/dataset.hpp"

#include <Eigen/Dense>
#include <cstdint>

namespace sal {

struct ProcessSpec {
  int latent_dim = 4;
  int observed_dim = 16;
  double ar_coefficient = 0.9; // |phi| < 1 keeps the latents stationary

  Eigen::MatrixXd mixing;      // observed_dim x latent_dim linear part
  Eigen::VectorXi quad_latent; // which latent each variable squares
  Eigen::VectorXd quad_coef;
  Eigen::VectorXi inter_a, inter_b; // latent pair per interaction term
  Eigen::VectorXd inter_coef;
  Eigen::VectorXd noise_std;   // per-variable observation noise

  double response_noise_std = 0.05;
  std::uint64_t seed = 0;

  // Deterministic default structure: fixed mixing coefficients independent
  // of `seed`, so different seeds replay the same process with fresh noise.
  static ProcessSpec defaults();

  // Rebuilds mixing/quad/interaction coefficients from a structure seed.
  static ProcessSpec random_structure(int observed_dim, int latent_dim,
                                      std::uint64_t structure_seed);

  void validate() const;
};

// The fixed latent -> response map (mostly linear with mild curvature, so
// the latents explain the response almost completely).
double response_fn(const Eigen::VectorXd& t);

// n rows of the process. Latents follow t_j = phi t_{j-1} + sqrt(1-phi^2) eta
// with standard normal eta, so each latent is marginally N(0,1). Column
// names follow the 16-variable XMEAS fixture when observed_dim == 16.
RawDataset generate(const ProcessSpec& spec, Eigen::Index n);

struct SplitFractions {
  double history = 0.4;
  double stream = 0.5;
  double test = 0.1;
};

struct Splits {
  RawDataset history;     // response dropped
  RawDataset stream_data; // labels present but meant to stay hidden
  RawDataset test;
};

// Contiguous time-ordered splits by default; contiguous = false deals rows
// round-robin in proportion to the fractions, preserving order within each
// part.
Splits split(const RawDataset& data, const SplitFractions& fractions,
             bool contiguous = true);

} // namespace sal
