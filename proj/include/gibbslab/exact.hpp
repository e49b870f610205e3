#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gibbslab/model.hpp"

namespace gibbslab {

struct GridSpec {
  double half_width = 0.0;  // <= 0 selects 6 / sqrt(delta)
  std::size_t points_per_site = 64;
  std::size_t budget = 200000;  // max product-grid states
};

/// Tensor-grid discretisation of the Gibbs measure. State u has coordinate
/// index (u / stride[i]) % n at site i.
struct GridMeasure {
  GridSpec spec;
  double half_width = 0.0;
  double step = 0.0;
  Eigen::VectorXd abscissae;  // shared by all sites
  std::size_t sites = 0;
  std::vector<std::size_t> strides;
  Eigen::VectorXd log_weights;  // normalised
  Eigen::VectorXd weights;
  double log_norm = 0.0;  // log Z of the discretised measure (Riemann sum)

  std::size_t points() const { return static_cast<std::size_t>(abscissae.size()); }
  std::size_t states() const { return static_cast<std::size_t>(weights.size()); }
  std::size_t grid_index(std::size_t state, std::size_t site) const { return (state / strides[site]) % points(); }
  double coordinate(std::size_t state, std::size_t site) const { return abscissae[static_cast<Eigen::Index>(grid_index(state, site))]; }

  /// x_i as a grid function.
  Eigen::VectorXd coordinate_function(std::size_t site) const;
  /// Any function of the configuration as a grid function.
  Eigen::VectorXd tabulate(const std::function<double(const Eigen::VectorXd&)>& f) const;
};

GridMeasure build_grid_measure(const ModelSpec& model, const GridSpec& grid);

double expectation(const GridMeasure& gm, const Eigen::VectorXd& f);
double covariance(const GridMeasure& gm, const Eigen::VectorXd& f, const Eigen::VectorXd& g);
/// E[x_i].
double moment(const GridMeasure& gm, std::size_t i);
/// E[x_i x_j].
double moment(const GridMeasure& gm, std::size_t i, std::size_t j);
double coordinate_covariance(const GridMeasure& gm, std::size_t i, std::size_t j);
Eigen::MatrixXd covariance_matrix(const GridMeasure& gm);

/// Dirichlet form on the product-grid graph with edge weights
/// sqrt(mu_u mu_v) / h^2, in symmetrised form S = D^-1/2 K D^-1/2 whose
/// kernel is spanned by sqrt(mu). The measure must outlive the handle.
struct GeneratorHandle {
  const GridMeasure* measure = nullptr;
  Eigen::VectorXd sqrt_mu;
  Eigen::VectorXd diagonal;  // S_uu
  double inv_h2 = 0.0;       // -S_uv on every edge

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;
};

GeneratorHandle build_generator(const GridMeasure& gm);

/// E(f, g) by explicit edge summation.
double dirichlet_form(const GeneratorHandle& gen, const Eigen::VectorXd& f, const Eigen::VectorXd& g);
/// Per-axis (site) split of E(f, f).
Eigen::VectorXd directional_energies(const GeneratorHandle& gen, const Eigen::VectorXd& f);

struct PoissonOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

struct PoissonSolution {
  Eigen::VectorXd phi;  // mean zero under the grid measure
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Solves E(xi, phi) = <xi, f - E f> for all xi.
PoissonSolution solve_poisson(const GeneratorHandle& gen, const Eigen::VectorXd& f, const PoissonOptions& opts = {});
Eigen::VectorXd directional_energies(const GeneratorHandle& gen, const PoissonSolution& sol);

struct GapOptions {
  std::size_t block = 4;
  double shift = 0.01;
  double tolerance = 1e-8;
  std::size_t max_iterations = 1000;
};

struct SpectralGapEstimate {
  double gap = 0.0;
  std::string method = "eigensolve";
  GridSpec discretization;
  Eigen::VectorXd eigenfunction;  // mean zero, unit variance
  std::size_t iterations = 0;
};

SpectralGapEstimate spectral_gap(const GeneratorHandle& gen, const GapOptions& opts = {});

}  // namespace gibbslab
