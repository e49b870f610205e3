#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gibbslab/model.hpp"

namespace gibbslab {

enum class Scheme { RandomScanMetropolis, Mala };

struct ChainConfig {
  std::size_t steps = 100000;  // sweeps (Metropolis) or full moves (MALA)
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  double proposal_sd = 1.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::RandomScanMetropolis;
};

struct SampleBatch {
  Eigen::MatrixXd samples;  // sites x samples
  double accept_rate = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;

  std::size_t size() const { return static_cast<std::size_t>(samples.cols()); }
};

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_batches = 0;
};

SampleBatch run_chain(const ModelSpec& model, const ChainConfig& cfg, const Eigen::VectorXd& initial = {});

/// Batch-means estimate of the mean of a scalar series.
EstimateWithError batch_means(const Eigen::Ref<const Eigen::VectorXd>& series, std::size_t n_batches = 32);

EstimateWithError estimate_mean(const SampleBatch& batch, std::size_t i, std::size_t n_batches = 32);
EstimateWithError estimate_cov(const SampleBatch& batch, std::size_t i, std::size_t j, std::size_t n_batches = 32);
EstimateWithError estimate_cov(const SampleBatch& batch, const Lattice& lattice, const Site& i, const Site& j,
                               std::size_t n_batches = 32);

/// |E[x_obs] under w + delta e_k  -  E[x_obs] under w|, from two chains
/// driven by the same random numbers.
EstimateWithError ds_influence(const ModelSpec& model, const Site& observable, const Site& boundary_site, double delta,
                               const ChainConfig& cfg);

struct VarianceRow {
  std::size_t boundary_index = 0;
  Site site;
  double variance = 0.0;
  double std_error = 0.0;
};

/// One chain per boundary condition, run in parallel.
std::vector<VarianceRow> variance_sweep(const ModelSpec& model, const std::vector<std::vector<ExteriorSpin>>& family,
                                        const ChainConfig& cfg);

/// min(1, exp(-dH)).
double metropolis_acceptance(double delta_energy);

/// Transition matrix of a Metropolis chain on a finite state space with a
/// symmetric proposal matrix.
Eigen::MatrixXd metropolis_kernel(const Eigen::VectorXd& energies, const Eigen::MatrixXd& proposal);

}  // namespace gibbslab
