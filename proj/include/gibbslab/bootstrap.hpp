#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/fit.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab {

/// Symmetric nonnegative pairwise covariance bounds over the lattice.
struct BoundField {
  Eigen::MatrixXd bounds;
  std::string provenance = "initial-power-law";

  /// (distance, bound) for every off-diagonal pair.
  std::vector<FitPoint> pairs(const Lattice& lattice) const;
};

/// Throws ConditionViolated unless the model is ferromagnetic, has zero
/// field and boundary, and symmetric single-site potentials.
void require_lebowitz_conditions(const ModelSpec& model);

/// J_ik = c sum_{n not in B_L(i)} |M_kn| B(i,n) for k in B_L(i), and
/// c sum_{n in B_L(i)} |M_kn| B(i,n) otherwise.
Eigen::MatrixXd compute_J(const ModelSpec& model, const BoundField& B, double L, double c = 2.0, bool soundness = true);

/// Row and column sums of J are all <= threshold.
bool is_admissible_L(const ModelSpec& model, const BoundField& B, double L, double c = 2.0, double threshold = 0.5);

/// Smallest admissible half-integer L up to half the largest extent.
double find_L(const ModelSpec& model, const BoundField& B, double c = 2.0, double threshold = 0.5, bool soundness = true);

/// sum_{k in A, n not in A} c |M_kn| [B(i,k) B(n,j) + B(i,n) B(k,j)].
double lebowitz_rhs(const BoundField& B, const ModelSpec& model, std::size_t i, std::size_t j,
                    const std::vector<std::size_t>& A, double c = 2.0);

/// One Jacobi sweep: pairs further apart than 3L take the min of the old
/// bound and both one-sided right-hand sides.
BoundField propagate(const BoundField& B, const ModelSpec& model, double L, double c = 2.0, bool soundness = true);

struct BootstrapParams {
  std::optional<double> L;  // found by find_L when absent
  double coupling_factor = 2.0;
  std::size_t max_iterations = 64;
  std::optional<double> target_alpha;  // defaults to decay exponent - d
  bool soundness = true;
};

struct BootstrapRow {
  std::size_t iteration = 0;
  double dist = 0.0;
  double max_bound = 0.0;
  double C_fit = 0.0;
  double alpha_fit = 0.0;
  double coupling = 0.0;
  double L = 0.0;
};

struct BootstrapResult {
  BoundField field;
  FitResult fit;     // alpha_hat here is the covariance exponent minus d
  double L = 0.0;
  std::size_t iterations = 0;
  std::vector<double> alpha_history;  // one entry per iteration, seed first
  std::vector<BootstrapRow> rows;
};

/// Envelope fit of a bound field; alpha_hat is reported relative to d.
FitResult fit_bound_envelope(const BoundField& B, const Lattice& lattice);

/// Seeds B(i,j) = C0 (1 + |i-j|)^-(d + alpha0) with the given diagonal
/// (C0 when empty) and iterates propagate.
BootstrapResult run_bootstrap(const ModelSpec& model, double C0, double alpha0, const BootstrapParams& params,
                              const Eigen::VectorXd& diagonal = {});

struct LebowitzSplit {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<std::size_t> A;
  double lhs = 0.0;
  double rhs = 0.0;       // at the requested coupling factor
  double rhs_unit = 0.0;  // at coupling factor 1
  double c_min = 0.0;
  bool holds = true;
};

struct LebowitzReport {
  Eigen::MatrixXd covariance;
  double coupling = 2.0;
  bool nonnegative = true;
  bool holds = true;
  double min_coupling = 0.0;  // smallest c for which every split holds
  std::vector<LebowitzSplit> splits;
};

/// Exhaustive check on a model with at most 4 sites, covariances by quadrature.
LebowitzReport verify_lebowitz_exact(const ModelSpec& model, double c = 2.0, std::optional<GridSpec> grid = {});

}  // namespace gibbslab
