#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/fit.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab {

/// p, q and kappa for one block center, indexed like the lattice.
struct BlockCoefficients {
  Site center;
  double radius = 1.5;
  Eigen::VectorXi p;
  Eigen::VectorXd q;
  Eigen::VectorXd kappa;
};

/// p_i = |B_R(k) n B_R(i)|,
/// q_i = 1/2 sum_{l in B_R(k) n B_R(i)} sum_{j not in B_R(l)} |M_ij|,
/// kappa_j = 1/2 sum_{l in B_R(k), |l - j| > R} sum_{i in B_R(l)} |M_ij|,
/// all sums clipped to the lattice.
BlockCoefficients coefficients(const ModelSpec& model, const Site& k, double R);

struct CoefficientRow {
  std::size_t d = 0;
  double R = 0.0;
  std::string quantity;
  std::string offset;
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct CoefficientReport {
  std::vector<double> radii;
  double epsilon = 0.1;
  double alpha = 0.0;      // kernel exponent minus 2d
  double alpha_bar = 0.0;  // min(alpha, 1)
  bool p_bound_holds = true;
  std::vector<CoefficientRow> rows;
  /// Ratio family name -> one value per radius.
  std::vector<std::pair<std::string, std::vector<double>>> families;
  /// Families whose value increases strictly across the whole radius list.
  std::vector<std::string> monotone_growth;
  /// Families whose successive increments shrink (bounded-looking growth).
  std::vector<std::string> saturating;
};

/// Sweeps R at the lattice center; "interior" means distance to the lattice
/// boundary above 4R.
CoefficientReport verify_coefficient_bounds(const ModelSpec& model, const std::vector<double>& radii,
                                            double epsilon = 0.1);

struct BlockMatrix {
  double radius = 1.5;
  double rho = 1.0;
  double C = 1.0;
  std::vector<Site> centers;
  Eigen::MatrixXd kappa_bar;
  Eigen::MatrixXd A;

  /// min_k (A_kk - sum_{j != k} |A_kj|).
  double dominance_margin() const;
  /// Index of the block containing lattice site s.
  std::size_t block_of(const Site& s) const;
};

/// Tile centers lower + floor(R) + m 2R along each axis, for every tile
/// meeting the lattice.
std::vector<Site> block_centers(const Lattice& lattice, double R);

BlockMatrix assemble_block_matrix(const ModelSpec& model, double R, double rho, double C = 1.0);

struct InverseDecay {
  Eigen::MatrixXd inverse;
  std::vector<FitPoint> pairs;  // (distance, entry) for every off-diagonal pair
  double min_entry = 0.0;
  bool nonnegative = true;
  std::optional<FitResult> fit;  // absent when no off-diagonal entry is positive
  double slope() const { return fit ? -fit->alpha_hat : 0.0; }
};

/// Inverse of a strictly diagonally dominant matrix; positions give the
/// distance between rows (defaults to |k - j|).
InverseDecay inverse_decay(const Eigen::MatrixXd& A, const std::vector<Site>& positions = {});
InverseDecay inverse_decay(const BlockMatrix& block);

/// Phi = A^-1 sum_{k in B_f} e_k mapped back to sites, where B_f holds the
/// blocks whose doubled ball meets supp f.
Eigen::VectorXd directional_bound(const ModelSpec& model, double R, double rho, const std::vector<Site>& support,
                                  double C = 1.0);

}  // namespace gibbslab
