#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab {

/// Single-site potential psi = psi_c + psi_b with psi_c convex and
/// |psi_b| + |psi_b'| <= bound.
struct Potential {
  std::string name;
  std::function<double(double)> convex;
  std::function<double(double)> convex_derivative;
  std::function<double(double)> bounded;
  std::function<double(double)> bounded_derivative;
  double bound = 0.0;

  double value(double r) const { return convex(r) + bounded(r); }
  double derivative(double r) const { return convex_derivative(r) + bounded_derivative(r); }

  static Potential gaussian();
  static Potential quartic();
  /// r^4/4 + a cos(r), declared bound 2|a|.
  static Potential bumped_quartic(double amplitude);
};

/// psi(r) == psi(-r) on a sample grid.
bool is_symmetric(const Potential& p);

/// Translation-invariant off-diagonal coupling depending on the l-infinity
/// distance only. `offdiag(r)` is queried for r >= 1.
struct InteractionKernel {
  std::string name;
  double diagonal = 1.0;
  std::function<double(std::int64_t)> offdiag;

  /// M_ij = -+ amplitude (1 + r)^(-exponent); sign negative when ferromagnetic.
  static InteractionKernel power_law(double amplitude, double exponent, double diagonal, bool ferromagnetic);
  /// M_ij = coupling at r == 1, zero beyond.
  static InteractionKernel nearest_neighbor(double coupling, double diagonal);
};

/// Claimed algebraic decay |M_ij| <= constant (1 + |i-j|)^(-exponent).
struct DecayClaim {
  double constant = 0.0;
  double exponent = 0.0;
};

/// Fixed spin outside the lattice.
struct ExteriorSpin {
  Site site;
  double value = 0.0;
};

/// Raw ingredients for build_model. Either `interaction` (explicit matrix over
/// the lattice, no exterior couplings) or `kernel` must be set.
struct ModelInput {
  Lattice lattice;
  std::vector<Potential> potentials;  // one per site, or a single shared one
  Eigen::VectorXd field;              // empty means zero
  std::optional<Eigen::MatrixXd> interaction;
  std::optional<InteractionKernel> kernel;
  std::vector<ExteriorSpin> boundary;
  std::optional<DecayClaim> decay;
  double coupling_cutoff = 1e-12;
  std::optional<std::int64_t> shell_width;  // default 3 x max extent
};

/// Validated finite-volume model. Immutable after build_model.
///
/// Energy convention: H(x) = sum_i psi_i(x_i) + s_i x_i + sum_{i,j} M_ij x_i x_j
///                           + 2 sum_{i in L, j not in L} M_ij x_i w_j,
/// so distinct sites couple through 2 M_ij.
struct ModelSpec {
  Lattice lattice;
  std::vector<Potential> potentials;
  Eigen::VectorXd field;
  Eigen::MatrixXd interaction;  // M restricted to the lattice
  std::optional<InteractionKernel> kernel;
  std::vector<ExteriorSpin> boundary;  // only nonzero spins with coupling above cutoff
  Eigen::VectorXd boundary_field;      // b_i = sum_j M_ij w_j
  Eigen::VectorXd shell_row_sum;       // sum over the truncated shell of |M_ij|
  DecayClaim decay;
  double delta = 0.0;  // diagonal-dominance margin
  double coupling_cutoff = 1e-12;
  std::int64_t shell_width = 0;

  std::size_t size() const { return lattice.size(); }

  /// M_ij between lattice site i and an exterior site (zero without a kernel).
  double exterior_coupling(std::size_t i, const Site& j) const;
  Eigen::VectorXd exterior_column(const Site& j) const;

  bool ferromagnetic() const;
  bool has_zero_boundary() const;
};

ModelSpec build_model(const ModelInput& input);

/// Explicit-matrix model with shared potential and optional field.
ModelSpec model_from_matrix(const Eigen::MatrixXd& m, const Potential& potential = Potential::gaussian(),
                            const Eigen::VectorXd& field = {});

double energy(const ModelSpec& model, const Eigen::VectorXd& x);
Eigen::VectorXd grad_energy(const ModelSpec& model, const Eigen::VectorXd& x);

/// Off-diagonal couplings replaced by -|M_ij| (kernel included).
ModelSpec ferromagnetize(const ModelSpec& model);

/// Same model with a different exterior configuration (revalidated).
ModelSpec with_boundary(const ModelSpec& model, std::vector<ExteriorSpin> boundary);

/// Shell sites whose coupling to some lattice site exceeds the cutoff.
std::vector<Site> coupled_shell(const ModelSpec& model);

/// Stable hash of everything that determines the measure.
std::uint64_t fingerprint(const ModelSpec& model);

}  // namespace gibbslab
