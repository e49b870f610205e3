#pragma once

#include <Eigen/Dense>

#include "gibbslab/errors.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab {

/// Closed-form moments of the Gaussian measure exp(-x^T M x - s^T x).
template <typename Scalar>
struct GaussianOracle {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix covariance;  // (2M)^-1
  Vector mean;        // -(2M)^-1 s
  Scalar gap{};       // lambda_min(2M)

  /// int |d_k phi|^2 for f = x_i, as a vector over k.
  Vector directional_energies(Eigen::Index i) const { return covariance.row(i).cwiseAbs2().transpose(); }
};

template <typename DerivedM, typename DerivedS>
GaussianOracle<typename DerivedM::Scalar> gaussian_oracle(const Eigen::MatrixBase<DerivedM>& m,
                                                          const Eigen::MatrixBase<DerivedS>& s) {
  using Scalar = typename DerivedM::Scalar;
  using Matrix = typename GaussianOracle<Scalar>::Matrix;
  const Matrix two_m = Scalar(2) * m.derived();
  Eigen::LLT<Matrix> llt(two_m);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotPositiveDefinite, "2M has no Cholesky factor");
  Eigen::SelfAdjointEigenSolver<Matrix> es(two_m, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()[0] > Scalar(0))) throw Error(ErrorKind::NotPositiveDefinite, "lambda_min(2M) <= 0");

  GaussianOracle<Scalar> out;
  out.covariance = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  out.covariance = Scalar(0.5) * (out.covariance + out.covariance.transpose());
  out.mean = s.size() == 0 ? GaussianOracle<Scalar>::Vector::Zero(m.rows()).eval()
                           : (-(out.covariance * s.derived())).eval();
  out.gap = es.eigenvalues()[0];
  return out;
}

template <typename DerivedM>
GaussianOracle<typename DerivedM::Scalar> gaussian_oracle(const Eigen::MatrixBase<DerivedM>& m) {
  return gaussian_oracle(m, Eigen::Matrix<typename DerivedM::Scalar, Eigen::Dynamic, 1>());
}

/// Oracle for a Gaussian-potential model, boundary coupling included in
/// the effective field.
inline GaussianOracle<double> gaussian_oracle(const ModelSpec& model) {
  for (const auto& psi : model.potentials)
    if (psi.name != "gaussian") throw Error(ErrorKind::InvalidArgument, "closed form needs psi == 0, got " + psi.name);
  return gaussian_oracle(model.interaction, (model.field + 2.0 * model.boundary_field).eval());
}

}  // namespace gibbslab
