#include "gibbslab/exact.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>

#include "gibbslab/errors.hpp"
#include "gibbslab/numerics.hpp"

namespace gibbslab {

namespace {

// Calls fn(u, v) for every grid edge along `site`.
template <typename Fn>
void for_each_edge(const GridMeasure& gm, std::size_t site, Fn&& fn) {
  const std::size_t st = gm.strides[site];
  const std::size_t n = gm.points();
  for (std::size_t u = 0; u < gm.states(); ++u) {
    if ((u / st) % n + 1 < n) fn(u, u + st);
  }
}

Eigen::VectorXd deflate(const Eigen::VectorXd& y, const Eigen::VectorXd& q) { return y - pairwise_dot(q, y) * q; }

}  // namespace

Eigen::VectorXd GridMeasure::coordinate_function(std::size_t site) const {
  Eigen::VectorXd f(static_cast<Eigen::Index>(states()));
  for (std::size_t u = 0; u < states(); ++u) f[static_cast<Eigen::Index>(u)] = coordinate(u, site);
  return f;
}

Eigen::VectorXd GridMeasure::tabulate(const std::function<double(const Eigen::VectorXd&)>& f) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(states()));
  Eigen::VectorXd x(static_cast<Eigen::Index>(sites));
  for (std::size_t u = 0; u < states(); ++u) {
    for (std::size_t i = 0; i < sites; ++i) x[static_cast<Eigen::Index>(i)] = coordinate(u, i);
    out[static_cast<Eigen::Index>(u)] = f(x);
  }
  return out;
}

GridMeasure build_grid_measure(const ModelSpec& model, const GridSpec& grid) {
  if (grid.points_per_site < 8) throw Error(ErrorKind::InvalidArgument, "need at least 8 points per site");
  GridMeasure gm;
  gm.spec = grid;
  gm.sites = model.size();
  gm.half_width = grid.half_width > 0 ? grid.half_width : 6.0 / std::sqrt(model.delta);
  const std::size_t n = grid.points_per_site;

  std::size_t states = 1;
  gm.strides.resize(gm.sites);
  for (std::size_t i = 0; i < gm.sites; ++i) {
    gm.strides[i] = states;
    if (states > grid.budget / n) {
      throw Error(ErrorKind::BudgetExceeded, std::to_string(n) + "^" + std::to_string(gm.sites) +
                                                 " states exceed the budget of " + std::to_string(grid.budget));
    }
    states *= n;
  }

  gm.step = 2.0 * gm.half_width / static_cast<double>(n - 1);
  gm.abscissae = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), -gm.half_width, gm.half_width);

  // Single-site parts tabulated once; pair parts added per state.
  const auto d = static_cast<Eigen::Index>(gm.sites);
  Eigen::MatrixXd table(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& psi = model.potentials[static_cast<std::size_t>(i)];
    const double mii = model.interaction(i, i);
    const double lin = model.field[i] + 2.0 * model.boundary_field[i];
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
      const double x = gm.abscissae[k];
      table(k, i) = psi.value(x) + lin * x + mii * x * x;
    }
  }

  gm.log_weights.resize(static_cast<Eigen::Index>(states));
  parallel_for(states, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(gm.sites);
    for (std::size_t u = begin; u < end; ++u) {
      double h = 0.0;
      for (std::size_t i = 0; i < gm.sites; ++i) {
        const auto k = static_cast<Eigen::Index>(gm.grid_index(u, i));
        x[i] = gm.abscissae[k];
        h += table(k, static_cast<Eigen::Index>(i));
      }
      for (std::size_t i = 0; i < gm.sites; ++i)
        for (std::size_t j = i + 1; j < gm.sites; ++j)
          h += 2.0 * model.interaction(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[i] * x[j];
      gm.log_weights[static_cast<Eigen::Index>(u)] = -h;
    }
  });
  if (!gm.log_weights.allFinite()) throw Error(ErrorKind::Overflow, "energy not finite on the grid");

  const double lse = log_sum_exp(gm.log_weights);
  gm.log_norm = lse + static_cast<double>(gm.sites) * std::log(gm.step);
  gm.log_weights.array() -= lse;
  gm.weights = gm.log_weights.array().exp().matrix();
  return gm;
}

double expectation(const GridMeasure& gm, const Eigen::VectorXd& f) { return pairwise_dot(gm.weights, f); }

double covariance(const GridMeasure& gm, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const Eigen::VectorXd fc = f.array() - expectation(gm, f);
  const Eigen::VectorXd gc = g.array() - expectation(gm, g);
  return pairwise_sum(gm.weights.cwiseProduct(fc).cwiseProduct(gc));
}

double moment(const GridMeasure& gm, std::size_t i) { return expectation(gm, gm.coordinate_function(i)); }

double moment(const GridMeasure& gm, std::size_t i, std::size_t j) {
  return expectation(gm, gm.coordinate_function(i).cwiseProduct(gm.coordinate_function(j)));
}

double coordinate_covariance(const GridMeasure& gm, std::size_t i, std::size_t j) {
  return covariance(gm, gm.coordinate_function(i), gm.coordinate_function(j));
}

Eigen::MatrixXd covariance_matrix(const GridMeasure& gm) {
  const auto d = static_cast<Eigen::Index>(gm.sites);
  Eigen::MatrixXd c(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j)
      c(i, j) = c(j, i) = coordinate_covariance(gm, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return c;
}

Eigen::VectorXd GeneratorHandle::apply(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = diagonal.cwiseProduct(y);
  for (std::size_t a = 0; a < measure->sites; ++a) {
    for_each_edge(*measure, a, [&](std::size_t u, std::size_t v) {
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      out[iu] -= inv_h2 * y[iv];
      out[iv] -= inv_h2 * y[iu];
    });
  }
  return out;
}

GeneratorHandle build_generator(const GridMeasure& gm) {
  GeneratorHandle gen;
  gen.measure = &gm;
  gen.inv_h2 = 1.0 / (gm.step * gm.step);
  gen.sqrt_mu = (0.5 * gm.log_weights.array()).exp().matrix();
  gen.diagonal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gm.states()));
  const auto& lw = gm.log_weights;
  for (std::size_t a = 0; a < gm.sites; ++a) {
    for_each_edge(gm, a, [&](std::size_t u, std::size_t v) {
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      gen.diagonal[iu] += gen.inv_h2 * std::exp(0.5 * (lw[iv] - lw[iu]));
      gen.diagonal[iv] += gen.inv_h2 * std::exp(0.5 * (lw[iu] - lw[iv]));
    });
  }
  if (!gen.diagonal.allFinite()) throw Error(ErrorKind::Overflow, "generator weights overflow; reduce the grid width");
  return gen;
}

double dirichlet_form(const GeneratorHandle& gen, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  const GridMeasure& gm = *gen.measure;
  std::vector<double> terms;
  for (std::size_t a = 0; a < gm.sites; ++a) {
    for_each_edge(gm, a, [&](std::size_t u, std::size_t v) {
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      const double w = gen.sqrt_mu[iu] * gen.sqrt_mu[iv] * gen.inv_h2;
      terms.push_back(w * (f[iu] - f[iv]) * (g[iu] - g[iv]));
    });
  }
  return pairwise_sum(terms.data(), terms.size());
}

Eigen::VectorXd directional_energies(const GeneratorHandle& gen, const Eigen::VectorXd& f) {
  const GridMeasure& gm = *gen.measure;
  Eigen::VectorXd out(static_cast<Eigen::Index>(gm.sites));
  std::vector<double> terms;
  for (std::size_t a = 0; a < gm.sites; ++a) {
    terms.clear();
    for_each_edge(gm, a, [&](std::size_t u, std::size_t v) {
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      const double df = f[iu] - f[iv];
      terms.push_back(gen.sqrt_mu[iu] * gen.sqrt_mu[iv] * gen.inv_h2 * df * df);
    });
    out[static_cast<Eigen::Index>(a)] = pairwise_sum(terms.data(), terms.size());
  }
  return out;
}

Eigen::VectorXd directional_energies(const GeneratorHandle& gen, const PoissonSolution& sol) {
  return directional_energies(gen, sol.phi);
}

PoissonSolution solve_poisson(const GeneratorHandle& gen, const Eigen::VectorXd& f, const PoissonOptions& opts) {
  const GridMeasure& gm = *gen.measure;
  const auto n = static_cast<Eigen::Index>(gm.states());
  if (f.size() != n) throw Error(ErrorKind::DimensionMismatch, "grid function size");
  const Eigen::VectorXd q = gen.sqrt_mu / std::sqrt(pairwise_dot(gen.sqrt_mu, gen.sqrt_mu));

  const double mean = expectation(gm, f);
  const Eigen::VectorXd b = deflate(gen.sqrt_mu.cwiseProduct((f.array() - mean).matrix()), q);
  const double bnorm = std::sqrt(pairwise_dot(b, b));

  PoissonSolution sol;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    sol.phi = y;
    return sol;
  }
  const Eigen::VectorXd inv_diag = gen.diagonal.cwiseInverse();

  // Restarted PCG; the true residual is recomputed at every restart.
  double rel = 1.0;
  while (sol.iterations < opts.max_iterations) {
    Eigen::VectorXd r = deflate(b - gen.apply(y), q);
    rel = std::sqrt(pairwise_dot(r, r)) / bnorm;
    if (rel <= opts.tolerance) break;
    Eigen::VectorXd z = deflate(inv_diag.cwiseProduct(r), q);
    Eigen::VectorXd p = z;
    double rz = pairwise_dot(r, z);
    const std::size_t inner_cap = std::min<std::size_t>(opts.max_iterations - sol.iterations, 5000);
    for (std::size_t it = 0; it < inner_cap; ++it) {
      ++sol.iterations;
      const Eigen::VectorXd sp = gen.apply(p);
      const double psp = pairwise_dot(p, sp);
      if (!(psp > 0)) break;
      const double alpha = rz / psp;
      y += alpha * p;
      r -= alpha * sp;
      if (std::sqrt(pairwise_dot(r, r)) <= 0.1 * opts.tolerance * bnorm) break;
      z = deflate(inv_diag.cwiseProduct(r), q);
      const double rz_new = pairwise_dot(r, z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    y = deflate(y, q);
  }
  {
    const Eigen::VectorXd r = deflate(b - gen.apply(y), q);
    rel = std::sqrt(pairwise_dot(r, r)) / bnorm;
  }
  if (!std::isfinite(rel) || rel > opts.tolerance) {
    throw Error(ErrorKind::SolverDiverged, "relative residual " + std::to_string(rel) + " after " +
                                               std::to_string(sol.iterations) + " iterations");
  }
  sol.residual = rel;
  sol.phi = Eigen::VectorXd::Zero(n);
  for (Eigen::Index u = 0; u < n; ++u)
    if (gen.sqrt_mu[u] > 0) sol.phi[u] = y[u] / gen.sqrt_mu[u];
  return sol;
}

SpectralGapEstimate spectral_gap(const GeneratorHandle& gen, const GapOptions& opts) {
  const GridMeasure& gm = *gen.measure;
  const auto n = static_cast<Eigen::Index>(gm.states());
  const auto bs = static_cast<Eigen::Index>(std::min<std::size_t>(opts.block, gm.states() - 1));
  if (bs < 1) throw Error(ErrorKind::EigensolveFailure, "grid too small");
  const Eigen::VectorXd q = gen.sqrt_mu / std::sqrt(pairwise_dot(gen.sqrt_mu, gen.sqrt_mu));

  // (S + shift I) is positive definite; factor it once.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * gm.sites + 1));
  for (Eigen::Index u = 0; u < n; ++u) trip.emplace_back(u, u, gen.diagonal[u] + opts.shift);
  for (std::size_t a = 0; a < gm.sites; ++a) {
    for_each_edge(gm, a, [&](std::size_t u, std::size_t v) {
      trip.emplace_back(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v), -gen.inv_h2);
      trip.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u), -gen.inv_h2);
    });
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::EigensolveFailure, "factorisation of shifted operator failed");

  auto project_block = [&](Eigen::MatrixXd& Y) {
    for (Eigen::Index c = 0; c < Y.cols(); ++c) Y.col(c) = deflate(Y.col(c), q);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Y = qr.householderQ() * Eigen::MatrixXd::Identity(n, Y.cols());
    for (Eigen::Index c = 0; c < Y.cols(); ++c) Y.col(c) = deflate(Y.col(c), q);
  };

  // Start from smooth coordinate functions weighted by sqrt(mu).
  Eigen::MatrixXd Y(n, bs);
  for (Eigen::Index c = 0; c < bs; ++c) {
    const std::size_t site = static_cast<std::size_t>(c) % gm.sites;
    const int power = 1 + static_cast<int>(static_cast<std::size_t>(c) / gm.sites);
    for (Eigen::Index u = 0; u < n; ++u) {
      const double x = gm.coordinate(static_cast<std::size_t>(u), site);
      Y(u, c) = gen.sqrt_mu[u] * (std::pow(x, power) + 1e-3 * std::sin(static_cast<double>(u) * 0.618 + c));
    }
  }
  project_block(Y);

  SpectralGapEstimate est;
  est.discretization = gm.spec;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    Eigen::MatrixXd Z = ldlt.solve(Y);
    if (ldlt.info() != Eigen::Success || !Z.allFinite()) throw Error(ErrorKind::EigensolveFailure, "inner solve failed");
    project_block(Z);
    Eigen::MatrixXd SZ(n, bs);
    for (Eigen::Index c = 0; c < bs; ++c) SZ.col(c) = gen.apply(Z.col(c));
    Eigen::MatrixXd H = Z.transpose() * SZ;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Y = Z * es.eigenvectors();
    const double theta = es.eigenvalues()[0];
    const Eigen::VectorXd v = Y.col(0);
    const double resid = (gen.apply(v) - theta * v).norm();
    est.iterations = it + 1;
    est.gap = theta;
    if (resid <= opts.tolerance * std::max(1.0, theta) ||
        std::abs(theta - prev) <= 1e-3 * opts.tolerance * std::max(1.0, theta)) {
      break;
    }
    prev = theta;
    if (it + 1 == opts.max_iterations) {
      throw Error(ErrorKind::EigensolveFailure, "no convergence; residual " + std::to_string(resid));
    }
  }
  if (!(est.gap > 0)) throw Error(ErrorKind::EigensolveFailure, "nonpositive gap estimate");

  const Eigen::VectorXd v = Y.col(0);
  // Below this mass the ratio v / sqrt(mu) is round-off; those states carry
  // less than 1e-12 of the peak weight each.
  const double floor = 1e-6 * gen.sqrt_mu.maxCoeff();
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  for (Eigen::Index u = 0; u < n; ++u)
    if (gen.sqrt_mu[u] > floor) phi[u] = v[u] / gen.sqrt_mu[u];
  phi.array() -= expectation(gm, phi);
  const double var = covariance(gm, phi, phi);
  if (!(var > 0)) throw Error(ErrorKind::EigensolveFailure, "degenerate eigenfunction");
  est.eigenfunction = phi / std::sqrt(var);
  return est;
}

}  // namespace gibbslab
