#include "gibbslab/bootstrap.hpp"

#include <cmath>
#include <limits>

#include "gibbslab/errors.hpp"

namespace gibbslab {

namespace {

Eigen::MatrixXd abs_offdiag(const ModelSpec& model) {
  Eigen::MatrixXd a = model.interaction.cwiseAbs();
  a.diagonal().setZero();
  return a;
}

Eigen::MatrixXi distance_matrix(const Lattice& lat) {
  const auto n = static_cast<Eigen::Index>(lat.size());
  std::vector<Site> sites;
  for (std::size_t i = 0; i < lat.size(); ++i) sites.push_back(lat.site(i));
  Eigen::MatrixXi D(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      D(i, j) = static_cast<int>(dist(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]));
  return D;
}

void check_field(const ModelSpec& model, const BoundField& B) {
  const auto n = static_cast<Eigen::Index>(model.size());
  if (B.bounds.rows() != n || B.bounds.cols() != n) throw Error(ErrorKind::DimensionMismatch, "bound field size");
}

}  // namespace

std::vector<FitPoint> BoundField::pairs(const Lattice& lattice) const {
  std::vector<FitPoint> out;
  const Eigen::MatrixXi D = distance_matrix(lattice);
  for (Eigen::Index i = 0; i < bounds.rows(); ++i)
    for (Eigen::Index j = i + 1; j < bounds.cols(); ++j) out.push_back({double(D(i, j)), bounds(i, j)});
  return out;
}

void require_lebowitz_conditions(const ModelSpec& model) {
  if (!model.ferromagnetic()) throw Error(ErrorKind::ConditionViolated, "interaction is not ferromagnetic");
  if (model.field.cwiseAbs().maxCoeff() != 0.0) throw Error(ErrorKind::ConditionViolated, "external field is nonzero");
  if (!model.has_zero_boundary() || model.boundary_field.cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorKind::ConditionViolated, "boundary condition is nonzero");
  }
  for (std::size_t i = 0; i < model.potentials.size(); ++i) {
    if (!is_symmetric(model.potentials[i])) {
      throw Error(ErrorKind::ConditionViolated, "potential at site " + to_string(model.lattice.site(i)) + " is not even");
    }
  }
}

Eigen::MatrixXd compute_J(const ModelSpec& model, const BoundField& B, double L, double c, bool soundness) {
  if (soundness) require_lebowitz_conditions(model);
  check_field(model, B);
  if (!(L > 0)) throw Error(ErrorKind::InvalidArgument, "L must be positive");
  const auto n = static_cast<Eigen::Index>(model.size());
  const Eigen::MatrixXd absM = abs_offdiag(model);
  const Eigen::MatrixXi D = distance_matrix(model.lattice);
  const auto l = static_cast<int>(std::floor(L));
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd in = Eigen::VectorXd::Zero(n), out = Eigen::VectorXd::Zero(n);
    for (Eigen::Index m = 0; m < n; ++m) (D(i, m) <= l ? in : out)[m] = B.bounds(i, m);
    const Eigen::VectorXd from_out = absM * out;
    const Eigen::VectorXd from_in = absM * in;
    for (Eigen::Index k = 0; k < n; ++k) J(i, k) = c * (D(i, k) <= l ? from_out[k] : from_in[k]);
  }
  return J;
}

bool is_admissible_L(const ModelSpec& model, const BoundField& B, double L, double c, double threshold) {
  const Eigen::MatrixXd J = compute_J(model, B, L, c, false);
  return J.rowwise().sum().maxCoeff() <= threshold && J.colwise().sum().maxCoeff() <= threshold;
}

double find_L(const ModelSpec& model, const BoundField& B, double c, double threshold, bool soundness) {
  if (soundness) require_lebowitz_conditions(model);
  const double limit = 0.5 * static_cast<double>(model.lattice.max_extent());
  for (double L = 0.5; L <= limit; L += 1.0) {
    if (is_admissible_L(model, B, L, c, threshold)) return L;
  }
  throw Error(ErrorKind::NoAdmissibleL, "no half-integer L <= " + std::to_string(limit) +
                                            " keeps the J row and column sums below " + std::to_string(threshold));
}

double lebowitz_rhs(const BoundField& B, const ModelSpec& model, std::size_t i, std::size_t j,
                    const std::vector<std::size_t>& A, double c) {
  check_field(model, B);
  std::vector<char> in(model.size(), 0);
  for (auto a : A) {
    if (a >= model.size()) throw Error(ErrorKind::InvalidArgument, "split index outside the lattice");
    in[a] = 1;
  }
  if (!in[i] || in[j]) throw Error(ErrorKind::BadSplit, "need i in A and j outside A");
  const auto& M = model.interaction;
  const auto& b = B.bounds;
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  double s = 0.0;
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (!in[k]) continue;
    const auto kk = static_cast<Eigen::Index>(k);
    for (std::size_t n = 0; n < model.size(); ++n) {
      if (in[n]) continue;
      const auto nn = static_cast<Eigen::Index>(n);
      s += c * std::abs(M(kk, nn)) * (b(ii, kk) * b(nn, jj) + b(ii, nn) * b(kk, jj));
    }
  }
  return s;
}

BoundField propagate(const BoundField& B, const ModelSpec& model, double L, double c, bool soundness) {
  // With A = B_L(i), the right-hand side for every j outside A is (J B)(i, j).
  const Eigen::MatrixXd J = compute_J(model, B, L, c, soundness);
  const Eigen::MatrixXd R = J * B.bounds;
  const Eigen::MatrixXi D = distance_matrix(model.lattice);
  BoundField out = B;
  const auto n = B.bounds.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (static_cast<double>(D(i, j)) <= 3.0 * L) continue;
      const double v = std::min({B.bounds(i, j), R(i, j), R(j, i)});
      out.bounds(i, j) = out.bounds(j, i) = v;
    }
  }
  return out;
}

FitResult fit_bound_envelope(const BoundField& B, const Lattice& lattice) {
  const auto env = apply_window(envelope(B.pairs(lattice)));
  FitResult f;
  if (env.empty()) {
    f.alpha_hat = std::numeric_limits<double>::infinity();
    return f;
  }
  f = fit_power_law(env);
  f.alpha_hat -= static_cast<double>(lattice.dim());
  return f;
}

BootstrapResult run_bootstrap(const ModelSpec& model, double C0, double alpha0, const BootstrapParams& params,
                              const Eigen::VectorXd& diagonal) {
  if (params.soundness) require_lebowitz_conditions(model);
  const Lattice& lat = model.lattice;
  const auto n = static_cast<Eigen::Index>(model.size());
  const double d = static_cast<double>(lat.dim());
  if (diagonal.size() != 0 && diagonal.size() != n) throw Error(ErrorKind::DimensionMismatch, "diagonal size");

  const Eigen::MatrixXi D = distance_matrix(lat);
  BoundField B;
  B.bounds.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      B.bounds(i, j) = i == j ? (diagonal.size() ? diagonal[i] : C0) : C0 * std::pow(1.0 + D(i, j), -(d + alpha0));

  BootstrapResult res;
  const double c = params.coupling_factor;
  res.L = params.L ? *params.L : find_L(model, B, c, 0.5, params.soundness);
  const double alpha = params.target_alpha.value_or(model.decay.exponent - d);
  const double diam = static_cast<double>(lat.max_extent() - 1);
  const double sweeps = std::ceil(std::max(0.0, d + alpha) * std::log2(1.0 + diam));
  res.iterations = std::min(params.max_iterations, std::max<std::size_t>(1, static_cast<std::size_t>(sweeps)));
  auto record = [&](std::size_t it) {
    const FitResult f = fit_bound_envelope(B, lat);
    res.alpha_history.push_back(f.alpha_hat);
    res.fit = f;
    for (const auto& p : envelope(B.pairs(lat))) res.rows.push_back({it, p.r, p.v, f.C, f.alpha_hat, c, res.L});
  };
  record(0);
  for (std::size_t it = 1; it <= res.iterations; ++it) {
    B = propagate(B, model, res.L, c, params.soundness);
    B.provenance = "propagated(" + std::to_string(it) + ")";
    record(it);
  }
  res.field = B;
  return res;
}

LebowitzReport verify_lebowitz_exact(const ModelSpec& model, double c, std::optional<GridSpec> grid) {
  const std::size_t n = model.size();
  if (n > 4) throw Error(ErrorKind::InvalidArgument, "exact Lebowitz check needs at most 4 sites");
  require_lebowitz_conditions(model);
  GridSpec g = grid.value_or(GridSpec{});
  if (!grid) {
    g.points_per_site = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(g.budget), 1.0 / static_cast<double>(n)) + 1e-9)));
  }
  const GridMeasure gm = build_grid_measure(model, g);

  LebowitzReport rep;
  rep.coupling = c;
  rep.covariance = covariance_matrix(gm);
  rep.nonnegative = rep.covariance.minCoeff() >= -1e-10;
  BoundField B{rep.covariance, "exact-oracle"};
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<std::size_t> A;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (1u << k)) A.push_back(k);
    for (std::size_t i : A) {
      for (std::size_t j = 0; j < n; ++j) {
        if (mask & (1u << j)) continue;
        LebowitzSplit s;
        s.i = i;
        s.j = j;
        s.A = A;
        s.lhs = rep.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        s.rhs_unit = lebowitz_rhs(B, model, i, j, A, 1.0);
        s.rhs = c * s.rhs_unit;
        s.holds = s.lhs <= s.rhs + 1e-10;
        s.c_min = s.lhs <= 0 ? 0.0 : (s.rhs_unit > 0 ? s.lhs / s.rhs_unit : std::numeric_limits<double>::infinity());
        rep.holds = rep.holds && s.holds;
        rep.min_coupling = std::max(rep.min_coupling, s.c_min);
        rep.splits.push_back(std::move(s));
      }
    }
  }
  return rep;
}

}  // namespace gibbslab
