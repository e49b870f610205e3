#include "gibbslab/blockavg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/errors.hpp"
#include "gibbslab/numerics.hpp"

namespace gibbslab {

namespace {

void check_radius(double R) {
  if (!is_tiling_radius(R)) {
    throw Error(ErrorKind::BadRadius, "R = " + std::to_string(R) + " must satisfy 2R in Z and R not in Z");
  }
}

Eigen::MatrixXd abs_offdiag(const ModelSpec& model) {
  Eigen::MatrixXd a = model.interaction.cwiseAbs();
  a.diagonal().setZero();
  return a;
}

// Same as coefficients() but the center may lie outside the lattice.
BlockCoefficients coefficients_at(const ModelSpec& model, const Eigen::MatrixXd& absM, const Site& k, double R) {
  const Lattice& lat = model.lattice;
  const auto n = static_cast<Eigen::Index>(lat.size());
  const Eigen::VectorXd rowabs = absM.rowwise().sum();
  const auto ball_k = ball_indices(k, R, lat);

  // S[c](i) = sum_{j in B_R(l_c)} |M_ij| for each l_c in B_R(k).
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(ball_k.size()));
  std::vector<Site> ells;
  for (std::size_t c = 0; c < ball_k.size(); ++c) {
    ells.push_back(lat.site(ball_k[c]));
    for (auto j : ball_indices(ells.back(), R, lat)) S.col(static_cast<Eigen::Index>(c)) += absM.col(static_cast<Eigen::Index>(j));
  }

  BlockCoefficients bc;
  bc.center = k;
  bc.radius = R;
  bc.p = Eigen::VectorXi::Zero(n);
  bc.q = Eigen::VectorXd::Zero(n);
  bc.kappa = Eigen::VectorXd::Zero(n);
  const auto r = static_cast<std::int64_t>(std::floor(R));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Site si = lat.site(static_cast<std::size_t>(i));
    double q = 0.0, kap = 0.0;
    for (std::size_t c = 0; c < ells.size(); ++c) {
      const double s = S(i, static_cast<Eigen::Index>(c));
      if (dist(ells[c], si) <= r) {
        ++bc.p[i];
        q += rowabs[i] - s;
      } else {
        kap += s;
      }
    }
    bc.q[i] = 0.5 * q;
    bc.kappa[i] = 0.5 * kap;
  }
  return bc;
}

std::string offset_string(const Site& from, const Site& to) {
  Site off = to;
  for (std::size_t a = 0; a < off.dim(); ++a) off[a] -= from[a];
  return to_string(off);
}

Site lattice_center(const Lattice& lat) {
  Site c;
  c.coords.resize(lat.dim());
  for (std::size_t a = 0; a < lat.dim(); ++a) c[a] = lat.lower()[a] + lat.extents()[a] / 2;
  return c;
}

Site block_origin(const Lattice& lat, double R) {
  Site o;
  o.coords.resize(lat.dim());
  for (std::size_t a = 0; a < lat.dim(); ++a) o[a] = lat.lower()[a] + static_cast<std::int64_t>(std::floor(R));
  return o;
}

std::vector<std::int64_t> block_counts(const Lattice& lat, double R) {
  const auto width = static_cast<std::int64_t>(2.0 * R);
  std::vector<std::int64_t> counts(lat.dim());
  for (std::size_t a = 0; a < lat.dim(); ++a) counts[a] = (lat.extents()[a] + width - 1) / width;
  return counts;
}

}  // namespace

BlockCoefficients coefficients(const ModelSpec& model, const Site& k, double R) {
  check_radius(R);
  if (!model.lattice.contains(k)) throw Error(ErrorKind::InvalidArgument, "center " + to_string(k) + " outside the lattice");
  return coefficients_at(model, abs_offdiag(model), k, R);
}

CoefficientReport verify_coefficient_bounds(const ModelSpec& model, const std::vector<double>& radii, double epsilon) {
  for (double R : radii) check_radius(R);
  const Lattice& lat = model.lattice;
  const auto d = static_cast<double>(lat.dim());
  const Site k = lattice_center(lat);
  const Eigen::MatrixXd absM = abs_offdiag(model);

  CoefficientReport rep;
  rep.radii = radii;
  rep.epsilon = epsilon;
  rep.alpha = model.decay.exponent - 2.0 * d;
  rep.alpha_bar = std::min(rep.alpha, 1.0);
  std::vector<double> fq, fk1, fk2;

  for (double R : radii) {
    const auto bc = coefficients_at(model, absM, k, R);
    const auto r = static_cast<std::int64_t>(std::floor(R));
    const auto two_r = static_cast<std::int64_t>(std::floor(2.0 * R));
    const std::size_t dd = lat.dim();

    int p_min = std::numeric_limits<int>::max();
    Site p_arg = k;
    double q_sup = 0.0, k1_sup = 0.0, k2_sup = 0.0, k1_val = 0.0, k2_val = 0.0;
    Site q_arg = k, k1_arg = k, k2_arg = k;
    const double b_q = std::pow(R, d - 1.0);
    const double b_k1 = std::pow(R, d - rep.alpha_bar + epsilon);
    const double b_k2 = std::pow(R, 2.0 * d);
    for (std::size_t idx = 0; idx < lat.size(); ++idx) {
      const Site s = lat.site(idx);
      if (static_cast<double>(lat.distance_to_boundary(s)) <= 4.0 * R) continue;
      const auto i = static_cast<Eigen::Index>(idx);
      const auto dk = dist(s, k);
      if (dk <= r && bc.p[i] < p_min) {
        p_min = bc.p[i];
        p_arg = s;
      }
      if (bc.q[i] / b_q > q_sup) {
        q_sup = bc.q[i] / b_q;
        q_arg = s;
      }
      const double gap = 1.0 + static_cast<double>(std::max<std::int64_t>(0, dk - two_r));
      const double v1 = bc.kappa[i] * std::pow(gap, d + epsilon) / b_k1;
      const double v2 = bc.kappa[i] * std::pow(gap, 2.0 * d + rep.alpha) / b_k2;
      if (v1 > k1_sup) {
        k1_sup = v1;
        k1_val = bc.kappa[i];
        k1_arg = s;
      }
      if (v2 > k2_sup) {
        k2_sup = v2;
        k2_val = bc.kappa[i];
        k2_arg = s;
      }
    }
    const double p_need = std::pow(static_cast<double>(r + 1), d);
    if (p_min == std::numeric_limits<int>::max()) {
      throw Error(ErrorKind::InvalidArgument, "no interior site for R = " + std::to_string(R) + "; enlarge the lattice");
    }
    if (p_min < p_need) rep.p_bound_holds = false;
    const double p_full = std::pow(static_cast<double>(2 * r + 1), d);
    const auto kc = static_cast<Eigen::Index>(lat.index(k));
    rep.rows.push_back({dd, R, "p_min", offset_string(k, p_arg), double(p_min), p_need, p_min / p_need});
    rep.rows.push_back({dd, R, "p_center", offset_string(k, k), double(bc.p[kc]), p_full, bc.p[kc] / p_full});
    rep.rows.push_back({dd, R, "q", offset_string(k, q_arg), q_sup * b_q, b_q, q_sup});
    const double g1 = 1.0 + static_cast<double>(std::max<std::int64_t>(0, dist(k1_arg, k) - two_r));
    const double g2 = 1.0 + static_cast<double>(std::max<std::int64_t>(0, dist(k2_arg, k) - two_r));
    rep.rows.push_back({dd, R, "kappa_eps", offset_string(k, k1_arg), k1_val, b_k1 / std::pow(g1, d + epsilon), k1_sup});
    rep.rows.push_back({dd, R, "kappa_alpha", offset_string(k, k2_arg), k2_val, b_k2 / std::pow(g2, 2.0 * d + rep.alpha), k2_sup});
    fq.push_back(q_sup);
    fk1.push_back(k1_sup);
    fk2.push_back(k2_sup);
  }
  rep.families = {{"q", fq}, {"kappa_eps", fk1}, {"kappa_alpha", fk2}};
  for (const auto& [name, vals] : rep.families) {
    if (vals.size() < 2) continue;
    bool up = true, shrinking = true;
    for (std::size_t m = 1; m < vals.size(); ++m) {
      if (!(vals[m] > vals[m - 1])) up = false;
      if (m >= 2 && !(vals[m] - vals[m - 1] < vals[m - 1] - vals[m - 2])) shrinking = false;
    }
    if (up) rep.monotone_growth.push_back(name);
    if (up && shrinking) rep.saturating.push_back(name);
  }
  return rep;
}

double BlockMatrix::dominance_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    const double off = A.row(k).cwiseAbs().sum() - std::abs(A(k, k));
    margin = std::min(margin, A(k, k) - off);
  }
  return margin;
}

std::vector<Site> block_centers(const Lattice& lattice, double R) {
  check_radius(R);
  const auto width = static_cast<std::int64_t>(2.0 * R);
  const Site origin = block_origin(lattice, R);
  const auto counts = block_counts(lattice, R);
  std::size_t total = 1;
  for (auto c : counts) total *= static_cast<std::size_t>(c);
  std::vector<Site> out;
  for (std::size_t b = 0; b < total; ++b) {
    Site c = origin;
    std::size_t rest = b;
    for (std::size_t a = 0; a < lattice.dim(); ++a) {
      const auto m = static_cast<std::int64_t>(rest % static_cast<std::size_t>(counts[a]));
      rest /= static_cast<std::size_t>(counts[a]);
      c[a] = origin[a] + m * width;
    }
    out.push_back(c);
  }
  return out;
}

std::size_t BlockMatrix::block_of(const Site& s) const {
  const auto width = static_cast<std::int64_t>(2.0 * radius);
  const Site& origin = centers.front();
  const Site c = tile_center(s, radius, origin);
  std::size_t idx = 0, scale = 1;
  for (std::size_t a = 0; a < s.dim(); ++a) {
    std::int64_t count = 1;
    for (const auto& ctr : centers) count = std::max(count, (ctr[a] - origin[a]) / width + 1);
    const auto m = (c[a] - origin[a]) / width;
    if (m < 0 || m >= count) throw Error(ErrorKind::InvalidArgument, "site " + to_string(s) + " outside the block cover");
    idx += static_cast<std::size_t>(m) * scale;
    scale *= static_cast<std::size_t>(count);
  }
  return idx;
}

BlockMatrix assemble_block_matrix(const ModelSpec& model, double R, double rho, double C) {
  check_radius(R);
  if (!(rho > 0) || !(C > 0)) throw Error(ErrorKind::InvalidArgument, "rho and C must be positive");
  const Lattice& lat = model.lattice;
  const auto d = static_cast<double>(lat.dim());
  BlockMatrix bm;
  bm.radius = R;
  bm.rho = rho;
  bm.C = C;
  bm.centers = block_centers(lat, R);
  const auto nb = static_cast<Eigen::Index>(bm.centers.size());
  const Eigen::MatrixXd absM = abs_offdiag(model);
  const auto r = static_cast<std::int64_t>(std::floor(R));
  const auto two_r = static_cast<std::int64_t>(std::floor(2.0 * R));
  const double rd = std::pow(R, d);

  std::vector<std::vector<std::size_t>> members(bm.centers.size());
  for (std::size_t b = 0; b < bm.centers.size(); ++b) members[b] = ball_indices(bm.centers[b], R, lat);

  bm.kappa_bar = Eigen::MatrixXd::Zero(nb, nb);
  parallel_for(bm.centers.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t kb = begin; kb < end; ++kb) {
      const auto bc = coefficients_at(model, absM, bm.centers[kb], R);
      Eigen::VectorXd tilde = bc.kappa;
      for (std::size_t i = 0; i < lat.size(); ++i) {
        const auto di = dist(lat.site(i), bm.centers[kb]);
        if (di > r && di <= two_r) tilde[static_cast<Eigen::Index>(i)] += bc.q[static_cast<Eigen::Index>(i)];
      }
      for (std::size_t jb = 0; jb < bm.centers.size(); ++jb) {
        if (jb == kb) continue;
        double mx = 0.0;
        for (auto i : members[jb]) mx = std::max(mx, tilde[static_cast<Eigen::Index>(i)]);
        bm.kappa_bar(static_cast<Eigen::Index>(kb), static_cast<Eigen::Index>(jb)) = mx / rd;
      }
    }
  });
  bm.A = -C * rho * bm.kappa_bar;
  bm.A.diagonal().setConstant(rho * rho);
  return bm;
}

InverseDecay inverse_decay(const Eigen::MatrixXd& A, const std::vector<Site>& positions) {
  const auto n = A.rows();
  if (A.cols() != n) throw Error(ErrorKind::DimensionMismatch, "square matrix required");
  if (!positions.empty() && static_cast<Eigen::Index>(positions.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "one position per row");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double off = A.row(k).cwiseAbs().sum() - std::abs(A(k, k));
    if (!(A(k, k) - off > 0)) {
      throw Error(ErrorKind::NotDominant, "row " + std::to_string(k) + " margin " + std::to_string(A(k, k) - off));
    }
  }
  InverseDecay out;
  out.inverse = A.partialPivLu().inverse();
  out.min_entry = out.inverse.minCoeff();
  out.nonnegative = out.min_entry >= 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (k == j) continue;
      const double r = positions.empty() ? static_cast<double>(std::abs(k - j))
                                         : static_cast<double>(dist(positions[static_cast<std::size_t>(k)],
                                                                    positions[static_cast<std::size_t>(j)]));
      out.pairs.push_back({r, out.inverse(k, j)});
    }
  }
  const auto env = apply_window(envelope(out.pairs));
  try {
    if (env.size() >= 4) out.fit = fit_power_law(env);
  } catch (const Error&) {
    out.fit.reset();
  }
  return out;
}

InverseDecay inverse_decay(const BlockMatrix& block) {
  const auto width = static_cast<std::int64_t>(2.0 * block.radius);
  std::vector<Site> pos;
  for (const auto& c : block.centers) {
    Site p = c;
    for (std::size_t a = 0; a < p.dim(); ++a) p[a] = (c[a] - block.centers.front()[a]) / width;
    pos.push_back(p);
  }
  return inverse_decay(block.A, pos);
}

Eigen::VectorXd directional_bound(const ModelSpec& model, double R, double rho, const std::vector<Site>& support,
                                  double C) {
  const Lattice& lat = model.lattice;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lat.size()));
  const BlockMatrix bm = assemble_block_matrix(model, R, rho, C);
  if (!(bm.dominance_margin() > 0)) {
    throw Error(ErrorKind::NotDominant, "block matrix margin " + std::to_string(bm.dominance_margin()) +
                                            " at R = " + std::to_string(R));
  }
  if (support.empty()) return out;
  const auto two_r = static_cast<std::int64_t>(std::floor(2.0 * R));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bm.centers.size()));
  for (std::size_t b = 0; b < bm.centers.size(); ++b) {
    for (const auto& s : support) {
      if (dist(s, bm.centers[b]) <= two_r) {
        rhs[static_cast<Eigen::Index>(b)] = 1.0;
        break;
      }
    }
  }
  const Eigen::VectorXd phi = bm.A.partialPivLu().solve(rhs);
  for (std::size_t i = 0; i < lat.size(); ++i) out[static_cast<Eigen::Index>(i)] = phi[static_cast<Eigen::Index>(bm.block_of(lat.site(i)))];
  return out;
}

}  // namespace gibbslab
