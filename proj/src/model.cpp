#include "gibbslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "gibbslab/errors.hpp"

namespace gibbslab {

namespace {

constexpr double kRelTol = 1e-12;

std::vector<double> sample_points() {
  std::vector<double> pts;
  for (int k = -200; k <= 200; ++k) pts.push_back(0.05 * k + 0.0123);
  return pts;
}

void check_potential(const Potential& p, std::size_t site) {
  if (!p.convex || !p.convex_derivative || !p.bounded || !p.bounded_derivative) {
    throw Error(ErrorKind::InvalidPotential, "site " + std::to_string(site) + ": missing evaluator");
  }
  const auto pts = sample_points();
  for (double r : pts) {
    const double b = std::abs(p.bounded(r)) + std::abs(p.bounded_derivative(r));
    if (!(b <= p.bound * (1 + kRelTol) + kRelTol)) {
      throw Error(ErrorKind::InvalidPotential, "site " + std::to_string(site) + ": |psi_b| + |psi_b'| = " +
                                                   std::to_string(b) + " exceeds declared bound " +
                                                   std::to_string(p.bound) + " at r = " + std::to_string(r));
    }
  }
  // Convexity of psi_c via its derivative being nondecreasing.
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double lo = p.convex_derivative(pts[k - 1]);
    const double hi = p.convex_derivative(pts[k]);
    if (hi < lo - 1e-9 * (1 + std::abs(lo))) {
      throw Error(ErrorKind::InvalidPotential,
                  "site " + std::to_string(site) + ": convex part has decreasing derivative near r = " +
                      std::to_string(pts[k]));
    }
  }
}

// Number of points of the box [lo, hi] within l-infinity distance r of s.
double count_within(const Site& s, std::int64_t r, const std::vector<std::int64_t>& lo,
                    const std::vector<std::int64_t>& hi) {
  if (r < 0) return 0.0;
  double n = 1.0;
  for (std::size_t a = 0; a < s.dim(); ++a) {
    const auto len = std::min(s[a] + r, hi[a]) - std::max(s[a] - r, lo[a]) + 1;
    if (len <= 0) return 0.0;
    n *= static_cast<double>(len);
  }
  return n;
}

// Sum over shell sites (inside the widened box, outside the lattice) of
// |kernel(dist(i, j))| for every lattice site i, by counting sites per
// distance shell instead of enumerating them.
Eigen::VectorXd shell_row_sums(const Lattice& lattice, const InteractionKernel& kernel, std::int64_t width) {
  const std::size_t d = lattice.dim();
  std::vector<std::int64_t> lam_lo(d), lam_hi(d), big_lo(d), big_hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    lam_lo[a] = lattice.lower()[a];
    lam_hi[a] = lattice.lower()[a] + lattice.extents()[a] - 1;
    big_lo[a] = lam_lo[a] - width;
    big_hi[a] = lam_hi[a] + width;
  }
  const std::int64_t rmax = lattice.max_extent() + width;
  std::vector<double> table(static_cast<std::size_t>(rmax) + 1, 0.0);
  for (std::int64_t r = 1; r <= rmax; ++r) table[static_cast<std::size_t>(r)] = std::abs(kernel.offdiag(r));

  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lattice.size()));
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Site s = lattice.site(i);
    double acc = 0.0;
    for (std::int64_t r = 1; r <= rmax; ++r) {
      const double shell_big = count_within(s, r, big_lo, big_hi) - count_within(s, r - 1, big_lo, big_hi);
      const double shell_lam = count_within(s, r, lam_lo, lam_hi) - count_within(s, r - 1, lam_lo, lam_hi);
      acc += table[static_cast<std::size_t>(r)] * (shell_big - shell_lam);
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < n; ++k) {
    h ^= p[k];
    h *= 1099511628211ULL;
  }
}

void fnv_double(std::uint64_t& h, double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  fnv(h, &v, sizeof v);
}

// Recomputes boundary_field and checks well-temperedness.
void attach_boundary(ModelSpec& m, std::vector<ExteriorSpin> boundary) {
  const auto n = static_cast<Eigen::Index>(m.size());
  m.boundary.clear();
  m.boundary_field = Eigen::VectorXd::Zero(n);
  if (!boundary.empty() && !m.kernel) {
    throw Error(ErrorKind::InvalidArgument, "explicit interactions carry no exterior couplings; boundary must be empty");
  }
  std::set<Site> seen;
  Eigen::VectorXd tempered = Eigen::VectorXd::Zero(n);
  for (auto& spin : boundary) {
    if (spin.site.dim() != m.lattice.dim()) throw Error(ErrorKind::DimensionMismatch, "boundary site dimension");
    if (m.lattice.contains(spin.site)) {
      throw Error(ErrorKind::InvalidArgument, "boundary site " + to_string(spin.site) + " lies inside the lattice");
    }
    if (!seen.insert(spin.site).second) {
      throw Error(ErrorKind::InvalidArgument, "boundary site " + to_string(spin.site) + " given twice");
    }
    if (spin.value == 0.0) continue;
    const Eigen::VectorXd col = m.exterior_column(spin.site);
    if (col.cwiseAbs().maxCoeff() <= m.coupling_cutoff && std::isfinite(spin.value)) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double term = std::abs(col[i]) * std::abs(spin.value);
      if (!std::isfinite(term)) {
        throw Error(ErrorKind::IllTemperedBoundary, "pair " + to_string(m.lattice.site(static_cast<std::size_t>(i))) +
                                                        " - " + to_string(spin.site) + " has non-finite influence");
      }
      tempered[i] += term;
    }
    m.boundary_field += col * spin.value;
    m.boundary.push_back(std::move(spin));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(tempered[i]) || !std::isfinite(m.boundary_field[i])) {
      throw Error(ErrorKind::IllTemperedBoundary,
                  "site " + to_string(m.lattice.site(static_cast<std::size_t>(i))) + " has unbounded boundary influence");
    }
  }
}

}  // namespace

Potential Potential::gaussian() {
  auto zero = [](double) { return 0.0; };
  return {"gaussian", zero, zero, zero, zero, 0.0};
}

Potential Potential::quartic() {
  auto zero = [](double) { return 0.0; };
  return {"quartic", [](double r) { return 0.25 * r * r * r * r; }, [](double r) { return r * r * r; }, zero, zero,
          0.0};
}

Potential Potential::bumped_quartic(double amplitude) {
  return {"bumped_quartic",
          [](double r) { return 0.25 * r * r * r * r; },
          [](double r) { return r * r * r; },
          [amplitude](double r) { return amplitude * std::cos(r); },
          [amplitude](double r) { return -amplitude * std::sin(r); },
          2.0 * std::abs(amplitude)};
}

bool is_symmetric(const Potential& p) {
  for (double r : sample_points()) {
    const double a = p.value(r);
    const double b = p.value(-r);
    if (std::abs(a - b) > 1e-12 * (1 + std::abs(a))) return false;
  }
  return true;
}

InteractionKernel InteractionKernel::power_law(double amplitude, double exponent, double diagonal, bool ferromagnetic) {
  const double sign = ferromagnetic ? -1.0 : 1.0;
  return {"power_law", diagonal, [=](std::int64_t r) {
            return sign * amplitude * std::pow(1.0 + static_cast<double>(r), -exponent);
          }};
}

InteractionKernel InteractionKernel::nearest_neighbor(double coupling, double diagonal) {
  return {"nearest_neighbor", diagonal, [=](std::int64_t r) { return r == 1 ? coupling : 0.0; }};
}

double ModelSpec::exterior_coupling(std::size_t i, const Site& j) const {
  if (!kernel) return 0.0;
  const auto r = dist(lattice.site(i), j);
  return r == 0 ? kernel->diagonal : kernel->offdiag(r);
}

Eigen::VectorXd ModelSpec::exterior_column(const Site& j) const {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  if (!kernel) return col;
  for (std::size_t i = 0; i < size(); ++i) col[static_cast<Eigen::Index>(i)] = exterior_coupling(i, j);
  return col;
}

bool ModelSpec::ferromagnetic() const {
  const auto n = interaction.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && interaction(i, j) > 0) return false;
  if (kernel) {
    const std::int64_t rmax = lattice.max_extent() + shell_width;
    for (std::int64_t r = 1; r <= rmax; ++r)
      if (kernel->offdiag(r) > 0) return false;
  }
  return true;
}

bool ModelSpec::has_zero_boundary() const {
  return std::all_of(boundary.begin(), boundary.end(), [](const ExteriorSpin& s) { return s.value == 0.0; });
}

ModelSpec build_model(const ModelInput& input) {
  ModelSpec m;
  m.lattice = input.lattice;
  const auto n = static_cast<Eigen::Index>(m.lattice.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty lattice");
  if (input.interaction.has_value() == input.kernel.has_value()) {
    throw Error(ErrorKind::InvalidArgument, "exactly one of an explicit interaction or a kernel is required");
  }
  m.coupling_cutoff = input.coupling_cutoff;
  m.shell_width = input.shell_width.value_or(3 * m.lattice.max_extent());
  if (m.shell_width < 0) throw Error(ErrorKind::InvalidArgument, "negative shell width");

  if (input.potentials.size() == 1) {
    m.potentials.assign(static_cast<std::size_t>(n), input.potentials.front());
  } else if (input.potentials.size() == static_cast<std::size_t>(n)) {
    m.potentials = input.potentials;
  } else {
    throw Error(ErrorKind::DimensionMismatch, "need one potential or one per site");
  }
  for (std::size_t i = 0; i < m.potentials.size(); ++i) check_potential(m.potentials[i], i);

  if (input.field.size() == 0) {
    m.field = Eigen::VectorXd::Zero(n);
  } else if (input.field.size() == n) {
    m.field = input.field;
  } else {
    throw Error(ErrorKind::DimensionMismatch, "field size");
  }

  if (input.kernel) {
    m.kernel = input.kernel;
    m.interaction.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Site si = m.lattice.site(static_cast<std::size_t>(i));
      for (Eigen::Index j = 0; j < n; ++j) {
        m.interaction(i, j) =
            i == j ? m.kernel->diagonal : m.kernel->offdiag(dist(si, m.lattice.site(static_cast<std::size_t>(j))));
      }
    }
    m.shell_row_sum = m.shell_width > 0 ? shell_row_sums(m.lattice, *m.kernel, m.shell_width)
                                        : Eigen::VectorXd::Zero(n);
  } else {
    m.interaction = *input.interaction;
    if (m.interaction.rows() != n || m.interaction.cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "interaction matrix must be |L| x |L|");
    }
    m.shell_row_sum = Eigen::VectorXd::Zero(n);
  }
  if (!m.interaction.allFinite()) throw Error(ErrorKind::InvalidArgument, "interaction has non-finite entries");

  const double scale = m.interaction.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(m.interaction(i, j) - m.interaction(j, i)) > kRelTol * scale) {
        throw Error(ErrorKind::AsymmetricInteraction,
                    "pair " + to_string(m.lattice.site(static_cast<std::size_t>(i))) + " - " +
                        to_string(m.lattice.site(static_cast<std::size_t>(j))));
      }
    }
  }

  // Diagonal dominance including the truncated exterior shell.
  m.delta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = m.interaction.row(i).cwiseAbs().sum() - std::abs(m.interaction(i, i));
    const double margin = m.interaction(i, i) - off - m.shell_row_sum[i];
    if (!(m.interaction(i, i) > 0) || !(margin > 0)) {
      throw Error(ErrorKind::NonDominant, "row of site " + to_string(m.lattice.site(static_cast<std::size_t>(i))) +
                                              ": M_ii = " + std::to_string(m.interaction(i, i)) +
                                              ", margin = " + std::to_string(margin));
    }
    m.delta = std::min(m.delta, margin);
  }

  // Decay claim; defaults are the tightest claim the generator guarantees.
  if (input.decay) {
    m.decay = *input.decay;
  } else if (m.kernel && m.kernel->name == "power_law") {
    // Recover amplitude/exponent from two evaluations.
    const double k1 = std::abs(m.kernel->offdiag(1));
    const double k2 = std::abs(m.kernel->offdiag(2));
    if (k1 > 0 && k2 > 0) {
      const double expo = std::log(k1 / k2) / std::log(3.0 / 2.0);
      m.decay = {k1 * std::pow(2.0, expo), expo};
    } else {
      m.decay = {0.0, 0.0};
    }
  } else if (m.kernel) {
    const double e = 2.0 * static_cast<double>(m.lattice.dim()) + 1.0;
    m.decay = {std::abs(m.kernel->offdiag(1)) * std::pow(2.0, e), e};
  } else {
    double mx = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) mx = std::max(mx, std::abs(m.interaction(i, j)));
    m.decay = {mx, 0.0};
  }
  auto claim = [&](std::int64_t r) { return m.decay.constant * std::pow(1.0 + static_cast<double>(r), -m.decay.exponent); };
  for (Eigen::Index i = 0; i < n; ++i) {
    const Site si = m.lattice.site(static_cast<std::size_t>(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Site sj = m.lattice.site(static_cast<std::size_t>(j));
      const double bound = claim(dist(si, sj));
      if (std::abs(m.interaction(i, j)) > bound * (1 + 1e-9) + 1e-300) {
        throw Error(ErrorKind::DecayViolated, "pair " + to_string(si) + " - " + to_string(sj) + ": |M_ij| = " +
                                                  std::to_string(std::abs(m.interaction(i, j))) + " > " +
                                                  std::to_string(bound));
      }
    }
  }
  if (m.kernel) {
    const std::int64_t rmax = m.lattice.max_extent() + m.shell_width;
    for (std::int64_t r = 1; r <= rmax; ++r) {
      if (std::abs(m.kernel->offdiag(r)) > claim(r) * (1 + 1e-9) + 1e-300) {
        throw Error(ErrorKind::DecayViolated, "exterior pair at distance " + std::to_string(r));
      }
    }
  }

  attach_boundary(m, input.boundary);
  return m;
}

ModelSpec model_from_matrix(const Eigen::MatrixXd& matrix, const Potential& potential, const Eigen::VectorXd& field) {
  ModelInput in;
  in.lattice = Lattice({static_cast<std::int64_t>(matrix.rows())});
  in.potentials = {potential};
  in.field = field;
  in.interaction = matrix;
  return build_model(in);
}

double energy(const ModelSpec& model, const Eigen::VectorXd& x) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    h += model.potentials[static_cast<std::size_t>(i)].value(x[i]) + model.field[i] * x[i];
  }
  h += x.dot(model.interaction * x);
  h += 2.0 * x.dot(model.boundary_field);
  return h;
}

Eigen::VectorXd grad_energy(const ModelSpec& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = model.field + 2.0 * (model.interaction * x) + 2.0 * model.boundary_field;
  for (Eigen::Index i = 0; i < x.size(); ++i) g[i] += model.potentials[static_cast<std::size_t>(i)].derivative(x[i]);
  return g;
}

ModelSpec ferromagnetize(const ModelSpec& model) {
  ModelSpec out = model;
  const auto n = out.interaction.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) out.interaction(i, j) = -std::abs(out.interaction(i, j));
  if (out.kernel && !model.ferromagnetic()) {
    auto inner = out.kernel->offdiag;
    out.kernel->offdiag = [inner](std::int64_t r) { return -std::abs(inner(r)); };
    out.kernel->name += "_ferro";
  }
  auto boundary = out.boundary;
  attach_boundary(out, std::move(boundary));
  return out;
}

ModelSpec with_boundary(const ModelSpec& model, std::vector<ExteriorSpin> boundary) {
  ModelSpec out = model;
  attach_boundary(out, std::move(boundary));
  return out;
}

std::vector<Site> coupled_shell(const ModelSpec& model) {
  std::vector<Site> out;
  if (!model.kernel) return out;
  for (auto& s : exterior_shell_sites(model.lattice, model.shell_width)) {
    const auto d0 = model.lattice.distance_to(s);
    for (std::int64_t r = d0; r <= d0 + model.lattice.max_extent(); ++r) {
      if (std::abs(model.kernel->offdiag(r)) > model.coupling_cutoff) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

std::uint64_t fingerprint(const ModelSpec& model) {
  std::uint64_t h = 14695981039346656037ULL;
  for (auto v : model.lattice.lower()) fnv(h, &v, sizeof v);
  for (auto v : model.lattice.extents()) fnv(h, &v, sizeof v);
  for (Eigen::Index k = 0; k < model.interaction.size(); ++k) fnv_double(h, model.interaction.data()[k]);
  for (Eigen::Index k = 0; k < model.field.size(); ++k) fnv_double(h, model.field[k]);
  for (Eigen::Index k = 0; k < model.boundary_field.size(); ++k) fnv_double(h, model.boundary_field[k]);
  for (const auto& p : model.potentials) {
    fnv(h, p.name.data(), p.name.size());
    for (double r : {-2.5, -0.7, 0.3, 1.9}) {
      fnv_double(h, p.value(r));
      fnv_double(h, p.derivative(r));
    }
  }
  return h;
}

}  // namespace gibbslab
