#include "gibbslab/sampler.hpp"

#include <cmath>

#include "gibbslab/errors.hpp"
#include "gibbslab/numerics.hpp"

namespace gibbslab {

namespace {

void check_config(const ChainConfig& cfg) {
  if (cfg.steps <= cfg.burn_in) throw Error(ErrorKind::InvalidArgument, "steps must exceed burn_in");
  if (cfg.thin < 1) throw Error(ErrorKind::InvalidArgument, "thin must be >= 1");
  if (!(cfg.proposal_sd > 0)) throw Error(ErrorKind::InvalidArgument, "proposal_sd must be positive");
}

// Energy change from moving site i from x[i] to y.
double local_delta(const ModelSpec& m, const Eigen::VectorXd& x, Eigen::Index i, double y) {
  const double xi = x[i];
  const auto& psi = m.potentials[static_cast<std::size_t>(i)];
  const double cross = m.interaction.row(i).dot(x) - m.interaction(i, i) * xi;
  return psi.value(y) - psi.value(xi) + (m.field[i] + 2.0 * m.boundary_field[i] + 2.0 * cross) * (y - xi) +
         m.interaction(i, i) * (y * y - xi * xi);
}

}  // namespace

double metropolis_acceptance(double delta_energy) { return delta_energy <= 0 ? 1.0 : std::exp(-delta_energy); }

Eigen::MatrixXd metropolis_kernel(const Eigen::VectorXd& energies, const Eigen::MatrixXd& proposal) {
  const auto n = energies.size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    double stay = 1.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      p(a, b) = proposal(a, b) * metropolis_acceptance(energies[b] - energies[a]);
      stay -= p(a, b);
    }
    p(a, a) = stay;
  }
  return p;
}

SampleBatch run_chain(const ModelSpec& model, const ChainConfig& cfg, const Eigen::VectorXd& initial) {
  check_config(cfg);
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::VectorXd x = initial.size() == n ? initial : Eigen::VectorXd::Zero(n);
  const CounterRng rng{cfg.seed};

  const std::size_t kept = (cfg.steps - cfg.burn_in + cfg.thin - 1) / cfg.thin;
  SampleBatch out;
  out.seed = cfg.seed;
  out.fingerprint = fingerprint(model);
  out.samples.resize(n, static_cast<Eigen::Index>(kept));

  std::size_t accepted = 0, proposed = 0;
  const double tau = 0.5 * cfg.proposal_sd * cfg.proposal_sd;
  double h = energy(model, x);
  Eigen::VectorXd g = grad_energy(model, x);
  if (!std::isfinite(h)) throw Error(ErrorKind::NonFiniteEnergy, "initial state");

  std::size_t col = 0;
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    if (cfg.scheme == Scheme::RandomScanMetropolis) {
      for (Eigen::Index slot = 0; slot < n; ++slot) {
        const auto s = static_cast<std::uint64_t>(slot);
        const auto i = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(rng.uniform(t, s, 0) * static_cast<double>(n)));
        const double y = x[i] + cfg.proposal_sd * rng.normal(t, s, 1);
        const double dh = local_delta(model, x, i, y);
        if (std::isnan(dh)) throw Error(ErrorKind::NonFiniteEnergy, "site " + std::to_string(i) + " at sweep " + std::to_string(t));
        ++proposed;
        if (rng.uniform(t, s, 4) < metropolis_acceptance(dh)) {
          x[i] = y;
          ++accepted;
        }
      }
    } else {
      Eigen::VectorXd xi(n);
      for (Eigen::Index k = 0; k < n; ++k) xi[k] = rng.normal(t, static_cast<std::uint64_t>(k), 1);
      const Eigen::VectorXd y = x - tau * g + std::sqrt(2.0 * tau) * xi;
      const double hy = energy(model, y);
      const Eigen::VectorXd gy = grad_energy(model, y);
      if (std::isnan(hy)) throw Error(ErrorKind::NonFiniteEnergy, "proposal at step " + std::to_string(t));
      const double fwd = (y - x + tau * g).squaredNorm() / (4.0 * tau);
      const double bwd = (x - y + tau * gy).squaredNorm() / (4.0 * tau);
      const double log_ratio = -(hy - h) - bwd + fwd;
      ++proposed;
      if (std::isfinite(hy) && gy.allFinite() && std::log(rng.uniform(t, 0, 4)) < log_ratio) {
        x = y;
        h = hy;
        g = gy;
        ++accepted;
      }
    }
    if (!x.allFinite()) throw Error(ErrorKind::NonFiniteEnergy, "state diverged at step " + std::to_string(t));
    if (t >= cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0) out.samples.col(static_cast<Eigen::Index>(col++)) = x;
  }
  out.accept_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  return out;
}

EstimateWithError batch_means(const Eigen::Ref<const Eigen::VectorXd>& series, std::size_t n_batches) {
  const auto n = static_cast<std::size_t>(series.size());
  if (n_batches < 16 || n < n_batches) {
    throw Error(ErrorKind::TooFewBatches, std::to_string(n) + " samples cannot fill " + std::to_string(n_batches) +
                                              " batches (minimum 16)");
  }
  const std::size_t len = n / n_batches;
  Eigen::VectorXd means(static_cast<Eigen::Index>(n_batches));
  for (std::size_t b = 0; b < n_batches; ++b) {
    means[static_cast<Eigen::Index>(b)] =
        pairwise_sum(series.data() + b * len, len) / static_cast<double>(len);
  }
  EstimateWithError e;
  e.n_batches = n_batches;
  e.value = pairwise_sum(series.data(), len * n_batches) / static_cast<double>(len * n_batches);
  const Eigen::VectorXd dev = means.array() - e.value;
  e.std_error = std::sqrt(pairwise_dot(dev, dev) / static_cast<double>(n_batches * (n_batches - 1)));
  return e;
}

EstimateWithError estimate_mean(const SampleBatch& batch, std::size_t i, std::size_t n_batches) {
  return batch_means(batch.samples.row(static_cast<Eigen::Index>(i)).transpose(), n_batches);
}

EstimateWithError estimate_cov(const SampleBatch& batch, std::size_t i, std::size_t j, std::size_t n_batches) {
  if (i >= static_cast<std::size_t>(batch.samples.rows()) || j >= static_cast<std::size_t>(batch.samples.rows())) {
    throw Error(ErrorKind::InvalidArgument, "site index outside the sampled lattice");
  }
  const Eigen::VectorXd xi = batch.samples.row(static_cast<Eigen::Index>(i)).transpose();
  const Eigen::VectorXd xj = batch.samples.row(static_cast<Eigen::Index>(j)).transpose();
  const auto n = static_cast<double>(xi.size());
  const Eigen::VectorXd prod = (xi.array() - pairwise_sum(xi) / n) * (xj.array() - pairwise_sum(xj) / n);
  return batch_means(prod, n_batches);
}

EstimateWithError estimate_cov(const SampleBatch& batch, const Lattice& lattice, const Site& i, const Site& j,
                               std::size_t n_batches) {
  return estimate_cov(batch, lattice.index(i), lattice.index(j), n_batches);
}

EstimateWithError ds_influence(const ModelSpec& model, const Site& observable, const Site& boundary_site, double delta,
                               const ChainConfig& cfg) {
  const std::size_t obs = model.lattice.index(observable);
  if (model.lattice.contains(boundary_site)) {
    throw Error(ErrorKind::InvalidArgument, "boundary site " + to_string(boundary_site) + " lies inside the lattice");
  }
  std::vector<ExteriorSpin> shifted = model.boundary;
  bool found = false;
  for (auto& s : shifted) {
    if (s.site == boundary_site) {
      s.value += delta;
      found = true;
    }
  }
  if (!found) shifted.push_back({boundary_site, delta});
  const ModelSpec other = with_boundary(model, shifted);

  const SampleBatch a = run_chain(model, cfg);
  const SampleBatch b = run_chain(other, cfg);
  const Eigen::VectorXd diff = (b.samples.row(static_cast<Eigen::Index>(obs)) - a.samples.row(static_cast<Eigen::Index>(obs))).transpose();
  EstimateWithError e = batch_means(diff);
  e.value = std::abs(e.value);
  return e;
}

std::vector<VarianceRow> variance_sweep(const ModelSpec& model, const std::vector<std::vector<ExteriorSpin>>& family,
                                        const ChainConfig& cfg) {
  std::vector<std::vector<VarianceRow>> per(family.size());
  parallel_for(family.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      const ModelSpec m = with_boundary(model, family[f]);
      ChainConfig c = cfg;
      c.seed = splitmix64(cfg.seed ^ (0x5851f42d4c957f2dULL * (f + 1)));
      const SampleBatch batch = run_chain(m, c);
      for (std::size_t i = 0; i < m.size(); ++i) {
        const auto e = estimate_cov(batch, i, i);
        per[f].push_back({f, m.lattice.site(i), e.value, e.std_error});
      }
    }
  });
  std::vector<VarianceRow> rows;
  for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

}  // namespace gibbslab
