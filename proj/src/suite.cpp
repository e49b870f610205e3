#include "gibbslab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "gibbslab/blockavg.hpp"
#include "gibbslab/bootstrap.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/fit.hpp"
#include "gibbslab/gaussian.hpp"
#include "gibbslab/numerics.hpp"
#include "gibbslab/sampler.hpp"

namespace gibbslab {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

Eigen::MatrixXd chain_matrix(int n, double diag, double off) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off;
  }
  return m;
}

ModelSpec power_law_chain(std::int64_t n, double amplitude, double exponent, bool ferro,
                          const Potential& psi = Potential::gaussian()) {
  ModelInput in;
  in.lattice = Lattice({n});
  in.potentials = {psi};
  in.kernel = InteractionKernel::power_law(amplitude, exponent, 1.0, ferro);
  return build_model(in);
}

struct NamedModel {
  std::string name;
  ModelSpec model;
  std::size_t points;
};

std::vector<NamedModel> exact_models() {
  Eigen::MatrixXd ou(1, 1);
  ou << 0.5;
  const Eigen::MatrixXd two = chain_matrix(2, 1.0, -0.2);
  return {
      {"ou", model_from_matrix(ou), 64},
      {"gauss2", model_from_matrix(two), 48},
      {"quartic2", model_from_matrix(two, Potential::quartic()), 48},
      {"bumped2", model_from_matrix(two, Potential::bumped_quartic(0.5)), 48},
      {"gauss3", model_from_matrix(chain_matrix(3, 1.0, -0.2)), 20},
  };
}

// Even k: smooth random functional; odd k: independent noise per grid node.
Eigen::VectorXd random_function(const GridMeasure& gm, const CounterRng& rng, std::uint64_t k) {
  if (k % 2 == 1) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(gm.states()));
    for (Eigen::Index u = 0; u < f.size(); ++u) f[u] = rng.normal(k, static_cast<std::uint64_t>(u), 0);
    return f;
  }
  std::vector<double> c;
  for (std::uint64_t q = 0; q < 4 * gm.sites + 1; ++q) c.push_back(rng.normal(k, q, 1));
  return gm.tabulate([&](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const auto b = 4 * static_cast<std::size_t>(i);
      v += c[b] * x[i] + c[b + 1] * x[i] * x[i] + c[b + 2] * std::sin(x[i]) + c[b + 3] * std::exp(-x[i] * x[i]);
    }
    return v + c.back() * x[0] * x[x.size() - 1];
  });
}

Outcome criterion1() {
  std::ostringstream out;
  bool ok = true;
  double worst_quad = 0.0, worst_z = 0.0;
  std::size_t min_samples = std::numeric_limits<std::size_t>::max();
  const std::vector<Eigen::MatrixXd> mats{chain_matrix(2, 1.0, -0.2), chain_matrix(3, 1.0, -0.2)};
  for (std::size_t m = 0; m < mats.size(); ++m) {
    const ModelSpec model = model_from_matrix(mats[m]);
    const auto oracle = gaussian_oracle(model);
    GridSpec g{6.0, 256, 20000000};
    const GridMeasure gm = build_grid_measure(model, g);
    const Eigen::MatrixXd quad = covariance_matrix(gm);
    const double err = (quad - oracle.covariance).cwiseAbs().maxCoeff();
    worst_quad = std::max(worst_quad, err);
    ok = ok && err <= 1e-3;

    ChainConfig cfg;
    cfg.steps = 102000;
    cfg.burn_in = 2000;
    cfg.proposal_sd = 1.0;
    cfg.seed = 1000 + m;
    const SampleBatch batch = run_chain(model, cfg);
    min_samples = std::min(min_samples, batch.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
      for (std::size_t j = i; j < model.size(); ++j) {
        const auto e = estimate_cov(batch, i, j);
        const double z = std::abs(e.value - oracle.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) /
                         e.std_error;
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 3.0;
      }
    }
  }
  ok = ok && min_samples >= 100000;
  out << "quadrature max|cov-(2M)^-1| = " << fmt(worst_quad) << " (tol 1e-3, n=256, a=6); sampler worst |z| = "
      << fmt(worst_z, 3) << " over " << min_samples << " samples (tol 3)";
  return {ok, out.str()};
}

Outcome criterion2() {
  std::ostringstream out;
  bool ok = true;
  Eigen::MatrixXd ou(1, 1);
  ou << 0.5;
  const Eigen::MatrixXd two = chain_matrix(2, 1.0, -0.2);
  struct Case {
    std::string name;
    ModelSpec model;
    double exact;
    double tol;
    std::vector<std::size_t> ns;
  };
  const std::vector<Case> cases{{"ou", model_from_matrix(ou), 1.0, 0.01, {64, 128, 256}},
                                {"gauss2", model_from_matrix(two), 1.6, 0.02, {32, 64, 128}}};
  for (const auto& c : cases) {
    std::vector<double> errs;
    double last = 0.0;
    for (auto n : c.ns) {
      const GridMeasure gm = build_grid_measure(c.model, {0.0, n});
      const auto est = spectral_gap(build_generator(gm));
      last = est.gap;
      errs.push_back(std::abs(est.gap - c.exact) / c.exact);
    }
    bool converging = true;
    for (std::size_t k = 1; k < errs.size(); ++k) converging = converging && errs[k] < errs[k - 1];
    ok = ok && errs.back() <= c.tol && converging;
    out << c.name << ": gap " << fmt(last, 6) << " vs " << c.exact << ", rel err by n:";
    for (std::size_t k = 0; k < errs.size(); ++k) out << " " << c.ns[k] << "->" << fmt(errs[k], 3);
    out << (converging ? " (converging)" : " (NOT converging)") << "; ";
  }
  return {ok, out.str()};
}

Outcome criterion3() {
  std::ostringstream out;
  bool ok = true;
  double worst = 0.0;
  for (const auto& nm : exact_models()) {
    const GridMeasure gm = build_grid_measure(nm.model, {0.0, nm.points});
    const GeneratorHandle gen = build_generator(gm);
    const CounterRng rng{0xC0FFEEULL + nm.points + nm.model.size()};
    double model_worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Eigen::VectorXd f = random_function(gm, rng, 2 * k);
      const Eigen::VectorXd g = random_function(gm, rng, 2 * k + 1 + (k % 2 ? 0 : 40));
      const auto sol = solve_poisson(gen, f);
      const double lhs = covariance(gm, f, g);
      const double rhs = dirichlet_form(gen, sol.phi, g);
      const double scale = std::sqrt(covariance(gm, f, f) * covariance(gm, g, g));
      model_worst = std::max(model_worst, std::abs(lhs - rhs) / scale);
    }
    worst = std::max(worst, model_worst);
    ok = ok && model_worst <= 1e-8;
    out << nm.name << " " << fmt(model_worst, 2) << "; ";
  }
  out << "worst |cov(f,g)-E(phi_f,g)|/(sd f sd g) = " << fmt(worst, 2) << " (tol 1e-8, 20 pairs per model)";
  return {ok, out.str()};
}

Outcome criterion4() {
  std::ostringstream out;
  bool ok = true;
  double min_dual = std::numeric_limits<double>::infinity(), min_pi = min_dual, worst_eig = 0.0;
  for (const auto& nm : exact_models()) {
    const GridMeasure gm = build_grid_measure(nm.model, {0.0, nm.points});
    const GeneratorHandle gen = build_generator(gm);
    const auto gap = spectral_gap(gen);
    const CounterRng rng{0xD0A1ULL + nm.points};
    std::vector<Eigen::VectorXd> fs;
    for (std::size_t i = 0; i < gm.sites; ++i) fs.push_back(gm.coordinate_function(i));
    for (std::uint64_t k = 0; k < 20; ++k) fs.push_back(random_function(gm, rng, k));
    for (const auto& f : fs) {
      const auto sol = solve_poisson(gen, f);
      const double ef = dirichlet_form(gen, f, f);
      const double ephi = dirichlet_form(gen, sol.phi, sol.phi);
      const double var = covariance(gm, f, f);
      const double dual = ef / (gap.gap * gap.gap * ephi);
      const double pi = ef / (gap.gap * var);
      min_dual = std::min(min_dual, dual);
      min_pi = std::min(min_pi, pi);
      ok = ok && dual >= 1.0 - 1e-8 && pi >= 1.0 - 1e-8;
    }
    const Eigen::VectorXd& e = gap.eigenfunction;
    const double ratio = gap.gap * covariance(gm, e, e) / dirichlet_form(gen, e, e);
    worst_eig = std::max(worst_eig, std::abs(ratio - 1.0));
    ok = ok && std::abs(ratio - 1.0) <= 0.01;
  }
  out << "min gap^-2 E(f,f)/E(phi,phi) = " << fmt(min_dual, 6) << ", min gap^-1 E(f,f)/Var f = " << fmt(min_pi, 6)
      << " (both >= 1); eigenfunction |gap Var/E - 1| = " << fmt(worst_eig, 2) << " (tol 1%)";
  return {ok, out.str()};
}

Outcome criterion5() {
  const ModelSpec model = power_law_chain(64, 0.2, 3.0, true);
  const auto oracle = gaussian_oracle(model);
  const Eigen::VectorXd e = oracle.directional_energies(0);
  std::vector<FitPoint> pts;
  for (Eigen::Index k = 1; k < e.size(); ++k) pts.push_back({static_cast<double>(k), e[k]});
  const FitResult f = fit_power_law(restrict_range(pts, 4, 24));
  const double slope = -f.alpha_hat;
  std::ostringstream out;
  out << "slope of k -> int|d_k phi|^2 on r in [4,24] = " << fmt(slope, 5) << " (need <= -2.7), rmse " << fmt(f.rmse, 2);
  return {slope <= -3.0 + 0.3, out.str()};
}

Outcome criterion6() {
  std::ostringstream out;
  bool ok = true;
  struct Case {
    std::int64_t d;
    Lattice lattice;
    double exponent;
  };
  const std::vector<Case> cases{{1, Lattice({-50}, {101}), 3.0}, {2, Lattice({40, 40}), 5.0}};
  for (const auto& c : cases) {
    ModelInput in;
    in.lattice = c.lattice;
    in.potentials = {Potential::gaussian()};
    in.kernel = InteractionKernel::power_law(1.0, c.exponent, 1.0, false);
    const ModelSpec model = build_model(in);
    const auto rep = verify_coefficient_bounds(model, {1.5, 2.5, 3.5, 4.5}, 0.1);
    ok = ok && rep.p_bound_holds && rep.monotone_growth.empty();
    out << "d=" << c.d << ": p >= (floor R+1)^d " << (rep.p_bound_holds ? "holds" : "FAILS");
    for (const auto& [name, vals] : rep.families) {
      out << "; " << name << " [";
      for (std::size_t k = 0; k < vals.size(); ++k) out << (k ? " " : "") << fmt(vals[k], 4);
      out << "]";
      if (std::find(rep.monotone_growth.begin(), rep.monotone_growth.end(), name) != rep.monotone_growth.end()) {
        const bool sat = std::find(rep.saturating.begin(), rep.saturating.end(), name) != rep.saturating.end();
        out << " monotone growth" << (sat ? " (increments shrinking)" : "");
      }
    }
    out << " | ";
  }
  return {ok, out.str()};
}

Outcome criterion7() {
  std::ostringstream out;
  bool ok = true;
  auto build = [](int n, const CounterRng* rng) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (i == j) {
          A(i, i) = 2.0;
          continue;
        }
        const double u = rng ? 0.5 + 0.5 * rng->uniform(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 0) : 1.0;
        A(i, j) = A(j, i) = -0.1 * u * std::pow(1.0 + (j - i), -3.0);
      }
    }
    return A;
  };
  double worst_slope = -std::numeric_limits<double>::infinity(), min_entry = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::string, Eigen::MatrixXd>> mats;
  for (int n : {32, 64, 128, 256}) mats.push_back({"n=" + std::to_string(n), build(n, nullptr)});
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CounterRng rng{77 + s};
    mats.push_back({"random" + std::to_string(s), build(128, &rng)});
  }
  for (const auto& [name, A] : mats) {
    const auto inv = inverse_decay(A);
    const double slope = inv.fit ? inv.slope() : 0.0;
    worst_slope = std::max(worst_slope, slope);
    min_entry = std::min(min_entry, inv.min_entry);
    ok = ok && inv.nonnegative && inv.fit && slope <= -3.0 + 0.2;
    out << name << " slope " << fmt(slope, 4) << "; ";
  }
  out << "min entry " << fmt(min_entry, 3) << ", worst slope " << fmt(worst_slope, 4) << " (need >= 0 and <= -2.8)";
  return {ok, out.str()};
}

Outcome criterion8() {
  std::ostringstream out;
  const ModelSpec gauss = model_from_matrix(chain_matrix(3, 1.0, -0.2));
  const ModelSpec quartic = model_from_matrix(chain_matrix(3, 1.0, -0.15), Potential::quartic());
  const auto rg = verify_lebowitz_exact(gauss, 2.0);
  const auto rq = verify_lebowitz_exact(quartic, 2.0);
  bool ok = rg.holds && rq.holds && rg.nonnegative && rq.nonnegative;
  const LebowitzSplit* split = nullptr;
  for (const auto& s : rg.splits)
    if (s.i == 0 && s.j == 2 && s.A == std::vector<std::size_t>{0}) split = &s;
  if (!split) return {false, "split A={0}, i=0, j=2 missing"};
  const bool lhs_ok = std::abs(split->lhs - 0.021739) <= 1e-3;
  const bool rhs_ok = std::abs(split->rhs - 0.02363) <= 1e-3;
  const bool c1_fails = split->rhs_unit < split->lhs;
  ok = ok && lhs_ok && rhs_ok && c1_fails;
  out << "c=2 holds on all " << rg.splits.size() << " splits: gaussian " << (rg.holds ? "yes" : "NO") << ", quartic "
      << (rq.holds ? "yes" : "NO") << "; A={0}: LHS " << fmt(split->lhs, 6) << " RHS(c=2) " << fmt(split->rhs, 6)
      << " RHS(c=1) " << fmt(split->rhs_unit, 6) << (c1_fails ? " < LHS (c=1 fails)" : " >= LHS")
      << "; minimal c: gaussian " << fmt(rg.min_coupling, 4) << ", quartic " << fmt(rq.min_coupling, 4);
  return {ok, out.str()};
}

Outcome criterion9() {
  std::ostringstream out;
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < 10; ++t) {
    const CounterRng rng{900 + t};
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
    int q = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j, ++q) {
        const double mag = 0.05 + 0.25 * rng.uniform(static_cast<std::uint64_t>(q), 0, 0);
        const double sign = rng.uniform(static_cast<std::uint64_t>(q), 1, 0) < 0.5 ? -1.0 : 1.0;
        M(i, j) = M(j, i) = sign * mag;
      }
    }
    const Potential psi = t % 2 ? Potential::quartic() : Potential::gaussian();
    const ModelSpec model = model_from_matrix(M, psi);
    const ModelSpec fer = ferromagnetize(model);
    const GridSpec g{0.0, 40};
    const Eigen::MatrixXd c = covariance_matrix(build_grid_measure(model, g));
    const Eigen::MatrixXd cf = covariance_matrix(build_grid_measure(fer, g));
    const double excess = (c.cwiseAbs() - cf).maxCoeff();
    worst = std::max(worst, excess);
    ok = ok && excess <= 1e-8;
  }
  out << "max over 10 models of (|cov| - cov_fer) = " << fmt(worst, 3) << " (tol 1e-8)";
  return {ok, out.str()};
}

Outcome criterion10() {
  const ModelSpec model = power_law_chain(128, 0.05, 2.0, true);
  const auto oracle = gaussian_oracle(model);
  const double d = 1.0, alpha0 = 0.4;
  double C0 = 0.0;
  for (Eigen::Index i = 0; i < oracle.covariance.rows(); ++i)
    for (Eigen::Index j = 0; j < oracle.covariance.cols(); ++j)
      if (i != j) C0 = std::max(C0, oracle.covariance(i, j) * std::pow(1.0 + std::abs(i - j), d + alpha0));
  BootstrapParams params;
  const auto res = run_bootstrap(model, C0, alpha0, params, oracle.covariance.diagonal());
  const double gap = (res.field.bounds - oracle.covariance).minCoeff();
  const double a_final = res.fit.alpha_hat;
  const double a_seed = res.alpha_history.front();
  const bool dominates = gap >= -1e-12;
  const bool improves = a_final > alpha0 && std::abs(a_final - 1.0) < std::abs(alpha0 - 1.0);
  std::ostringstream out;
  out << "L = " << res.L << ", " << res.iterations << " sweeps; min(B - cov) = " << fmt(gap, 3)
      << "; alpha_hat seed " << fmt(a_seed, 4) << " -> final " << fmt(a_final, 4) << " (target 1)";
  return {dominates && improves, out.str()};
}

Outcome criterion11() {
  std::ostringstream out;
  bool ok = true;
  double worst_eig = -std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < 20; ++t) {
    const CounterRng rng{1100 + t};
    const int n = 2 + static_cast<int>(rng.uniform(0, 0, 0) * 7.0);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        M(i, j) = M(j, i) = rng.normal(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 1);
    for (int i = 0; i < n; ++i) {
      const double row = M.row(i).cwiseAbs().sum();
      M(i, i) = row * (1.0 + rng.uniform(static_cast<std::uint64_t>(i), 0, 2)) + 0.1;
    }
    Eigen::MatrixXd F = -M.cwiseAbs();
    F.diagonal() = M.diagonal();
    const double lm = gaussian_oracle(M).gap;
    const double lf = gaussian_oracle(F).gap;
    worst_eig = std::max(worst_eig, lf - lm);
    ok = ok && lm >= lf - 1e-12;
  }
  double worst_grid = -std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0; t < 5; ++t) {
    const CounterRng rng{1200 + t};
    const double off = (rng.uniform(0, 0, 0) < 0.5 ? -1.0 : 1.0) * (0.1 + 0.5 * rng.uniform(0, 1, 0));
    Eigen::MatrixXd M(2, 2);
    M << 1.0, off, off, 1.0 + rng.uniform(0, 2, 0);
    const ModelSpec model = model_from_matrix(M);
    const ModelSpec fer = ferromagnetize(model);
    const GridSpec g{0.0, 128};
    const GridMeasure gm = build_grid_measure(model, g);
    const GridMeasure gf = build_grid_measure(fer, g);
    const double gm_gap = spectral_gap(build_generator(gm)).gap;
    const double gf_gap = spectral_gap(build_generator(gf)).gap;
    worst_grid = std::max(worst_grid, (gf_gap - gm_gap) / gf_gap);
    ok = ok && gm_gap >= gf_gap * (1.0 - 0.02);
  }
  out << "20 random M: max lambda_min(2M_fer) - lambda_min(2M) = " << fmt(worst_eig, 3)
      << " (<= 0); 2-site grids: max relative shortfall " << fmt(worst_grid, 3) << " (tol 2%)";
  return {ok, out.str()};
}

Outcome criterion12() {
  ModelInput in;
  in.lattice = Lattice({2});
  in.potentials = {Potential::quartic()};
  in.kernel = InteractionKernel::power_law(0.3, 3.0, 1.0, true);
  in.shell_width = 4;
  const ModelSpec base = build_model(in);
  const auto shell = coupled_shell(base);
  std::vector<Eigen::VectorXd> vars;
  for (std::uint64_t b = 0; b < 20; ++b) {
    const CounterRng rng{1300 + b};
    std::vector<ExteriorSpin> spins;
    for (std::size_t k = 0; k < shell.size(); ++k) spins.push_back({shell[k], 10.0 * (2.0 * rng.uniform(k, 0, 0) - 1.0)});
    const ModelSpec m = with_boundary(base, spins);
    const GridMeasure gm = build_grid_measure(m, {0.0, 96});
    vars.push_back(covariance_matrix(gm).diagonal());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::vector<double> v;
    for (const auto& x : vars) v.push_back(x[static_cast<Eigen::Index>(i)]);
    std::sort(v.begin(), v.end());
    const double median = 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    worst = std::max(worst, v.back() / median);
  }
  std::ostringstream out;
  out << shell.size() << " shell spins, |w| <= 10, 20 boundaries: max Var / median Var = " << fmt(worst, 4) << " (tol 4)";
  return {worst <= 4.0, out.str()};
}

Outcome criterion13() {
  const ModelSpec model = power_law_chain(16, 0.2, 3.0, true);
  const auto oracle = gaussian_oracle(model);
  ChainConfig cfg;
  cfg.scheme = Scheme::Mala;
  cfg.steps = 202000;
  cfg.burn_in = 2000;
  cfg.proposal_sd = 0.5;
  cfg.seed = 1313;
  std::ostringstream out;
  bool ok = true;
  std::vector<double> est;
  for (std::int64_t r : {2, 4, 8}) {
    const Site k{-r};
    const double delta = 1.0;
    const Eigen::VectorXd col = model.exterior_column(k);
    const double exact = std::abs(delta * (oracle.covariance * (2.0 * col))[0]);
    const auto e = ds_influence(model, Site{0}, k, delta, cfg);
    const double tol = std::max(3.0 * e.std_error, 1e-9 * exact);
    ok = ok && std::abs(e.value - exact) <= tol;
    est.push_back(e.value);
    out << "r=" << r << ": " << fmt(e.value, 6) << " +- " << fmt(e.std_error, 2) << " vs " << fmt(exact, 6) << "; ";
  }
  const bool decreasing = est[0] > est[1] && est[1] > est[2];
  out << "tol max(3 se, 1e-9 |exact|); " << (decreasing ? "monotone decreasing" : "NOT monotone");
  return {ok && decreasing, out.str()};
}

struct Entry {
  int id;
  const char* title;
  Outcome (*fn)();
  double time_limit;  // seconds, 0 = none
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {1, "gaussian covariance oracle", criterion1, 60},
      {2, "spectral gap oracle", criterion2, 120},
      {3, "covariance representation identity", criterion3, 0},
      {4, "dual Poincare and Poincare inequalities", criterion4, 0},
      {5, "directional Poincare exponent", criterion5, 10},
      {6, "block coefficient bounds", criterion6, 120},
      {7, "block matrix inverse decay", criterion7, 30},
      {8, "Lebowitz inequality on 3-site models", criterion8, 0},
      {9, "ferromagnetic domination", criterion9, 0},
      {10, "bootstrap soundness and improvement", criterion10, 60},
      {11, "Gaussian gap comparison with ferromagnetic model", criterion11, 0},
      {12, "uniform variance over boundaries", criterion12, 0},
      {13, "boundary-spin influence decay", criterion13, 0},
  };
  return r;
}

}  // namespace

std::vector<int> suite_criteria(const std::string& name) {
  if (name == "acceptance") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
  if (name == "gaussian") return {1, 2, 5, 7, 10, 11, 13};
  throw Error(ErrorKind::InvalidArgument, "unknown suite '" + name + "' (acceptance, gaussian)");
}

CriterionResult run_criterion(int id) {
  const auto& reg = registry();
  auto it = std::find_if(reg.begin(), reg.end(), [id](const Entry& e) { return e.id == id; });
  if (it == reg.end()) throw Error(ErrorKind::InvalidArgument, "no criterion " + std::to_string(id));
  CriterionResult res;
  res.id = id;
  res.title = it->title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = it->fn();
    res.passed = o.passed;
    res.detail = o.detail;
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (it->time_limit > 0 && res.seconds > it->time_limit) {
    res.passed = false;
    res.detail += "; runtime over " + fmt(it->time_limit, 3) + " s";
  }
  return res;
}

std::vector<CriterionResult> run_suite(const std::vector<int>& ids,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << " " << std::setw(2) << r.id << "  " << r.title << ": " << r.detail << " ("
    << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return s.str();
}

}  // namespace gibbslab
