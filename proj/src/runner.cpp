#include "gibbslab/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gibbslab/blockavg.hpp"
#include "gibbslab/bootstrap.hpp"
#include "gibbslab/config.hpp"
#include "gibbslab/exact.hpp"
#include "gibbslab/fit.hpp"
#include "gibbslab/gaussian.hpp"
#include "gibbslab/numerics.hpp"
#include "gibbslab/report.hpp"
#include "gibbslab/sampler.hpp"
#include "gibbslab/suite.hpp"

namespace gibbslab {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigParse: return 2;
    case ErrorKind::Io: return 5;
    case ErrorKind::NonDominant:
    case ErrorKind::AsymmetricInteraction:
    case ErrorKind::DecayViolated:
    case ErrorKind::IllTemperedBoundary:
    case ErrorKind::InvalidPotential:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::BadRadius:
    case ErrorKind::InvalidArgument:
    case ErrorKind::ConditionViolated:
    case ErrorKind::BadSplit: return 3;
    default: return 4;
  }
}

namespace {

struct Context {
  ExperimentConfig cfg;
  std::string out;
  std::string format;
  std::vector<std::pair<std::string, std::string>> manifest;

  void note(const std::string& key, const std::string& value) { manifest.emplace_back(key, value); }
  std::string write(const Table& t, const std::string& stem) const {
    const std::string path = write_table(t, out, stem, format);
    std::cout << "wrote " << path << "\n";
    return path;
  }
};

bool all_gaussian(const ModelSpec& model) {
  for (const auto& p : model.potentials)
    if (p.name != "gaussian") return false;
  return true;
}

std::int64_t site_dist(const ModelSpec& model, std::size_t i, std::size_t j) {
  return dist(model.lattice.site(i), model.lattice.site(j));
}

std::vector<std::pair<std::size_t, std::size_t>> select_pairs(const ModelSpec& model, const std::string& mode) {
  const std::size_t n = model.size();
  const bool all = mode == "all" || (mode == "auto" && n <= 64);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (all || i == 0) out.emplace_back(i, j);
  return out;
}

void add_cov(Table& t, const ModelSpec& model, std::size_t i, std::size_t j, double value, double stderr_,
             const std::string& method) {
  t.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), site_dist(model, i, j), value, stderr_, method});
}

int run_exact(Context& ctx, const ModelSpec& model) {
  const GridMeasure gm = build_grid_measure(model, ctx.cfg.grid);
  const Eigen::MatrixXd cov = covariance_matrix(gm);
  Table t = covariance_table();
  for (std::size_t i = 0; i < model.size(); ++i)
    for (std::size_t j = i; j < model.size(); ++j)
      add_cov(t, model, i, j, cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 0.0, "quadrature");
  if (all_gaussian(model)) {
    const auto oracle = gaussian_oracle(model);
    for (std::size_t i = 0; i < model.size(); ++i)
      for (std::size_t j = i; j < model.size(); ++j)
        add_cov(t, model, i, j, oracle.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 0.0,
                "oracle");
  }
  ctx.write(t, "covariance");

  const auto gap = spectral_gap(build_generator(gm));
  Table s = key_value_table();
  s.add({std::string("gap"), gap.gap});
  s.add({std::string("gap_method"), gap.method});
  s.add({std::string("log_norm"), gm.log_norm});
  s.add({std::string("delta"), model.delta});
  s.add({std::string("half_width"), gm.half_width});
  s.add({std::string("points_per_site"), static_cast<std::int64_t>(gm.points())});
  s.add({std::string("states"), static_cast<std::int64_t>(gm.states())});
  if (all_gaussian(model)) s.add({std::string("gap_oracle"), gaussian_oracle(model).gap});
  ctx.write(s, "summary");
  return 0;
}

int run_sample(Context& ctx, const ModelSpec& model) {
  const SampleBatch batch = run_chain(model, ctx.cfg.chain);
  const std::string method = ctx.cfg.chain.scheme == Scheme::Mala ? "mala" : "metropolis";
  Table t = covariance_table();
  for (auto [i, j] : select_pairs(model, ctx.cfg.pairs)) {
    const auto e = estimate_cov(batch, i, j);
    add_cov(t, model, i, j, e.value, e.std_error, method);
  }
  ctx.write(t, "covariance");
  Table s = key_value_table();
  s.add({std::string("samples"), static_cast<std::int64_t>(batch.size())});
  s.add({std::string("accept_rate"), batch.accept_rate});
  ctx.write(s, "summary");
  return 0;
}

int run_blockcoef(Context& ctx, const ModelSpec& model) {
  const auto rep = verify_coefficient_bounds(model, ctx.cfg.radii, ctx.cfg.epsilon);
  Table t = coefficient_table();
  for (const auto& r : rep.rows)
    t.add({static_cast<std::int64_t>(r.d), r.R, r.quantity, r.offset, r.value, r.bound, r.ratio});
  const auto d = static_cast<std::int64_t>(model.lattice.dim());
  for (double R : ctx.cfg.radii) {
    const BlockMatrix bm = assemble_block_matrix(model, R, ctx.cfg.rho, ctx.cfg.block_C);
    const double margin = bm.dominance_margin();
    t.add({d, R, std::string("dominance_margin"), std::string(""), margin, 0.0, margin});
    if (margin > 0.0 && bm.A.rows() > 1) {
      const auto inv = inverse_decay(bm);
      const double slope = inv.fit ? inv.slope() : std::nan("");
      t.add({d, R, std::string("inverse_slope"), std::string(""), slope, -(rep.alpha + 2.0 * static_cast<double>(d)),
             inv.min_entry});
    }
  }
  ctx.write(t, "coefficients");
  if (!rep.p_bound_holds) std::cerr << "warning: p lower bound violated\n";
  for (const auto& f : rep.monotone_growth) std::cerr << "note: " << f << " grows monotonically with R\n";
  return 0;
}

Eigen::MatrixXd covariance_estimate(const Context& ctx, const ModelSpec& model, std::string& method) {
  if (all_gaussian(model)) {
    method = "oracle";
    return gaussian_oracle(model).covariance;
  }
  try {
    const GridMeasure gm = build_grid_measure(model, ctx.cfg.grid);
    method = "quadrature";
    return covariance_matrix(gm);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  method = ctx.cfg.chain.scheme == Scheme::Mala ? "mala" : "metropolis";
  const SampleBatch batch = run_chain(model, ctx.cfg.chain);
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      c(i, j) = c(j, i) = estimate_cov(batch, static_cast<std::size_t>(i), static_cast<std::size_t>(j)).value;
  return c;
}

int run_bootstrap_cmd(Context& ctx, const ModelSpec& model) {
  require_lebowitz_conditions(model);
  std::string method;
  const Eigen::MatrixXd cov = covariance_estimate(ctx, model, method);
  const double d = static_cast<double>(model.lattice.dim());
  double C0 = 0.0;
  if (ctx.cfg.C0) {
    C0 = *ctx.cfg.C0;
  } else {
    for (std::size_t i = 0; i < model.size(); ++i)
      for (std::size_t j = 0; j < model.size(); ++j)
        if (i != j)
          C0 = std::max(C0, cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                                std::pow(1.0 + static_cast<double>(site_dist(model, i, j)), d + ctx.cfg.alpha0));
    if (C0 <= 0.0) C0 = cov.diagonal().maxCoeff();
  }
  BootstrapParams params;
  params.L = ctx.cfg.L;
  params.coupling_factor = ctx.cfg.coupling_factor;
  params.max_iterations = ctx.cfg.max_iterations;
  const auto res = run_bootstrap(model, C0, ctx.cfg.alpha0, params, cov.diagonal());
  Table t = bootstrap_table();
  for (const auto& r : res.rows)
    t.add({static_cast<std::int64_t>(r.iteration), r.dist, r.max_bound, r.C_fit, r.alpha_fit, r.coupling, r.L});
  ctx.write(t, "bootstrap");
  Table s = key_value_table();
  s.add({std::string("C0"), C0});
  s.add({std::string("alpha0"), ctx.cfg.alpha0});
  s.add({std::string("diagonal_method"), method});
  s.add({std::string("L"), res.L});
  s.add({std::string("iterations"), static_cast<std::int64_t>(res.iterations)});
  s.add({std::string("alpha_hat"), res.fit.alpha_hat});
  s.add({std::string("min_bound_minus_cov"), (res.field.bounds - cov).minCoeff()});
  ctx.write(s, "summary");
  return 0;
}

int run_fit(Context& ctx) {
  if (ctx.cfg.fit_input.empty()) throw Error(ErrorKind::ConfigParse, "fit needs [fit] input or --input");
  std::ifstream in(ctx.cfg.fit_input);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + ctx.cfg.fit_input);
  std::stringstream buf;
  buf << in.rdbuf();
  const Table t = parse_csv(buf.str());
  auto column = [&](std::initializer_list<const char*> names) -> std::size_t {
    for (const char* n : names)
      for (std::size_t k = 0; k < t.columns.size(); ++k)
        if (t.columns[k] == n) return k;
    throw Error(ErrorKind::ConfigParse, ctx.cfg.fit_input + ": needs columns r,v or dist,value");
  };
  const std::size_t rc = column({"r", "dist"});
  const std::size_t vc = column({"v", "value"});
  auto num = [](const Cell& c) {
    if (auto p = std::get_if<double>(&c)) return *p;
    if (auto p = std::get_if<std::int64_t>(&c)) return static_cast<double>(*p);
    throw Error(ErrorKind::ConfigParse, "non-numeric cell '" + std::get<std::string>(c) + "'");
  };
  std::vector<FitPoint> pts;
  for (const auto& row : t.rows) {
    const double r = num(row[rc]);
    if (r >= 1.0) pts.push_back({r, num(row[vc])});
  }
  const auto windowed = apply_window(envelope(pts), {ctx.cfg.fit_r_min, ctx.cfg.fit_outer_fraction});
  const FitResult f = fit_power_law(windowed);
  Table s = key_value_table();
  s.add({std::string("C"), f.C});
  s.add({std::string("alpha_hat"), f.alpha_hat});
  s.add({std::string("rmse"), f.rmse});
  s.add({std::string("n_points"), static_cast<std::int64_t>(f.n_points)});
  ctx.write(s, "fit");
  return 0;
}

int run_verify(Context& ctx, const std::string& suite) {
  const auto ids = suite_criteria(suite);
  Table t;
  t.columns = {"criterion", "name", "status", "detail"};
  bool ok = true;
  run_suite(ids, [&](const CriterionResult& r) {
    std::cout << summary_line(r) << std::endl;
    ok = ok && r.passed;
    t.add({static_cast<std::int64_t>(r.id), r.title, std::string(r.passed ? "pass" : "fail"), r.detail});
  });
  ctx.note("suite", suite);
  ctx.write(t, "acceptance");
  return ok ? 0 : 1;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int dispatch(const RunOptions& opt) {
  Context ctx;
  if (!opt.config_path.empty()) {
    ctx.cfg = load_config(opt.config_path);
  } else if (opt.subcommand != "verify" && !(opt.subcommand == "fit" && opt.fit_input)) {
    throw Error(ErrorKind::ConfigParse, opt.subcommand + " needs --config");
  }
  if (opt.seed) {
    ctx.cfg.seed = *opt.seed;
    ctx.cfg.chain.seed = *opt.seed;
  }
  if (opt.fit_input) ctx.cfg.fit_input = *opt.fit_input;
  ctx.out = opt.out.value_or(ctx.cfg.out);
  ctx.format = opt.format.value_or(ctx.cfg.format);
  if (ctx.format != "csv" && ctx.format != "json") throw Error(ErrorKind::ConfigParse, "format must be csv or json");

  ctx.note("version", kVersion);
  ctx.note("command", opt.subcommand);
  ctx.note("config", opt.config_path);
  ctx.note("config_hash", std::to_string(fnv1a(ctx.cfg.source)));
  ctx.note("seed", std::to_string(ctx.cfg.seed));
  ctx.note("chain_seed", std::to_string(ctx.cfg.chain.seed));
  ctx.note("boundary_seed", std::to_string(ctx.cfg.boundary_seed));
  ctx.note("threads", std::to_string(thread_count()));

  int code = 0;
  const auto& cmd = opt.subcommand;
  if (cmd == "verify") {
    code = run_verify(ctx, opt.suite);
  } else if (cmd == "fit") {
    code = run_fit(ctx);
  } else {
    const ModelSpec model = build_model(ctx.cfg);
    ctx.note("model_fingerprint", std::to_string(fingerprint(model)));
    ctx.note("sites", std::to_string(model.size()));
    if (cmd == "exact") code = run_exact(ctx, model);
    else if (cmd == "sample") code = run_sample(ctx, model);
    else if (cmd == "blockcoef") code = run_blockcoef(ctx, model);
    else if (cmd == "bootstrap") code = run_bootstrap_cmd(ctx, model);
    else throw Error(ErrorKind::ConfigParse, "unknown subcommand '" + cmd + "'");
  }
  ctx.note("timestamp", timestamp());
  Table m = key_value_table();
  for (const auto& [k, v] : ctx.manifest) m.add({k, v});
  ctx.write(m, "manifest");
  return code;
}

}  // namespace

int run_experiment(const RunOptions& options) {
  try {
    return dispatch(options);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace gibbslab
