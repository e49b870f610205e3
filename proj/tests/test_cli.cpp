#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gibbslab/config.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/fit.hpp"
#include "gibbslab/report.hpp"
#include "gibbslab/runner.hpp"

using namespace gibbslab;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigParse);
    return e.what();
  }
  return {};
}

ErrorKind fit_error(const std::vector<FitPoint>& pts) {
  try {
    fit_power_law(pts);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gibbslab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kTwoSite = R"(
[lattice]
extent = [2]
[interaction]
kind = "explicit"
matrix = [[1.0, -0.2],
          [-0.2, 1.0]]
[chain]
steps = 2000
burn_in = 100
[run]
seed = 7
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const auto c = parse_config(kTwoSite);
    CHECK(c.extents == std::vector<std::int64_t>{2});
    REQUIRE(c.matrix.size() == 2);
    CHECK(c.matrix[1][0] == -0.2);
    CHECK(c.seed == 7);
    CHECK(c.chain.seed == 7);
    CHECK(c.chain.steps == 2000);

    const auto d = parse_config("[lattice]\ndimension = 2\nextent = 5\n");
    CHECK(d.extents == std::vector<std::int64_t>{5, 5});

    const auto t = parse_config_text("[a]\nx = 1 # trailing\ny = \"s # not a comment\"\nz = true\n");
    CHECK(t.at("a").at("x").as_int() == 1);
    CHECK(t.at("a").at("y").as_string() == "s # not a comment");
    CHECK(t.at("a").at("z").as_bool());
  }

  TEST_CASE("config errors carry line numbers") {
    CHECK(parse_error("[lattice]\nextent = 4\nextent = 5\n").find("line 3") != std::string::npos);
    CHECK(parse_error("[lattice]\nextent = 4\nextent = 5\n").find("duplicate key") != std::string::npos);
    CHECK(parse_error("[lattice]\n\nbogus = 1\n").find("line 3") != std::string::npos);
    CHECK(parse_error("[lattice]\n\nbogus = 1\n").find("unknown key") != std::string::npos);
    CHECK(parse_error("[nosuch]\nx = 1\n").find("unknown section") != std::string::npos);
    CHECK(parse_error("x = 1\n").find("line 1") != std::string::npos);
    CHECK(parse_error("[run]\nformat = \"xml\"\n").find("line 2") != std::string::npos);
    CHECK(parse_error("[lattice]\nextent = [1, 2\n").find("line 2") != std::string::npos);
    CHECK(parse_error("[lattice\n").find("line 1") != std::string::npos);
    CHECK(parse_error("[chain]\nscheme = \"gibbs\"\n").find("unknown scheme") != std::string::npos);
  }

  TEST_CASE("fit_power_law") {
    std::vector<FitPoint> pts;
    for (int r = 1; r <= 32; ++r) pts.push_back({double(r), 3.0 * std::pow(1.0 + r, -2.5)});
    const auto f = fit_power_law(pts);
    CHECK(f.C == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(f.alpha_hat == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(f.rmse < 1e-10);
    CHECK(f.n_points == 32);

    std::vector<FitPoint> flat;
    for (int r = 1; r <= 8; ++r) flat.push_back({double(r), 0.25});
    const auto g = fit_power_law(flat);
    CHECK(std::abs(g.alpha_hat) < 1e-12);
    CHECK(g.C == doctest::Approx(0.25));

    CHECK(fit_error({{2, 1}, {2, 0.5}, {2, 0.3}, {2, 0.1}}) == ErrorKind::DegeneratePoints);
    CHECK(fit_error({{1, 1}, {2, 0.5}, {3, 0.3}}) == ErrorKind::TooFewPoints);
    CHECK(fit_error({{1, 1}, {2, 0.5}, {3, -0.3}, {4, 0.1}}) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("apply_window and envelope") {
    std::vector<FitPoint> pts;
    for (int r = 0; r <= 9; ++r) pts.push_back({double(r), 1.0 / (1 + r)});
    const auto w = apply_window(pts, {2.0, 0.25});
    REQUIRE(w.size() == 6);
    CHECK(w.front().r == 2.0);
    CHECK(w.back().r == 7.0);
    CHECK(apply_window(pts, {2.0, 0.0}).size() == 8);
    CHECK(apply_window(pts, {20.0, 0.25}).empty());

    const auto e = envelope({{1, 0.5}, {1, 0.7}, {2, -1.0}, {3, 0.1}, {3, 0.0}});
    REQUIRE(e.size() == 2);
    CHECK(e[0].r == 1.0);
    CHECK(e[0].v == 0.7);
    CHECK(e[1].r == 3.0);
  }

  TEST_CASE("csv round trip and json mirror") {
    Table t = covariance_table();
    t.add({std::int64_t{0}, std::int64_t{1}, std::int64_t{1}, 0.123456789012345, 1e-20, std::string("exact")});
    t.add({std::int64_t{3}, std::int64_t{3}, std::int64_t{0}, -2.5, 0.0, std::string("a,b \"q\"")});
    const std::string csv = to_csv(t);
    const Table back = parse_csv(csv);
    CHECK(back.columns == t.columns);
    CHECK(to_csv(back) == csv);
    CHECK(std::get<double>(back.rows[0][3]) == 0.123456789012);
    CHECK(std::get<std::string>(back.rows[1][5]) == "a,b \"q\"");

    const std::string json = to_json(t);
    CHECK(json.find("\"value\": 0.123456789012") != std::string::npos);
    CHECK(json.find("\"method\": \"exact\"") != std::string::npos);
    CHECK(json.find("\"i\": 3") != std::string::npos);

    Table bad = key_value_table();
    CHECK_THROWS_AS(bad.add({std::string("only one")}), Error);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorKind::ConfigParse) == 2);
    CHECK(exit_code(ErrorKind::NonDominant) == 3);
    CHECK(exit_code(ErrorKind::AsymmetricInteraction) == 3);
    CHECK(exit_code(ErrorKind::DimensionMismatch) == 3);
    CHECK(exit_code(ErrorKind::BudgetExceeded) == 4);
    CHECK(exit_code(ErrorKind::SolverDiverged) == 4);
    CHECK(exit_code(ErrorKind::TooFewPoints) == 4);
    CHECK(exit_code(ErrorKind::Io) == 5);
  }

  TEST_CASE("runner") {
    const fs::path dir = scratch("runner");
    const fs::path good = dir / "good.toml";
    std::ofstream(good) << kTwoSite;
    const fs::path bad = dir / "bad.toml";
    std::ofstream(bad) << "[lattice]\nextent = 2\nextent = 3\n";
    const fs::path nondom = dir / "nondom.toml";
    std::ofstream(nondom) << "[lattice]\nextent = [2]\n[interaction]\nkind = \"explicit\"\n"
                             "matrix = [[1.0, -1.5], [-1.5, 1.0]]\n";

    auto run = [&](const std::string& cmd, const fs::path& cfg, const fs::path& out) {
      RunOptions o;
      o.subcommand = cmd;
      o.config_path = cfg.string();
      o.out = out.string();
      return run_experiment(o);
    };

    CHECK(run("exact", bad, dir / "bad") == 2);
    CHECK(run("exact", nondom, dir / "nondom") == 3);
    CHECK(run("exact", dir / "missing.toml", dir / "missing") == 5);

    for (const std::string cmd : {"exact", "sample", "bootstrap"}) {
      CAPTURE(cmd);
      REQUIRE(run(cmd, good, dir / (cmd + "1")) == 0);
      REQUIRE(run(cmd, good, dir / (cmd + "2")) == 0);
      for (const auto& entry : fs::directory_iterator(dir / (cmd + "1"))) {
        const auto name = entry.path().filename();
        if (name == "manifest.csv") continue;
        CAPTURE(name.string());
        CHECK(slurp(entry.path()) == slurp(dir / (cmd + "2") / name));
      }
      CHECK(fs::exists(dir / (cmd + "1") / "manifest.csv"));
    }

    const std::string manifest = slurp(dir / "sample1" / "manifest.csv");
    CHECK(manifest.find("seed,7\n") != std::string::npos);
    CHECK(manifest.find("version,0.1.0\n") != std::string::npos);

    RunOptions o;
    o.subcommand = "sample";
    o.config_path = good.string();
    o.out = (dir / "reseeded").string();
    o.seed = 8;
    REQUIRE(run_experiment(o) == 0);
    CHECK(slurp(dir / "reseeded" / "covariance.csv") != slurp(dir / "sample1" / "covariance.csv"));

    o.subcommand = "exact";
    o.out = (dir / "json").string();
    o.format = "json";
    REQUIRE(run_experiment(o) == 0);
    CHECK(fs::exists(dir / "json" / "covariance.json"));

    fs::remove_all(dir);
  }

  TEST_CASE("fit subcommand") {
    const fs::path dir = scratch("fit");
    {
      std::ofstream in(dir / "points.csv");
      in.precision(17);
      in << "r,v\n";
      for (int r = 0; r <= 40; ++r) in << r << "," << 3.0 * std::pow(1.0 + r, -2.5) << "\n";
    }
    RunOptions o;
    o.subcommand = "fit";
    o.fit_input = (dir / "points.csv").string();
    o.out = (dir / "out").string();
    REQUIRE(run_experiment(o) == 0);
    const Table t = parse_csv(slurp(dir / "out" / "fit.csv"));
    bool saw_alpha = false;
    for (const auto& row : t.rows)
      for (std::size_t k = 0; k < row.size(); ++k)
        if (const auto* s = std::get_if<std::string>(&row[k]); s && *s == "alpha_hat") {
          saw_alpha = true;
          CHECK(std::get<double>(row[k + 1]) == doctest::Approx(2.5).epsilon(1e-6));
        }
    CHECK(saw_alpha);
    fs::remove_all(dir);
  }
}
