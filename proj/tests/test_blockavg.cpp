#include <doctest.h>

#include <cmath>

#include "gibbslab/blockavg.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/gaussian.hpp"
#include "gibbslab/numerics.hpp"

using namespace gibbslab;

namespace {

ModelSpec power_model(Lattice lat, double amp, double expo, bool ferro) {
  ModelInput in;
  in.lattice = std::move(lat);
  in.potentials = {Potential::gaussian()};
  in.kernel = InteractionKernel::power_law(amp, expo, 1.0, ferro);
  return build_model(in);
}

// Direct enumeration of the coefficient definitions over the lattice.
struct Enumerated {
  int p;
  double q;
  double kappa;
};

Enumerated enumerate(const ModelSpec& m, const Site& k, const Site& i, double R) {
  const Lattice& lat = m.lattice;
  const auto absM = [&](std::size_t a, std::size_t b) { return a == b ? 0.0 : std::abs(m.interaction(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))); };
  const std::size_t ii = lat.index(i);
  Enumerated e{0, 0.0, 0.0};
  for (std::size_t l = 0; l < lat.size(); ++l) {
    const Site sl = lat.site(l);
    if (static_cast<double>(dist(sl, k)) > R) continue;
    const bool near_i = static_cast<double>(dist(sl, i)) <= R;
    if (near_i) ++e.p;
    for (std::size_t j = 0; j < lat.size(); ++j) {
      const bool j_in = static_cast<double>(dist(lat.site(j), sl)) <= R;
      if (near_i && !j_in) e.q += 0.5 * absM(ii, j);
      if (!near_i && j_in) e.kappa += 0.5 * absM(j, ii);
    }
  }
  return e;
}

}  // namespace

TEST_SUITE("blockavg") {
  TEST_CASE("p examples") {
    const ModelSpec m = power_model(Lattice({-10}, {21}), 1.0, 3.0, false);
    const auto bc = coefficients(m, Site{0}, 1.5);
    const auto p = [&](std::int64_t s) { return bc.p[static_cast<Eigen::Index>(m.lattice.index(Site{s}))]; };
    CHECK(p(0) == 3);
    CHECK(p(1) == 2);
    CHECK(p(-1) == 2);
    CHECK(p(2) == 1);
    CHECK(p(3) == 0);
  }

  TEST_CASE("q and kappa on the long chain") {
    const ModelSpec m = power_model(Lattice({-50}, {101}), 1.0, 3.0, false);
    const auto bc = coefficients(m, Site{0}, 1.5);
    const auto at = [&](std::int64_t s) { return static_cast<Eigen::Index>(m.lattice.index(Site{s})); };
    CHECK(std::abs(bc.q[at(0)] - 0.319) <= 1e-3);
    CHECK(std::abs(bc.kappa[at(5)] - 0.0266) <= 1e-4);
    const auto e0 = enumerate(m, Site{0}, Site{0}, 1.5);
    const auto e5 = enumerate(m, Site{0}, Site{5}, 1.5);
    CHECK(bc.q[at(0)] == doctest::Approx(e0.q).epsilon(1e-12));
    CHECK(bc.kappa[at(5)] == doctest::Approx(e5.kappa).epsilon(1e-12));
  }

  TEST_CASE("coefficients match enumeration in two dimensions") {
    ModelInput in;
    in.lattice = Lattice({-4, -4}, {9, 9});
    in.potentials = {Potential::gaussian()};
    in.kernel = InteractionKernel::power_law(0.5, 5.0, 1.0, false);
    const ModelSpec m = build_model(in);
    for (double R : {1.5, 2.5}) {
      const Site k{0, 1};
      const auto bc = coefficients(m, k, R);
      for (std::size_t u = 0; u < m.size(); ++u) {
        const auto e = enumerate(m, k, m.lattice.site(u), R);
        const auto iu = static_cast<Eigen::Index>(u);
        CHECK(bc.p[iu] == e.p);
        CHECK(bc.q[iu] == doctest::Approx(e.q).epsilon(1e-12));
        CHECK(bc.kappa[iu] == doctest::Approx(e.kappa).epsilon(1e-12));
        CHECK(bc.p[iu] >= 0);
        CHECK(bc.p[iu] <= static_cast<int>(std::pow(2 * std::floor(R) + 1, 2)));
        CHECK(bc.q[iu] >= 0);
        CHECK(bc.kappa[iu] >= 0);
      }
    }
  }

  TEST_CASE("p is symmetric and translation invariant in the interior") {
    const ModelSpec m = power_model(Lattice({-20}, {41}), 0.3, 3.0, true);
    for (double R : {1.5, 2.5}) {
      const auto a = coefficients(m, Site{0}, R);
      const auto b = coefficients(m, Site{3}, R);
      for (std::int64_t off = -6; off <= 6; ++off) {
        const auto pa = a.p[static_cast<Eigen::Index>(m.lattice.index(Site{off}))];
        CHECK(pa == a.p[static_cast<Eigen::Index>(m.lattice.index(Site{-off}))]);
        CHECK(pa == b.p[static_cast<Eigen::Index>(m.lattice.index(Site{3 + off}))]);
      }
    }
  }

  TEST_CASE("multiplicity identity") {
    // sum_{l in B(k)} sum_{i in B(l)} v_i == sum_i p_i v_i, with integer v so both are exact.
    const ModelSpec m = power_model(Lattice({-12}, {25}), 0.3, 3.0, true);
    const CounterRng rng{12};
    for (std::uint64_t t = 0; t < 5; ++t) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(m.size()));
      for (Eigen::Index u = 0; u < v.size(); ++u) v[u] = std::floor(100.0 * rng.uniform(t, static_cast<std::uint64_t>(u), 0));
      const Site k{static_cast<std::int64_t>(t) - 2};
      double nested = 0.0;
      for (const auto& l : ball(k, 1.5, m.lattice))
        for (auto i : ball_indices(l, 1.5, m.lattice)) nested += v[static_cast<Eigen::Index>(i)];
      const auto bc = coefficients(m, k, 1.5);
      CHECK(nested == bc.p.cast<double>().dot(v));
    }
  }

  TEST_CASE("radius and center validation") {
    const ModelSpec m = power_model(Lattice({10}), 0.3, 3.0, true);
    for (double R : {1.0, 1.25, -1.5}) {
      try {
        coefficients(m, Site{5}, R);
        FAIL("accepted R = " << R);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadRadius);
      }
    }
    CHECK_THROWS_AS(coefficients(m, Site{20}, 1.5), Error);
  }

  TEST_CASE("verify_coefficient_bounds") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(30, 30);
    const auto zero = verify_coefficient_bounds(model_from_matrix(id), {1.5, 2.5}, 0.1);
    CHECK(zero.p_bound_holds);
    for (const auto& r : zero.rows)
      if (r.quantity != "p_min" && r.quantity != "p_center") CHECK(r.value == 0.0);

    const ModelSpec m2 = power_model(Lattice({24, 24}), 0.5, 5.0, false);
    const auto rep = verify_coefficient_bounds(m2, {1.5, 2.5}, 0.1);
    CHECK(rep.p_bound_holds);
    std::vector<double> centers;
    for (const auto& r : rep.rows)
      if (r.quantity == "p_center") centers.push_back(r.value);
    CHECK(centers == std::vector<double>{9.0, 25.0});
    CHECK(rep.alpha == doctest::Approx(1.0));
    CHECK(rep.alpha_bar == doctest::Approx(1.0));
  }

  TEST_CASE("block centers tile the lattice") {
    const Lattice lat({-3, 0}, {11, 7});
    for (double R : {0.5, 1.5, 2.5}) {
      const auto centers = block_centers(lat, R);
      for (std::size_t u = 0; u < lat.size(); ++u) {
        int owners = 0;
        for (const auto& c : centers) owners += static_cast<double>(dist(c, lat.site(u))) <= R ? 1 : 0;
        CHECK(owners == 1);
      }
    }
  }

  TEST_CASE("block matrix") {
    const auto zero = assemble_block_matrix(model_from_matrix(Eigen::MatrixXd::Identity(20, 20)), 1.5, 0.7);
    CHECK((zero.A - 0.7 * 0.7 * Eigen::MatrixXd::Identity(zero.A.rows(), zero.A.cols())).cwiseAbs().maxCoeff() == 0.0);

    const ModelSpec m = power_model(Lattice({100}), 0.05, 3.0, true);
    const auto bm = assemble_block_matrix(m, 2.5, 1.0);
    CHECK(bm.centers.size() == 20);
    CHECK(bm.dominance_margin() > 0.0);
    CHECK((bm.A.diagonal().array() > 0).all());
    CHECK((bm.A - Eigen::MatrixXd(bm.A.diagonal().asDiagonal())).maxCoeff() <= 0.0);
    CHECK(bm.block_of(Site{0}) == 0);
    CHECK(bm.block_of(Site{5}) == 1);
    double prev = std::numeric_limits<double>::infinity();
    for (double C : {0.5, 1.0, 2.0, 4.0}) {
      const double margin = assemble_block_matrix(m, 2.5, 1.0, C).dominance_margin();
      CHECK(margin < prev);
      prev = margin;
    }
  }

  TEST_CASE("inverse decay") {
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(5, 5);
    diag.diagonal() << 1, 2, 3, 4, 5;
    const auto d = inverse_decay(diag);
    CHECK_FALSE(d.fit.has_value());
    CHECK(d.inverse.diagonal()[4] == doctest::Approx(0.2));

    Eigen::MatrixXd A(256, 256);
    for (int i = 0; i < 256; ++i)
      for (int j = 0; j < 256; ++j) A(i, j) = i == j ? 2.0 : -0.1 * std::pow(1.0 + std::abs(i - j), -3.0);
    const auto inv = inverse_decay(A);
    CHECK(inv.nonnegative);
    REQUIRE(inv.fit.has_value());
    CHECK(inv.slope() <= -3.0 + 0.2);
    CHECK((inv.inverse - inv.inverse.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((A * inv.inverse - Eigen::MatrixXd::Identity(256, 256)).cwiseAbs().maxCoeff() <= 1e-12);

    const CounterRng rng{31};
    for (std::uint64_t t = 0; t < 20; ++t) {
      const int n = 3 + static_cast<int>(t);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) B(i, j) = B(j, i) = -rng.uniform(t, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      for (int i = 0; i < n; ++i) B(i, i) = -B.row(i).sum() + 0.01;
      CHECK(inverse_decay(B).min_entry >= 0.0);
    }

    Eigen::MatrixXd weak = Eigen::MatrixXd::Identity(3, 3);
    weak(0, 1) = weak(1, 0) = -1.5;
    CHECK_THROWS_AS(inverse_decay(weak), Error);
  }

  TEST_CASE("directional bound") {
    const ModelSpec m = power_model(Lattice({64}), 0.2, 3.0, true);
    const auto orc = gaussian_oracle(m);
    const double rho = orc.gap;
    CHECK(directional_bound(m, 2.5, rho, {}).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd bound = directional_bound(m, 2.5, rho, {Site{0}});
    const Eigen::VectorXd exact = orc.directional_energies(0);
    double c = 0.0;
    for (Eigen::Index i = 0; i <= 4; ++i) c = std::max(c, exact[i] / bound[i]);
    for (Eigen::Index i = 0; i < exact.size(); ++i) CHECK(exact[i] <= c * bound[i] * (1 + 1e-12));

    const Eigen::VectorXd wider = directional_bound(m, 2.5, rho, {Site{0}, Site{20}});
    CHECK((wider - bound).minCoeff() >= -1e-15);
  }
}
