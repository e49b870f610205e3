#include <doctest.h>

#include <cmath>

#include "gibbslab/errors.hpp"
#include "gibbslab/model.hpp"
#include "gibbslab/numerics.hpp"

using namespace gibbslab;

namespace {

Eigen::MatrixXd two_site(double off) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, off, off, 1.0;
  return m;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

ModelSpec power_chain(std::int64_t n, double amp, double expo, bool ferro) {
  ModelInput in;
  in.lattice = Lattice({n});
  in.potentials = {Potential::gaussian()};
  in.kernel = InteractionKernel::power_law(amp, expo, 1.0, ferro);
  return build_model(in);
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("gaussian chain margin") {
    const ModelSpec m = model_from_matrix(two_site(-0.2));
    CHECK(m.delta == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(m.ferromagnetic());
    CHECK(m.has_zero_boundary());
  }

  TEST_CASE("build_model rejections") {
    CHECK(kind_of([] { model_from_matrix(two_site(-1.2)); }) == ErrorKind::NonDominant);
    Eigen::MatrixXd a = two_site(-0.2);
    a(0, 1) = -0.3;
    CHECK(kind_of([&] { model_from_matrix(a); }) == ErrorKind::AsymmetricInteraction);
    CHECK(kind_of([] { model_from_matrix(two_site(-0.2), Potential::gaussian(), Eigen::VectorXd::Ones(3)); }) ==
          ErrorKind::DimensionMismatch);

    ModelInput in;
    in.lattice = Lattice({2});
    in.potentials = {Potential::gaussian()};
    CHECK(kind_of([&] { build_model(in); }) == ErrorKind::InvalidArgument);

    in.interaction = two_site(-0.2);
    in.decay = DecayClaim{0.1, 3.0};
    CHECK(kind_of([&] { build_model(in); }) == ErrorKind::DecayViolated);
    in.decay = DecayClaim{0.2 * 8.0, 3.0};
    CHECK_NOTHROW(build_model(in));

    Potential bad = Potential::bumped_quartic(0.5);
    bad.bound = 0.5;
    in.decay.reset();
    in.potentials = {bad};
    CHECK(kind_of([&] { build_model(in); }) == ErrorKind::InvalidPotential);
  }

  TEST_CASE("boundary spins must be exterior and coupled through a kernel") {
    ModelInput in;
    in.lattice = Lattice({4});
    in.potentials = {Potential::gaussian()};
    in.kernel = InteractionKernel::power_law(0.1, 3.0, 1.0, true);
    in.boundary = {{Site{1}, 1.0}};
    CHECK(kind_of([&] { build_model(in); }) == ErrorKind::InvalidArgument);
    in.boundary = {{Site{-1}, std::nan("")}};
    CHECK(kind_of([&] { build_model(in); }) == ErrorKind::IllTemperedBoundary);
    in.boundary = {{Site{-1}, 2.0}};
    const ModelSpec m = build_model(in);
    // b_i = M_{i,-1} w_{-1}
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(m.boundary_field[static_cast<Eigen::Index>(i)] ==
            doctest::Approx(-0.1 * std::pow(2.0 + static_cast<double>(i), -3.0) * 2.0));
    CHECK_FALSE(m.has_zero_boundary());
  }

  TEST_CASE("power-law margin matches row-sum enumeration") {
    const ModelSpec m = power_chain(64, 0.05, 3.0, true);
    const std::int64_t shell = 3 * 64;
    double delta = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < 64; ++i) {
      double row = 0.0;
      for (std::int64_t j = -shell; j < 64 + shell; ++j)
        if (j != i) row += 0.05 * std::pow(1.0 + static_cast<double>(std::abs(i - j)), -3.0);
      delta = std::min(delta, 1.0 - row);
    }
    CHECK(m.delta == doctest::Approx(delta).epsilon(1e-12));
    CHECK(m.shell_width == shell);
    CHECK(m.interaction(3, 7) == doctest::Approx(-0.05 * std::pow(5.0, -3.0)));
  }

  TEST_CASE("two-dimensional power-law margin matches enumeration") {
    ModelInput in;
    in.lattice = Lattice({3, 3});
    in.potentials = {Potential::gaussian()};
    in.kernel = InteractionKernel::power_law(0.02, 5.0, 1.0, false);
    in.shell_width = 4;
    const ModelSpec m = build_model(in);
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < 9; ++u) {
      const Site s = in.lattice.site(u);
      double row = 0.0;
      for (std::int64_t x = -4; x < 7; ++x)
        for (std::int64_t y = -4; y < 7; ++y) {
          const Site t{x, y};
          if (t != s) row += 0.02 * std::pow(1.0 + static_cast<double>(dist(s, t)), -5.0);
        }
      delta = std::min(delta, 1.0 - row);
    }
    CHECK(m.delta == doctest::Approx(delta).epsilon(1e-12));
  }

  TEST_CASE("grad_energy examples") {
    Eigen::MatrixXd ou(1, 1);
    ou << 0.5;
    CHECK(grad_energy(model_from_matrix(ou), Eigen::VectorXd::Constant(1, 2.0))[0] == doctest::Approx(2.0));
    const Eigen::VectorXd g = grad_energy(model_from_matrix(two_site(-0.2)), Eigen::VectorXd::Ones(2));
    CHECK(g[0] == doctest::Approx(1.6));
    CHECK(g[1] == doctest::Approx(1.6));
    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    CHECK(grad_energy(model_from_matrix(one, Potential::quartic()), Eigen::VectorXd::Ones(1))[0] == doctest::Approx(3.0));
  }

  TEST_CASE("grad_energy matches finite differences of energy") {
    ModelInput in;
    in.lattice = Lattice({5});
    in.potentials = {Potential::bumped_quartic(0.3)};
    in.kernel = InteractionKernel::power_law(0.1, 3.0, 1.0, false);
    in.field = Eigen::VectorXd::LinSpaced(5, -0.5, 0.5);
    in.boundary = {{Site{-2}, 1.5}, {Site{6}, -0.7}};
    const ModelSpec m = build_model(in);
    const CounterRng rng{3};
    for (std::uint64_t t = 0; t < 10; ++t) {
      Eigen::VectorXd x(5);
      for (Eigen::Index i = 0; i < 5; ++i) x[i] = rng.normal(t, static_cast<std::uint64_t>(i), 0);
      const Eigen::VectorXd g = grad_energy(m, x);
      for (Eigen::Index i = 0; i < 5; ++i) {
        const double h = 1e-5;
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        CHECK(g[i] == doctest::Approx((energy(m, xp) - energy(m, xm)) / (2 * h)).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("ferromagnetize") {
    const ModelSpec m = ferromagnetize(model_from_matrix(two_site(0.2)));
    CHECK(m.interaction(0, 1) == doctest::Approx(-0.2));
    CHECK(m.interaction(1, 0) == doctest::Approx(-0.2));
    CHECK(m.interaction(0, 0) == doctest::Approx(1.0));

    const ModelSpec fer = model_from_matrix(two_site(-0.2));
    CHECK(fingerprint(ferromagnetize(fer)) == fingerprint(fer));

    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(8, 8);
    const CounterRng rng{8};
    for (int i = 0; i + 1 < 8; ++i) {
      const double v = (rng.uniform(static_cast<std::uint64_t>(i), 0, 0) < 0.5 ? -1 : 1) * 0.3;
      r(i, i + 1) = r(i + 1, i) = v;
    }
    const ModelSpec rs = model_from_matrix(r);
    const ModelSpec rf = ferromagnetize(rs);
    double delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) delta = std::min(delta, 1.0 - (r.row(i).cwiseAbs().sum() - 1.0));
    CHECK(rf.delta == doctest::Approx(delta));
    CHECK(rs.delta == doctest::Approx(rf.delta));
    CHECK(fingerprint(ferromagnetize(rf)) == fingerprint(rf));
    CHECK(rf.ferromagnetic());
  }

  TEST_CASE("ferromagnetize on kernels") {
    const ModelSpec m = power_chain(16, 0.2, 3.0, false);
    const ModelSpec f = ferromagnetize(m);
    CHECK(f.ferromagnetic());
    CHECK(f.delta == doctest::Approx(m.delta));
    CHECK(f.exterior_coupling(0, Site{-3}) == doctest::Approx(-std::abs(m.exterior_coupling(0, Site{-3}))));
    CHECK(fingerprint(ferromagnetize(f)) == fingerprint(f));
  }

  TEST_CASE("coupled shell and exterior columns") {
    ModelInput in;
    in.lattice = Lattice({2});
    in.potentials = {Potential::quartic()};
    in.kernel = InteractionKernel::nearest_neighbor(-0.2, 1.0);
    const ModelSpec m = build_model(in);
    CHECK(coupled_shell(m) == std::vector<Site>{Site{-1}, Site{2}});
    const Eigen::VectorXd col = m.exterior_column(Site{-1});
    CHECK(col[0] == doctest::Approx(-0.2));
    CHECK(col[1] == 0.0);
    CHECK(m.delta == doctest::Approx(0.6));
  }

  TEST_CASE("potentials") {
    CHECK(is_symmetric(Potential::gaussian()));
    CHECK(is_symmetric(Potential::quartic()));
    CHECK(is_symmetric(Potential::bumped_quartic(0.4)));
    Potential odd = Potential::quartic();
    odd.convex = [](double r) { return 0.25 * r * r * r * r + r; };
    CHECK_FALSE(is_symmetric(odd));
  }
}
