#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "gibbslab/bootstrap.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/gaussian.hpp"
#include "gibbslab/numerics.hpp"

using namespace gibbslab;

namespace {

Eigen::MatrixXd chain(int n, double off) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off;
  return m;
}

ModelSpec nn_chain(std::int64_t n, double coupling) {
  ModelInput in;
  in.lattice = Lattice({n});
  in.potentials = {Potential::gaussian()};
  in.kernel = InteractionKernel::nearest_neighbor(coupling, 1.0);
  return build_model(in);
}

ModelSpec power_chain(std::int64_t n, double amp, double expo) {
  ModelInput in;
  in.lattice = Lattice({n});
  in.potentials = {Potential::gaussian()};
  in.kernel = InteractionKernel::power_law(amp, expo, 1.0, true);
  return build_model(in);
}

BoundField geometric(std::size_t n, double c, double ratio) {
  BoundField B;
  B.bounds.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < B.bounds.rows(); ++i)
    for (Eigen::Index j = 0; j < B.bounds.cols(); ++j) B.bounds(i, j) = c * std::pow(ratio, static_cast<double>(std::abs(i - j)));
  return B;
}

BoundField exact_field(const ModelSpec& m) {
  BoundField B;
  const Eigen::MatrixXd c = gaussian_oracle(m).covariance;
  B.bounds = 0.5 * (c + c.transpose());
  B.provenance = "exact-oracle";
  return B;
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

}  // namespace

TEST_SUITE("bootstrap") {
  TEST_CASE("J examples") {
    const ModelSpec m = nn_chain(21, -0.1);
    const BoundField B = geometric(21, 0.6, 0.5);
    const Eigen::MatrixXd J = compute_J(m, B, 1.5);
    CHECK(J(10, 10) == doctest::Approx(0.0));
    CHECK(J(10, 9) == doctest::Approx(0.03));
    CHECK(J(10, 11) == doctest::Approx(0.03));
    CHECK(J(10, 9) + J(10, 10) + J(10, 11) == doctest::Approx(0.06));
    CHECK(is_admissible_L(m, B, 1.5));
    CHECK(find_L(m, B) <= 1.5);

    const ModelSpec free = model_from_matrix(Eigen::MatrixXd::Identity(6, 6));
    CHECK(compute_J(free, geometric(6, 1.0, 0.5), 1.5).cwiseAbs().maxCoeff() == 0.0);
    CHECK(compute_J(m, geometric(21, 0.0, 0.5), 2.5).cwiseAbs().maxCoeff() == 0.0);
    CHECK(find_L(free, geometric(6, 1.0, 0.5)) == 0.5);
  }

  TEST_CASE("J matches its definition") {
    const ModelSpec m = power_chain(12, 0.2, 3.0);
    const BoundField B = geometric(12, 0.4, 0.7);
    const double L = 1.5, c = 2.0;
    const Eigen::MatrixXd J = compute_J(m, B, L, c);
    for (int i = 0; i < 12; ++i) {
      for (int k = 0; k < 12; ++k) {
        double s = 0.0;
        const bool k_in = std::abs(i - k) <= 1;
        for (int n = 0; n < 12; ++n) {
          if (n == k) continue;
          const bool n_in = std::abs(i - n) <= 1;
          if (n_in != k_in) s += c * std::abs(m.interaction(k, n)) * B.bounds(i, n);
        }
        CHECK(J(i, k) == doctest::Approx(s).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("no admissible L on a strongly coupled short chain") {
    const ModelSpec m = nn_chain(6, -0.45);
    CHECK(kind_of([&] { find_L(m, geometric(6, 10.0, 1.0)); }) == ErrorKind::NoAdmissibleL);
  }

  TEST_CASE("conditions are enforced") {
    Eigen::MatrixXd anti = chain(3, 0.2);
    CHECK(kind_of([&] { compute_J(model_from_matrix(anti), geometric(3, 1, .5), 0.5); }) == ErrorKind::ConditionViolated);
    CHECK_NOTHROW(compute_J(model_from_matrix(anti), geometric(3, 1, .5), 0.5, 2.0, false));
    Eigen::VectorXd s = Eigen::VectorXd::Ones(3);
    CHECK(kind_of([&] { verify_lebowitz_exact(model_from_matrix(chain(3, -0.2), Potential::gaussian(), s)); }) ==
          ErrorKind::ConditionViolated);
    CHECK_THROWS_AS(verify_lebowitz_exact(model_from_matrix(chain(5, -0.2))), Error);
  }

  TEST_CASE("lebowitz right-hand side") {
    const ModelSpec m = model_from_matrix(chain(3, -0.2));
    const BoundField B = exact_field(m);
    CHECK(lebowitz_rhs(B, m, 0, 2, {0}, 2.0) == doctest::Approx(0.02363).epsilon(1e-3));
    CHECK(lebowitz_rhs(B, m, 0, 2, {0}, 2.0) ==
          doctest::Approx(2 * 0.2 * (0.521739 * 0.108696 + 0.108696 * 0.021739)).epsilon(1e-5));
    CHECK(lebowitz_rhs(B, m, 0, 2, {0}, 1.0) == doctest::Approx(0.01181).epsilon(1e-3));
    CHECK(lebowitz_rhs(B, m, 0, 2, {0}, 1.0) < B.bounds(0, 2));
    CHECK(lebowitz_rhs(geometric(3, 0.0, 0.5), m, 0, 2, {0, 1}, 2.0) == 0.0);
    CHECK(kind_of([&] { lebowitz_rhs(B, m, 0, 2, {1}, 2.0); }) == ErrorKind::BadSplit);
    CHECK(kind_of([&] { lebowitz_rhs(B, m, 0, 2, {0, 2}, 2.0); }) == ErrorKind::BadSplit);
  }

  TEST_CASE("propagate examples") {
    const ModelSpec m = model_from_matrix(chain(3, -0.2));
    const BoundField B = exact_field(m);
    const BoundField P = propagate(B, m, 0.5);
    CHECK(P.bounds(0, 2) == doctest::Approx(0.021739).epsilon(1e-4));
    CHECK(P.bounds == B.bounds);
    BoundField diag = geometric(3, 0.5, 0.0);
    CHECK(propagate(diag, m, 0.5).bounds == diag.bounds);
  }

  TEST_CASE("propagate is monotone, never increases and keeps exact fields") {
    const ModelSpec m = power_chain(24, 0.1, 3.0);
    const BoundField truth = exact_field(m);
    const double L = find_L(m, truth);
    CHECK(propagate(truth, m, L).bounds == truth.bounds);

    const CounterRng rng{51};
    for (std::uint64_t t = 0; t < 10; ++t) {
      BoundField lo = truth, hi = truth;
      for (Eigen::Index i = 0; i < 24; ++i) {
        for (Eigen::Index j = i + 1; j < 24; ++j) {
          const double a = 1.0 + rng.uniform(t, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
          const double b = a + rng.uniform(t, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
          lo.bounds(i, j) = lo.bounds(j, i) = a * truth.bounds(i, j);
          hi.bounds(i, j) = hi.bounds(j, i) = b * truth.bounds(i, j);
        }
      }
      const BoundField plo = propagate(lo, m, L), phi = propagate(hi, m, L);
      CHECK((phi.bounds - plo.bounds).minCoeff() >= 0.0);
      CHECK((lo.bounds - plo.bounds).minCoeff() >= 0.0);
      CHECK((plo.bounds - truth.bounds).minCoeff() >= -1e-15);
      CHECK((plo.bounds - plo.bounds.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("propagate does not depend on the thread count") {
    const ModelSpec m = power_chain(40, 0.1, 3.0);
    const BoundField B = geometric(40, 0.6, 0.8);
    setenv("GIBBSLAB_THREADS", "1", 1);
    const BoundField one = propagate(B, m, 0.5);
    setenv("GIBBSLAB_THREADS", "4", 1);
    const BoundField four = propagate(B, m, 0.5);
    unsetenv("GIBBSLAB_THREADS");
    CHECK(one.bounds == four.bounds);
  }

  TEST_CASE("run_bootstrap") {
    const ModelSpec free = model_from_matrix(Eigen::MatrixXd::Identity(16, 16));
    const auto r0 = run_bootstrap(free, 0.3, 0.5, {});
    CHECK(r0.L == 0.5);
    for (Eigen::Index i = 0; i < 16; ++i)
      for (Eigen::Index j = 0; j < 16; ++j)
        if (static_cast<double>(std::abs(i - j)) > 3 * r0.L) CHECK(r0.field.bounds(i, j) == 0.0);

    const ModelSpec m = power_chain(64, 0.05, 2.0);
    const auto truth = gaussian_oracle(m).covariance;
    double C0 = 0.0;
    for (Eigen::Index i = 0; i < 64; ++i)
      for (Eigen::Index j = 0; j < 64; ++j)
        if (i != j) C0 = std::max(C0, truth(i, j) * std::pow(1.0 + static_cast<double>(std::abs(i - j)), 1.4));
    const auto res = run_bootstrap(m, C0, 0.4, {}, truth.diagonal());
    CHECK((res.field.bounds - truth).minCoeff() >= -1e-12);
    CHECK(res.fit.alpha_hat > 0.4);
    for (std::size_t k = 1; k < res.alpha_history.size(); ++k)
      CHECK(res.alpha_history[k] >= res.alpha_history[k - 1] - 1e-12);
    CHECK(res.iterations <= static_cast<std::size_t>(std::ceil(2.0 * std::log2(64.0))));
    CHECK(res.field.provenance.rfind("propagated", 0) == 0);
  }

  TEST_CASE("exact lebowitz verification") {
    const auto g = verify_lebowitz_exact(model_from_matrix(chain(3, -0.2)), 2.0);
    CHECK(g.holds);
    CHECK(g.nonnegative);
    CHECK(g.min_coupling > 1.0);
    CHECK(g.min_coupling <= 2.0);
    CHECK(g.splits.size() == 12);
    const auto q = verify_lebowitz_exact(model_from_matrix(chain(3, -0.15), Potential::quartic()), 2.0);
    CHECK(q.holds);
    CHECK(q.covariance.minCoeff() >= -1e-10);
    const auto ind = verify_lebowitz_exact(model_from_matrix(Eigen::MatrixXd::Identity(3, 3)), 2.0);
    CHECK(ind.holds);
    for (const auto& s : ind.splits) {
      CHECK(std::abs(s.lhs) <= 1e-12);
      CHECK(s.rhs == 0.0);
    }
  }
}
