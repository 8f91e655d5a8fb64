#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "demix/errors.hpp"
#include "demix/operators.hpp"
#include "demix/rng.hpp"

using namespace demix;

namespace {

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  rng::Engine eng = rng::make_engine(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng::normal(eng);
  return v;
}

// Independent power method for the test's spectral checks.
double spectral_norm(const Eigen::MatrixXd& x, std::uint64_t seed) {
  Eigen::VectorXd v = random_vector(static_cast<int>(x.cols()), seed);
  v.normalize();
  double lambda = 0.0;
  for (int i = 0; i < 300; ++i) {
    Eigen::VectorXd w = x.transpose() * (x * v);
    const double next = v.dot(w);
    v = w.normalized();
    if (std::fabs(next - lambda) <= 1e-10 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(0.0, lambda));
}

}  // namespace

TEST_CASE("dct basis at n = 2 is the expected cosine pair") {
  const Orthobasis dct = Orthobasis::dct(2);
  const Eigen::MatrixXd q = dct.materialize();
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(q(0, 0) == doctest::Approx(r).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(r).epsilon(1e-14));
  CHECK(q(1, 0) == doctest::Approx(r).epsilon(1e-14));
  CHECK(q(1, 1) == doctest::Approx(-r).epsilon(1e-14));
}

TEST_CASE("every basis kind is orthonormal") {
  for (int n : {5, 16}) {
    for (BasisKind kind :
         {BasisKind::identity, BasisKind::dct, BasisKind::random_orthonormal}) {
      const Orthobasis basis = gen_orthobasis(n, kind, 77);
      const Eigen::MatrixXd q = basis.materialize();
      const Eigen::MatrixXd gram = q.transpose() * q;
      INFO("kind = ", to_string(kind), ", n = ", n);
      CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("implicit dct applies agree with the materialized matrix") {
  for (int n : {3, 13, 64}) {
    const Orthobasis dct = Orthobasis::dct(n);
    const Eigen::MatrixXd q = dct.materialize();
    const Eigen::VectorXd x = random_vector(n, 11 + n);
    CHECK((dct.apply(x) - q * x).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((dct.apply_adjoint(x) - q.transpose() * x).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((dct.column(n / 2) - q.col(n / 2)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("rademacher designs take only the two scaled values") {
  const DesignOperator d =
      gen_subgaussian(20, 30, SubgaussianFamily::rademacher, 0.25, 5);
  const Eigen::MatrixXd x = d.materialize();
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      CHECK((x(i, j) == 0.25 || x(i, j) == -0.25));
    }
  }
}

TEST_CASE("identical seeds give identical designs") {
  const DesignOperator a = gen_subgaussian(17, 23, SubgaussianFamily::gaussian, 1.0, 99);
  const DesignOperator b = gen_subgaussian(17, 23, SubgaussianFamily::gaussian, 1.0, 99);
  CHECK((a.materialize() - b.materialize()).cwiseAbs().maxCoeff() == 0.0);
  const DesignOperator fa = gen_factored(3, 5, 11, 2.0, SubgaussianFamily::gaussian, 4);
  const DesignOperator fb = gen_factored(3, 5, 11, 2.0, SubgaussianFamily::gaussian, 4);
  CHECK((fa.materialize() - fb.materialize()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense gaussian spectrum sits near the Marchenko-Pastur edge") {
  const int m = 1000, n = 1000;
  const DesignOperator d =
      gen_subgaussian(m, n, SubgaussianFamily::gaussian, 1.0 / std::sqrt(m), 2024);
  const double top = spectral_norm(d.materialize(), 7);
  const double edge = 1.0 + std::sqrt(static_cast<double>(n) / m);
  CHECK(top == doctest::Approx(edge).epsilon(0.10));
}

TEST_CASE("factored designs: structure, bounds, and adjoint") {
  const int k = 4, q = 6, n = 9;
  const double T = 1.5;
  const DesignOperator d = gen_factored(k, q, n, T, SubgaussianFamily::gaussian, 31);
  CHECK(d.rows() == k * q);
  CHECK(d.cols() == n);
  CHECK(d.diagonals().rows() == k);
  CHECK(d.diagonals().cols() == q);
  CHECK(d.diagonals().cwiseAbs().maxCoeff() <= T);

  // Applying to e_j equals D * (column j of B).
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
    ej[j] = 1.0;
    const Eigen::VectorXd bj = d.b_matrix().col(j);
    Eigen::VectorXd expected(k * q);
    for (int r = 0; r < k; ++r) {
      expected.segment(r * q, q) = d.diagonals().row(r).transpose().cwiseProduct(bj);
    }
    CHECK((d.apply(ej) - expected).cwiseAbs().maxCoeff() == 0.0);
  }

  // Flattened dense form reproduces the factored matvec.
  const Eigen::MatrixXd flat = d.materialize();
  const Eigen::VectorXd v = random_vector(n, 8);
  const Eigen::VectorXd r = random_vector(k * q, 9);
  CHECK((d.apply(v) - flat * v).norm() <= 1e-12 * std::max(1.0, (flat * v).norm()));
  CHECK((d.apply_adjoint(r) - flat.transpose() * r).norm() <=
        1e-12 * std::max(1.0, (flat.transpose() * r).norm()));
}

TEST_CASE("adjoint identity <Xu, v> = <u, X^T v>") {
  const DesignOperator dense =
      gen_subgaussian(14, 22, SubgaussianFamily::gaussian, 0.3, 71);
  const DesignOperator fact =
      gen_factored(3, 7, 10, 2.0, SubgaussianFamily::rademacher, 72);
  for (const DesignOperator* d : {&dense, &fact}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd u = random_vector(d->cols(), 100 + trial);
      const Eigen::VectorXd v = random_vector(d->rows(), 200 + trial);
      const double a = d->apply(u).dot(v);
      const double b = u.dot(d->apply_adjoint(v));
      CHECK(std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(a)));
    }
  }
}

TEST_CASE("incoherence upper bound") {
  const int n = 4;
  BasisPair same{Orthobasis::identity(n), Orthobasis::identity(n)};
  CHECK(incoherence_upper_bound(same, 1) == 1.0);
  CHECK(incoherence_upper_bound(same, 4) == 1.0);

  BasisPair with_dct{Orthobasis::identity(n), Orthobasis::dct(n)};
  // mu for identity vs the orthonormal cosine basis at n = 4 is the largest
  // matrix entry, cos(pi/8)/sqrt(2); frozen from direct enumeration.
  const double mu = 0.6532814824381882;
  CHECK(incoherence_upper_bound(with_dct, 1) == doctest::Approx(mu).epsilon(1e-12));

  BasisPair random_pair{Orthobasis::identity(64),
                        Orthobasis::random_orthonormal(64, 5)};
  for (int s : {1, 4, 16, 64}) {
    CHECK(incoherence_upper_bound(random_pair, s) <= 1.0);
  }
}

TEST_CASE("incoherence estimate") {
  const int n = 16;
  BasisPair same{Orthobasis::random_orthonormal(n, 3),
                 Orthobasis::random_orthonormal(n, 3)};
  // Identical bases: the shared-support trial sees an identity submatrix.
  CHECK(incoherence_estimate(same, 4, 10, 1) == doctest::Approx(1.0).epsilon(1e-7));

  BasisPair pair{Orthobasis::identity(64), Orthobasis::random_orthonormal(64, 5)};
  const double est = incoherence_estimate(pair, 4, 200, 42);
  CHECK(est > 0.0);
  CHECK(est < 1.0);
  CHECK(est == incoherence_estimate(pair, 4, 200, 42));  // reproducible
  CHECK(est <= incoherence_upper_bound(pair, 4) + 1e-8);

  // Symmetric under swapped roles with a matched seed.
  BasisPair swapped{pair.psi, pair.phi};
  CHECK(incoherence_estimate(swapped, 4, 50, 7) ==
        doctest::Approx(incoherence_estimate(pair, 4, 50, 7)).epsilon(1e-6));
}

TEST_CASE("basis pair gamma operations") {
  const int n = 12;
  BasisPair bases{Orthobasis::dct(n), Orthobasis::random_orthonormal(n, 17)};
  const Eigen::VectorXd t = random_vector(2 * n, 3);
  const Eigen::VectorXd expected =
      bases.phi.materialize() * t.head(n) + bases.psi.materialize() * t.tail(n);
  CHECK((bases.gamma_apply(t) - expected).cwiseAbs().maxCoeff() <= 1e-12);

  const Eigen::VectorXd a = random_vector(n, 4);
  const Eigen::VectorXd adj = bases.gamma_adjoint(a);
  CHECK((adj.head(n) - bases.phi.materialize().transpose() * a).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK((adj.tail(n) - bases.psi.materialize().transpose() * a).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK((bases.gamma_column(n + 2) - bases.psi.column(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension and argument validation") {
  CHECK_THROWS_AS(Orthobasis::identity(0), ConfigError);
  CHECK_THROWS_AS(gen_subgaussian(0, 3, SubgaussianFamily::gaussian, 1.0, 1),
                  ConfigError);
  CHECK_THROWS_AS(gen_factored(2, 3, 4, -1.0, SubgaussianFamily::gaussian, 1),
                  ConfigError);
  const DesignOperator dense = gen_subgaussian(4, 5, SubgaussianFamily::gaussian, 1.0, 1);
  CHECK_THROWS_AS(dense.b_matrix(), ConfigError);
  CHECK_THROWS_AS(dense.apply(Eigen::VectorXd::Zero(6)), ConfigError);
  CHECK_THROWS_AS(basis_kind_from_string("fourier"), ConfigError);
}
