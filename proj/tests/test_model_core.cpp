#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "demix/errors.hpp"
#include "demix/model_core.hpp"
#include "demix/serialize.hpp"

using namespace demix;

TEST_CASE("make_block_sparse draws the requested structure") {
  SUBCASE("single active block") {
    const BlockSparseVector v = make_block_sparse(8, 2, 2, std::uint64_t{1});
    CHECK(v.block_support.size() == 1);
    CHECK((v.values.array() != 0.0).count() == 2);
    CHECK(v.values.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("large instance dimensions") {
    const BlockSparseVector v = make_block_sparse(1 << 16, 656, 16, std::uint64_t{2});
    CHECK(v.block_support.size() == 41);
    CHECK((v.values.array() != 0.0).count() == 656);
    CHECK(v.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("fully dense block support") {
    const BlockSparseVector v = make_block_sparse(8, 8, 2, std::uint64_t{3});
    CHECK(v.block_support == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(make_block_sparse(8, 3, 2, std::uint64_t{1}), ConfigError);
    CHECK_THROWS_AS(make_block_sparse(9, 2, 2, std::uint64_t{1}), ConfigError);
    CHECK_THROWS_AS(make_block_sparse(8, 10, 2, std::uint64_t{1}), ConfigError);
  }
  SUBCASE("support invariant holds across seeds") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const BlockSparseVector v = make_block_sparse(24, 6, 2, seed);
      CHECK(satisfies_block_model(v.values, 6, 2));
      CHECK(active_blocks(v.values, 2) == v.block_support);
    }
  }
}

namespace {

SignalConfig small_config(int n, int s, int b, int m, double sigma = 0.0) {
  SignalConfig cfg;
  cfg.n = n;
  cfg.s = s;
  cfg.b = b;
  cfg.m = m;
  cfg.noise_sigma = sigma;
  return cfg;
}

}  // namespace

TEST_CASE("synthesize_instance composes the observation model") {
  SUBCASE("identity everything gives y = theta1 + theta2") {
    const int n = 16;
    BasisPair bases{Orthobasis::identity(n), Orthobasis::identity(n)};
    DesignOperator design = DesignOperator::from_matrix(
        Eigen::MatrixXd::Identity(n, n));
    const SuperpositionInstance inst = synthesize_instance(
        small_config(n, 4, 2, n), bases, std::move(design), identity_link(), 7);
    const Eigen::VectorXd expected =
        inst.theta_true->theta1() + inst.theta_true->theta2();
    CHECK((inst.y - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(inst.e.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("noiseless round trip: y = X Gamma theta to 1e-12 relative") {
    const int n = 32, m = 24;
    BasisPair bases{Orthobasis::dct(n), Orthobasis::random_orthonormal(n, 5)};
    DesignOperator design = gen_subgaussian(m, n, SubgaussianFamily::gaussian,
                                            1.0 / std::sqrt(m), 11);
    const SuperpositionInstance inst = synthesize_instance(
        small_config(n, 8, 4, m), bases, design, identity_link(), 13);
    const Eigen::VectorXd direct = design.apply(bases.gamma_apply(inst.theta_true->t));
    CHECK((inst.y - direct).norm() <= 1e-12 * direct.norm());
    CHECK((inst.beta - bases.gamma_apply(inst.theta_true->t)).norm() <=
          1e-12 * inst.beta.norm());
  }

  SUBCASE("sigmoid observations stay within (-1, 1)") {
    const int n = 32, m = 24;
    BasisPair bases{Orthobasis::identity(n), Orthobasis::dct(n)};
    DesignOperator design = gen_subgaussian(m, n, SubgaussianFamily::gaussian,
                                            1.0 / std::sqrt(m), 3);
    const SuperpositionInstance inst = synthesize_instance(
        small_config(n, 8, 4, m), bases, std::move(design), sigmoid_link(), 21);
    CHECK(inst.y.cwiseAbs().maxCoeff() < 1.0);
  }

  SUBCASE("identical seeds give bitwise-identical instances") {
    const int n = 16, m = 12;
    BasisPair bases{Orthobasis::identity(n), Orthobasis::random_orthonormal(n, 2)};
    const auto build = [&] {
      DesignOperator design = gen_subgaussian(m, n, SubgaussianFamily::gaussian,
                                              1.0 / std::sqrt(m), 40);
      return synthesize_instance(small_config(n, 4, 2, m, 0.3), bases,
                                 std::move(design), sigmoid_link(), 99);
    };
    const SuperpositionInstance a = build();
    const SuperpositionInstance b = build();
    CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.e - b.e).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.theta_true->t - b.theta_true->t).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("noise is seeded and scaled") {
    const int n = 16, m = 400;
    BasisPair bases{Orthobasis::identity(n), Orthobasis::identity(n)};
    DesignOperator design = gen_subgaussian(m, n, SubgaussianFamily::gaussian,
                                            1.0 / std::sqrt(m), 1);
    const SuperpositionInstance inst = synthesize_instance(
        small_config(n, 4, 2, m, 0.5), bases, design, identity_link(), 5);
    CHECK(inst.e.norm() > 0.0);
    const double sample_std = std::sqrt(inst.e.squaredNorm() / m);
    CHECK(sample_std == doctest::Approx(0.5).epsilon(0.2));
    CHECK((inst.y - (design.apply(inst.beta) + inst.e)).cwiseAbs().maxCoeff() ==
          0.0);
  }

  SUBCASE("dimension mismatches are rejected") {
    const int n = 16, m = 12;
    BasisPair bases{Orthobasis::identity(n), Orthobasis::identity(n)};
    DesignOperator wrong = gen_subgaussian(m, n + 2, SubgaussianFamily::gaussian,
                                           1.0, 1);
    CHECK_THROWS_AS(synthesize_instance(small_config(n, 4, 2, m), bases,
                                        std::move(wrong), identity_link(), 1),
                    ConfigError);
  }
}

TEST_CASE("normalized_error") {
  Eigen::VectorXd v(2);
  v << 3.0, 4.0;
  CHECK(normalized_error(v, v) == 0.0);
  CHECK(normalized_error(Eigen::VectorXd::Zero(2), v) == 1.0);
  Eigen::VectorXd est(2), truth(2);
  est << 1.0, 1.0;
  truth << 1.0, 0.0;
  CHECK(normalized_error(est, truth) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(normalized_error(v, Eigen::VectorXd::Zero(2)), DomainError);
  CHECK_THROWS_AS(normalized_error(v, Eigen::VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("instance serialization round trip") {
  const int n = 24, m = 18;
  BasisPair bases{Orthobasis::dct(n), Orthobasis::random_orthonormal(n, 8)};
  DesignOperator design =
      gen_subgaussian(m, n, SubgaussianFamily::gaussian, 1.0 / std::sqrt(m), 17);
  const SuperpositionInstance inst = synthesize_instance(
      small_config(n, 6, 2, m, 0.1), bases, std::move(design), sigmoid_link(), 123);

  const nlohmann::json j = instance_to_json(inst, bases);
  const LoadedInstance loaded = instance_from_json(j);

  CHECK(loaded.instance.config.n == n);
  CHECK(loaded.instance.seed == 123);
  CHECK(loaded.instance.link_name == "sigmoid");
  CHECK((loaded.instance.y - inst.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.instance.e - inst.e).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.instance.beta - inst.beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.instance.theta_true->t - inst.theta_true->t).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((loaded.instance.design.materialize() - inst.design.materialize())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((loaded.bases.psi.materialize() - bases.psi.materialize())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // Named families reload by regeneration even without stored entries.
  nlohmann::json stripped = j;
  stripped["design_descriptor"].erase("values");
  const LoadedInstance regen = instance_from_json(stripped);
  CHECK((regen.instance.design.materialize() - inst.design.materialize())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("17-digit decimal text round-trips doubles exactly") {
  rng::Engine eng = rng::make_engine(5);
  Eigen::VectorXd v(64);
  for (int i = 0; i < 64; ++i) v[i] = rng::normal(eng) * std::pow(10.0, i % 7 - 3);
  const Eigen::VectorXd round = vector_from_json(vector_to_json(v));
  CHECK((round - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("signal config validation") {
  SignalConfig cfg;
  cfg.n = 16;
  cfg.s = 4;
  cfg.b = 2;
  cfg.m = 8;
  CHECK_NOTHROW(cfg.validate());
  cfg.q = 4;
  cfg.k = 2;
  CHECK_NOTHROW(cfg.validate());
  cfg.k = 3;  // m != k*q
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.q = 0;
  cfg.k = 0;
  cfg.s = 20;  // s > n
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
