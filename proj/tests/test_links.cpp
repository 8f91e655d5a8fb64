#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "demix/errors.hpp"
#include "demix/links.hpp"

using namespace demix;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Eigen::VectorXd test_grid() {
  const int points = 10001;
  Eigen::VectorXd g(points);
  for (int i = 0; i < points; ++i) {
    g[i] = -20.0 + 40.0 * static_cast<double>(i) / (points - 1);
  }
  return g;
}

}  // namespace

TEST_CASE("builtin link catalog") {
  const auto& links = builtin_links();
  REQUIRE(links.size() >= 4);
  CHECK(link_by_name("identity").deriv_lower == 1.0);
  CHECK(link_by_name("identity").deriv_upper == 1.0);
  CHECK(link_by_name("sin").period == doctest::Approx(kTau));
  CHECK(link_by_name("sawtooth").period == doctest::Approx(kTau));
  CHECK_THROWS_AS(link_by_name("tanhish"), ConfigError);
}

TEST_CASE("pointwise values") {
  const LinkSpec sig = sigmoid_link();
  CHECK(sig.g(0.0) == 0.0);
  CHECK(sig.g_prime(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sig.antiderivative(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // (1 - e^-x)/(1 + e^-x) against the tanh form on a few points.
  for (double x : {-3.0, -0.7, 0.25, 1.0, 8.0}) {
    const double direct = (1.0 - std::exp(-x)) / (1.0 + std::exp(-x));
    CHECK(sig.g(x) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(sig.antiderivative(x) ==
          doctest::Approx(2.0 * std::log(std::cosh(0.5 * x))).epsilon(1e-13));
  }

  CHECK(sin_link().g(std::numbers::pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(identity_link().antiderivative(3.0) == doctest::Approx(4.5));
  CHECK(sawtooth_link().g(kTau + 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(sawtooth_link().g(-0.5) == doctest::Approx(kTau - 0.5).epsilon(1e-12));
}

TEST_CASE("sigmoid derivative bounds live on the operating range") {
  const LinkSpec sig = sigmoid_link(10.0);
  CHECK(sig.operating_range == 10.0);
  CHECK(sig.deriv_upper == doctest::Approx(0.5));
  CHECK(sig.deriv_lower == doctest::Approx(sig.g_prime(10.0)));
  CHECK(sig.deriv_lower > 0.0);
}

TEST_CASE("antiderivative matches the link under finite differences") {
  const Eigen::VectorXd grid = test_grid();
  const double h = 1e-6;
  for (const LinkSpec& link : builtin_links()) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      if (link.name == "sawtooth") {
        // g jumps at multiples of 2*pi; a centered difference straddling the
        // jump returns the midpoint of the one-sided limits, so the identity
        // Theta' = g only makes sense away from those points.
        const double dist = std::fabs(x - kTau * std::round(x / kTau));
        if (dist <= 10.0 * h) continue;
      }
      const double fd =
          (link.antiderivative(x + h) - link.antiderivative(x - h)) / (2.0 * h);
      const double err = std::fabs(fd - link.g(x)) / std::max(1.0, std::fabs(link.g(x)));
      worst = std::max(worst, err);
    }
    INFO("link = ", link.name);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("monotone links increase along the grid") {
  const Eigen::VectorXd grid = test_grid();
  for (const char* name : {"identity", "sigmoid"}) {
    const LinkSpec& link = link_by_name(name);
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
      REQUIRE(link.g(grid[i + 1]) > link.g(grid[i]));
    }
  }
}

TEST_CASE("periodicity holds to machine precision") {
  const Eigen::VectorXd grid = test_grid();
  for (const char* name : {"sin", "sawtooth"}) {
    const LinkSpec& link = link_by_name(name);
    for (Eigen::Index i = 0; i < grid.size(); i += 7) {
      CHECK(std::fabs(link.g(grid[i] + link.period) - link.g(grid[i])) <= 1e-10);
    }
  }
}

TEST_CASE("sin of the sawtooth equals sin of the raw phase") {
  const Eigen::VectorXd grid = test_grid();
  const LinkSpec& saw = link_by_name("sawtooth");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(std::fabs(std::sin(saw.g(grid[i])) - std::sin(grid[i])) <= 1e-12);
  }
}

TEST_CASE("eval_link modes and domain checks") {
  Eigen::VectorXd x(3);
  x << -1.0, 0.0, 2.0;
  const LinkSpec& sig = link_by_name("sigmoid");
  const Eigen::VectorXd v = eval_link(sig, LinkMode::value, x);
  for (int i = 0; i < 3; ++i) CHECK(v[i] == sig.g(x[i]));
  const Eigen::VectorXd d = eval_link(sig, LinkMode::derivative, x);
  for (int i = 0; i < 3; ++i) CHECK(d[i] == sig.g_prime(x[i]));

  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval_link(sig, LinkMode::value, bad), DomainError);
  bad[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(eval_link(sig, LinkMode::antiderivative, bad), DomainError);
}

TEST_CASE("sigmoid family is stable out to |x| = 1e3") {
  const LinkSpec& sig = link_by_name("sigmoid");
  for (double x : {-1000.0, -500.0, 500.0, 1000.0}) {
    CHECK(std::isfinite(sig.g(x)));
    CHECK(std::isfinite(sig.g_prime(x)));
    CHECK(std::isfinite(sig.antiderivative(x)));
    CHECK(std::fabs(sig.g(x)) <= 1.0);
    CHECK(sig.antiderivative(x) ==
          doctest::Approx(std::fabs(x) - 2.0 * std::numbers::ln2).epsilon(1e-12));
  }
}
