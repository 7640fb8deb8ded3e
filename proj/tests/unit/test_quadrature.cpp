#include <cmath>

#include "doctest.h"
#include "mmse/errors.hpp"
#include "mmse/quadrature.hpp"
#include "oracles.hpp"

using namespace mmse;

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Hermite reproduces normal moments") {
    for (int order : {10, 64, 200}) {
      const auto rule = gauss_hermite<long double>(order);
      CHECK(rule.kind == RuleKind::GaussHermite);
      CHECK(rule.integrate([](long double) { return 1.0L; }) == doctest::Approx(1).epsilon(1e-18));
      for (int k = 0; k < 2 * order && k <= 30; ++k) {
        const long double got = rule.integrate([&](long double z) { return std::pow(z, k); });
        const long double want = oracle::normal_moment(k);
        if (want == 0)
          CHECK(std::fabs(got) < 1e-12L * oracle::normal_moment(k + 1));
        else
          CHECK(std::fabs(got / want - 1) < 1e-15L);
      }
    }
  }

  TEST_CASE("Gauss-Hermite nodes are symmetric and sorted") {
    const auto rule = gauss_hermite<long double>(51);
    REQUIRE(rule.size() == 51);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      CHECK(std::fabs(rule.nodes[i] + rule.nodes[rule.size() - 1 - i]) < 1e-16L * (1 + std::fabs(rule.nodes[i])));
      CHECK(rule.weights[i] > 0);
      if (i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    }
  }

  TEST_CASE("double Gauss-Hermite drops underflowing tail weights only") {
    const auto ld = gauss_hermite<long double>(400);
    const auto d = gauss_hermite<double>(400);
    CHECK(d.size() <= ld.size());
    double total = 0;
    for (double w : d.weights) {
      CHECK(w > 0);
      total += w;
    }
    CHECK(total == doctest::Approx(1).epsilon(1e-14));
  }

  TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
    const auto rule = gauss_legendre<long double>(20, -2.0L, 5.0L);
    for (int k = 0; k < 40; ++k) {
      const long double exact = (std::pow(5.0L, k + 1) - std::pow(-2.0L, k + 1)) / (k + 1);
      CHECK(rule.integrate([&](long double x) { return std::pow(x, k); }) == doctest::Approx(exact).epsilon(1e-16));
    }
    const auto d = gauss_legendre<double>(7, 0.0, 1.0);
    CHECK(d.integrate([](double x) { return std::exp(x); }) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-13));
  }

  TEST_CASE("composite rule handles a kink at a breakpoint exactly") {
    const std::vector<long double> breaks{-1, 0, 1};
    const auto rule = composite_legendre<long double>(8, breaks);
    CHECK(rule.size() == 16);
    CHECK(rule.integrate([](long double x) { return std::fabs(x); }) == doctest::Approx(1).epsilon(1e-18));
  }

  TEST_CASE("invalid orders and intervals are rejected") {
    CHECK_THROWS_AS(gauss_hermite<double>(0), InvalidArgument);
    CHECK_THROWS_AS(gauss_legendre<double>(5, 1.0, 1.0), InvalidArgument);
    const std::vector<double> one{0.0};
    CHECK_THROWS_AS(composite_legendre<double>(4, one), InvalidArgument);
  }

  TEST_CASE("precision names") {
    CHECK(parse_precision("double") == Precision::Double);
    CHECK(parse_precision("extended") == Precision::Extended);
    CHECK_THROWS_AS(parse_precision("quad"), InvalidArgument);
    CHECK(to_string(Precision::Extended) == "extended");
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("small rules") {
    const auto one = gauss_hermite<double>(1);
    REQUIRE(one.size() == 1);
    CHECK(one.nodes[0] == doctest::Approx(0));
    CHECK(one.weights[0] == doctest::Approx(1));
    CHECK(gauss_hermite<double>(3).integrate([](double z) { return z * z * z * z; }) == doctest::Approx(3));
    CHECK(gauss_legendre<double>(4, -1.0, 1.0).integrate([](double x) { return std::pow(x, 6); }) ==
          doctest::Approx(2.0 / 7));
  }
}
