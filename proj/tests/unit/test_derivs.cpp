#include <cmath>

#include "doctest.h"
#include "mmse/derivs.hpp"
#include "mmse/errors.hpp"
#include "oracles.hpp"

using namespace mmse;

TEST_SUITE("derivs") {
  TEST_CASE("low-order derivatives in g-symbols") {
    CHECK(symbolic_derivative(2).to_string() == "g2");
    CHECK(symbolic_derivative(3).to_string() == "g3");
    CHECK(symbolic_derivative(4).to_string() == "g4 - 3*g2^2");
    CHECK(symbolic_derivative(5).to_string() == "g5 - 10*g2*g3");
    CHECK_THROWS_AS(symbolic_derivative(1), InvalidArgument);
  }

  TEST_CASE("symbolic, closed-form and recurrence derivatives coincide") {
    for (int r = 2; r <= 12; ++r) {
      const GPoly sym = symbolic_derivative(r);
      const GPoly closed = closed_form_derivative(r);
      CHECK_MESSAGE(sym == closed, "r = " << r);
      GPoly rec;
      for (const auto& [p, c] : recurrence_coeffs(r)) rec.add(p, c);
      CHECK_MESSAGE(rec == closed, "r = " << r);
      CHECK(closed.homogeneous_degree() == r);
      CHECK(closed.abs_coeff_sum() == total_cyclic_count(r, TotalCountMethod::StirlingFormula));
      CHECK(closed.max_index() == r);
    }
  }

  TEST_CASE("GPoly arithmetic drops cancelled terms") {
    GPoly p;
    p.add(Partition({1}), 3);
    p.add(Partition({1}), -3);
    CHECK(p.empty());
    CHECK(p.to_string() == "0");
    CHECK(!p.homogeneous_degree());
    p.add(Partition({1}), 1);
    p.add(Partition({0, 1}), 1);
    CHECK(!p.homogeneous_degree());
  }

  TEST_CASE("evaluation against tanh derivatives") {
    const Channel<long double> ch(InputDist::two_point(1));
    for (int r = 2; r <= 5; ++r) {
      const GPoly p = closed_form_derivative(r);
      for (long double y = -3; y <= 3; y += 0.5L)
        CHECK(std::fabs(eval_gpoly(p, ch, y) - oracle::tanh_derivative(y, r - 1)) < 1e-16L);
    }
    const std::vector<double> short_g{1, 0, 1};
    CHECK_THROWS_AS(eval_gpoly(closed_form_derivative(4), std::span<const double>(short_g)), InvalidArgument);
  }

  TEST_CASE("finite differences track the closed form") {
    const Channel<long double> tp(InputDist::two_point(1));
    for (int order = 1; order <= 4; ++order)
      for (long double y : {-2.0L, -0.5L, 0.0L, 1.0L, 2.0L})
        CHECK(std::fabs(fd_derivative(tp, y, order) - oracle::tanh_derivative(y, order)) < 1e-6L);
    CHECK_THROWS_AS(fd_derivative(tp, 0, 0), InvalidArgument);
  }

  TEST_CASE("q_r, gamma_r and beta_r") {
    const int want[] = {1, 1, 1, 2, 2, 2};
    for (int r = 2; r <= 7; ++r) CHECK(q_r(r) == want[r - 2]);
    for (int r = 2; r <= 2000; ++r) {
      // floor((sqrt(8r+9) - 3) / 2) is the largest s with s^2 + 3s <= 2r
      const int s = q_r(r);
      CHECK(s * s + 3 * s <= 2 * r);
      CHECK((s + 1) * (s + 1) + 3 * (s + 1) > 2 * r);
    }
    CHECK(gamma_r(2) == doctest::Approx(std::pow(24.0, 0.25)).epsilon(1e-14));
    CHECK(gamma_r(5) == doctest::Approx(std::pow(std::tgamma(21.0), 1.0 / 8)).epsilon(1e-12));
    CHECK(beta_r(7) == doctest::Approx(10).epsilon(1e-14));
    CHECK(beta_r(7) < 7 * q_r(7));
  }

  TEST_CASE("norm bound holds and reports its pieces") {
    for (const auto& nd : class_D_family())
      for (int r = 2; r <= 6; ++r) {
        const DerivBoundReport rep = derivative_norm_bound(nd.dist, r, true);
        CHECK(rep.holds);
        CHECK(rep.lhs > 0);
        CHECK(rep.norm_order == 2.0 * r * q_r(r));
        REQUIRE(rep.beta_rhs);
      }
    // Gaussian input: ||X||^r grows but gamma_r caps the bound.
    const DerivBoundReport g = derivative_norm_bound(InputDist::gaussian(0, 100), 3, false);
    CHECK(g.rhs == doctest::Approx(8 * gamma_r(3)));
    CHECK(g.holds);
  }
}
