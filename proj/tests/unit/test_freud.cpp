#include <cmath>

#include "doctest.h"
#include "mmse/channel.hpp"
#include "mmse/errors.hpp"
#include "mmse/freud.hpp"

using namespace mmse;

TEST_SUITE("freud") {
  const Grid grid = Grid::make(-10, 10, 201);

  TEST_CASE("uniform input gives a Freud weight") {
    const FreudReport r = check_freud(InputDist::uniform(1), grid);
    CHECK(r.pass());
    CHECK(r.theorem_applies);
    REQUIRE(r.conditions.size() == 5);
    for (const auto& c : r.conditions) CHECK_MESSAGE(c.verdict == Verdict::Pass, c.name);
  }

  TEST_CASE("constant zero is the Gaussian weight") {
    const FreudReport r = check_freud(InputDist::constant(0), grid);
    CHECK(r.pass());
    const Channel<long double> ch(InputDist::constant(0));
    CHECK(ch.q_prime(3) == 3);
  }

  TEST_CASE("shifted uniform fails evenness with a witness") {
    const FreudReport r = check_freud(InputDist::uniform(1, 1), grid);
    CHECK(!r.pass());
    CHECK(!r.theorem_applies);
    CHECK(r.conditions[0].verdict == Verdict::Fail);
    REQUIRE(r.conditions[0].witness);
    CHECK(*r.conditions[0].witness > 0);
  }

  TEST_CASE("a wide two-point law is a class member but p_Y is bimodal") {
    // Q'(y) = y - 2 tanh(2y) < 0 for small y > 0.
    const InputDist d = InputDist::two_point(2);
    const FreudReport r = check_freud(d, grid);
    CHECK(r.theorem_applies);
    CHECK(r.conditions[0].verdict == Verdict::Pass);
    CHECK(r.conditions[1].verdict == Verdict::Fail);
    REQUIRE(r.conditions[1].witness);
    const long double y = *r.conditions[1].witness;
    CHECK(y - 2 * std::tanh(2 * y) < 0);
    CHECK(r.conditions[2].verdict == Verdict::Fail);
    CHECK(r.conditions[4].verdict == Verdict::Pass);
  }

  TEST_CASE("Gaussian input leaves the ratio condition undetermined") {
    const FreudReport r = check_freud(InputDist::gaussian(0, 1), grid);
    for (int i = 0; i < 4; ++i) CHECK(r.conditions[i].verdict == Verdict::Pass);
    CHECK(r.conditions[4].verdict == Verdict::Undetermined);
    CHECK(!r.pass());
  }

  TEST_CASE("ratio condition sits inside the explicit constants") {
    for (long double M : {0.5L, 1.0L, 3.0L}) {
      const InputDist d = InputDist::two_point(M);
      const Channel<long double> ch(d);
      const long double lambda = M + 2;
      const long double a = (M * M + 5 * M + 8) / (2 * (M + 2)), b = (M * M + 7 * M + 8) / 4;
      CHECK(a > 1);
      for (long double y = M + 4.01L; y < 10 * (M + 4); y += 0.37L) {
        const long double ratio = ch.q_prime(lambda * y) / ch.q_prime(y);
        CHECK(ratio >= a);
        CHECK(ratio <= b);
      }
    }
  }

  TEST_CASE("MRS numbers of Gaussian weights") {
    const MrsResult r4 = mrs_number([](long double y) { return 2 * y; }, 4);
    CHECK(r4.a_n == doctest::Approx(2).epsilon(1e-15));
    CHECK(std::fabs(r4.residual) <= 1e-9L);
    for (int n = 1; n <= 100; ++n) {
      const MrsResult r = mrs_number([](long double y) { return 2 * y; }, n);
      CHECK(std::fabs(r.a_n / std::sqrt(static_cast<long double>(n)) - 1) <= 1e-8L);
      const MrsResult c = mrs_number(InputDist::constant(0), n);
      CHECK(std::fabs(c.a_n / std::sqrt(2.0L * n) - 1) <= 1e-8L);
    }
  }

  TEST_CASE("MRS numbers of class members increase and respect the bound") {
    const MrsResult r9 = mrs_number(InputDist::uniform(1), 9);
    CHECK(r9.a_n <= mrs_upper_bound(1, 9));
    CHECK(mrs_upper_bound(1, 9) == doctest::Approx(10.2426).epsilon(1e-5));
    for (const auto& nd : class_D_family()) {
      long double prev = 0;
      for (int n = 1; n <= 60; ++n) {
        const MrsResult r = mrs_number(nd.dist, n);
        CHECK(r.a_n > prev);
        CHECK(r.a_n <= mrs_upper_bound(nd.dist.support_bound(), n));
        CHECK(std::fabs(r.residual) <= 1e-8L);
        prev = r.a_n;
      }
    }
  }

  TEST_CASE("MRS bracket failure and bad input") {
    CHECK_THROWS_AS(mrs_number([](long double y) { return 1e-9L * y; }, 5, 1e3L), OutOfRange);
    CHECK_THROWS_AS(mrs_number([](long double y) { return y; }, 0), InvalidArgument);
  }

  TEST_CASE("Q' envelope") {
    const EnvelopeResult u = qprime_envelope_check(InputDist::uniform(1), Grid::make(-20, 20, 401));
    CHECK(u.holds);
    const Channel<long double> tp(InputDist::two_point(1));
    CHECK(tp.q_prime(5) == doctest::Approx(5 - std::tanh(5.0L)));
    CHECK(qprime_envelope_check(InputDist::two_point(1), Grid::make(-5, 5, 101)).holds);
    const EnvelopeResult c = qprime_envelope_check(InputDist::constant(0), Grid::make(-5, 5, 11));
    CHECK(c.holds);
    CHECK(c.support_bound == 0);
    CHECK_THROWS_AS(qprime_envelope_check(InputDist::gaussian(0, 1), grid), InvalidArgument);
  }
}

TEST_SUITE("grid") {
  TEST_CASE("parse and points") {
    const Grid g = Grid::parse("-1:1:5");
    const auto pts = g.points();
    REQUIRE(pts.size() == 5);
    CHECK(pts.front() == -1);
    CHECK(pts[2] == 0);
    CHECK(pts.back() == 1);
    CHECK(Grid::parse("0:2.5:2").points().back() == 2.5L);
  }

  TEST_CASE("malformed grids") {
    for (const char* bad : {"1:0:5", "0:1:1", "0:1", "a:1:3", "0:1:3:4", "0:1:2.5", ""})
      CHECK_THROWS_AS_MESSAGE(Grid::parse(bad), InvalidArgument, bad);
  }
}
