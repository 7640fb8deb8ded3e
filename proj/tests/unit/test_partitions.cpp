#include <algorithm>

#include "doctest.h"
#include "mmse/errors.hpp"
#include "mmse/partitions.hpp"
#include "oracles.hpp"

using namespace mmse;

namespace {

// Partitions of r into parts >= 2: p(r) - p(r-1).
long long count_parts_at_least_two(int r) {
  std::vector<long long> p(r + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= r; ++part)
    for (int n = part; n <= r; ++n) p[n] += p[n - part];
  return p[r] - p[r - 1];
}

}  // namespace

TEST_SUITE("partitions") {
  TEST_CASE("Partition encoding") {
    const Partition p({0, 5, 0, 1, 0, 0});
    CHECK(p.multiplicities().size() == 4);
    CHECK(p.to_string() == "(0,5,0,1)");
    CHECK(p.degree() == 20);
    CHECK(p.parts() == 6);
    CHECK(p.max_part() == 5);
    CHECK(p.multiplicity(3) == 5);
    CHECK(p.multiplicity(9) == 0);
    CHECK_THROWS_AS(Partition({0, 0}), InvalidArgument);
    CHECK_THROWS_AS(Partition({1, -1}), InvalidArgument);
  }

  TEST_CASE("enumeration is complete, sorted and has the right degree") {
    for (int r = 2; r <= 30; ++r) {
      const auto ps = enumerate_partitions(r);
      CHECK(static_cast<long long>(ps.size()) == count_parts_at_least_two(r));
      for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(ps[i].degree() == r);
        if (i) CHECK(ps[i - 1] < ps[i]);
      }
    }
    CHECK_THROWS_AS(enumerate_partitions(1), InvalidArgument);
  }

  TEST_CASE("c_lambda matches brute-force set partition counts") {
    for (int r = 2; r <= 11; ++r) {
      const auto brute = oracle::cyclic_counts_brute(r);
      const auto ps = enumerate_partitions(r);
      REQUIRE(brute.size() == ps.size());
      for (const Partition& p : ps) {
        CHECK_MESSAGE(cyclic_count(p) == brute.at(p.multiplicities()), p.to_string());
        const BigInt e = signed_cyclic_count(p);
        CHECK(e == (p.parts() % 2 ? cyclic_count(p) : BigInt(-cyclic_count(p))));
      }
    }
  }

  TEST_CASE("Stirling numbers of the second kind") {
    for (int n = 0; n <= 10; ++n)
      for (int k = 0; k <= n; ++k) {
        const BigInt want = n == 0 ? BigInt(k == 0) : oracle::stirling2_brute(n, k);
        CHECK(stirling2(n, k) == want);
      }
    CHECK(stirling2(3, 5) == 0);
    CHECK(stirling2(-1, 0) == 0);
  }

  TEST_CASE("C_r by both methods") {
    const int known[] = {1, 1, 4, 11, 56, 267};
    for (int r = 2; r <= 7; ++r) {
      CHECK(total_cyclic_count(r, TotalCountMethod::StirlingFormula) == known[r - 2]);
      CHECK(total_cyclic_count(r, TotalCountMethod::SumOfCyclicCounts) == known[r - 2]);
    }
    for (int r = 8; r <= 24; ++r) {
      const BigInt a = total_cyclic_count(r, TotalCountMethod::StirlingFormula);
      CHECK(a == total_cyclic_count(r, TotalCountMethod::SumOfCyclicCounts));
      CHECK(a < boost::multiprecision::pow(BigInt(r), r));
    }
  }

  TEST_CASE("transitions reproduce the worked example") {
    const Partition lam({0, 5, 0, 1});
    const auto plus = tau_plus(lam);
    REQUIRE(plus.size() == 2);
    CHECK(plus[0].target == Partition({0, 4, 1, 1}));
    CHECK(plus[0].coeff == 5);
    CHECK(plus[1].target == Partition({0, 5, 0, 0, 1}));
    CHECK(plus[1].coeff == 1);
    const auto minus = tau_minus(lam);
    REQUIRE(minus.size() == 2);
    CHECK(minus[0].target == Partition({2, 4, 0, 1}));
    CHECK(minus[0].coeff == 15);
    CHECK(minus[1].target == Partition({1, 5, 1}));
    CHECK(minus[1].coeff == 5);
  }

  TEST_CASE("transitions raise the degree by one") {
    for (int r = 2; r <= 12; ++r)
      for (const Partition& p : enumerate_partitions(r)) {
        for (const auto& t : tau_plus(p)) CHECK(t.target.degree() == r + 1);
        for (const auto& t : tau_minus(p)) CHECK(t.target.degree() == r + 1);
      }
  }

  TEST_CASE("predecessor maps cover the next level") {
    const auto plus = theta_plus(5);
    CHECK(plus.size() == enumerate_partitions(6).size());
    // (3) at r = 6 arises only from (1,1) by raising the 2.
    const auto& preds = plus.at(Partition({3}));
    CHECK(preds.empty());
    const auto& from = plus.at(Partition({0, 2}));
    REQUIRE(from.size() == 1);
    CHECK(from[0].target == Partition({1, 1}));
    CHECK(from[0].coeff == 1);
  }

  TEST_CASE("recurrence reproduces e_lambda and the small sanity case") {
    for (int r = 2; r <= 12; ++r) {
      const auto h = recurrence_coeffs(r);
      for (const Partition& p : enumerate_partitions(r)) CHECK(h.at(p) == signed_cyclic_count(p));
    }
    // h_(2,1) = 3 h_(3) - 4 h_(1,0,1) - 6 h_(0,2)
    const auto h6 = recurrence_coeffs(6);
    const auto h7 = recurrence_coeffs(7);
    CHECK(h7.at(Partition({2, 1})) ==
          3 * h6.at(Partition({3})) - 4 * h6.at(Partition({1, 0, 1})) - 6 * h6.at(Partition({0, 2})));
  }
}

TEST_SUITE("partitions") {
  TEST_CASE("small levels and their counts") {
    CHECK(enumerate_partitions(2) == std::vector<Partition>{Partition({1})});
    const auto p4 = enumerate_partitions(4);
    REQUIRE(p4.size() == 2);
    CHECK(std::count(p4.begin(), p4.end(), Partition({2})) == 1);
    CHECK(std::count(p4.begin(), p4.end(), Partition({0, 0, 1})) == 1);
    const auto p5 = enumerate_partitions(5);
    REQUIRE(p5.size() == 2);
    CHECK(std::count(p5.begin(), p5.end(), Partition({1, 1})) == 1);
    CHECK(std::count(p5.begin(), p5.end(), Partition({0, 0, 0, 1})) == 1);
    CHECK(cyclic_count(Partition({1})) == 1);
    CHECK(cyclic_count(Partition({2})) == 3);
    CHECK(cyclic_count(Partition({1, 1})) == 10);
    CHECK(signed_cyclic_count(Partition({0, 0, 1})) == 1);
    CHECK(signed_cyclic_count(Partition({2})) == -3);
    CHECK(signed_cyclic_count(Partition({1, 1})) == -10);
    const auto rec = recurrence_coeffs(4);
    CHECK(rec.at(Partition({0, 0, 1})) == 1);
    CHECK(rec.at(Partition({2})) == -3);
    CHECK(tau_minus(Partition({1})).empty());
  }
}
