// Randomized invariants over seeded families of symmetric, non-increasing
// pmfs (class members by construction) and asymmetric ones.

#include <cmath>
#include <random>

#include "doctest.h"
#include "mmse/approx.hpp"
#include "mmse/channel.hpp"
#include "mmse/derivs.hpp"
#include "mmse/freud.hpp"

using namespace mmse;

namespace {

// With max_bound <= 1 every conditional variance is at most 1, which keeps
// y - E[X|Y=y] increasing; wider supports can make p_Y bimodal.
InputDist random_class_member(std::mt19937_64& rng, long double max_bound = 2.5L) {
  std::uniform_real_distribution<long double> unit(0.05L, 1.0L);
  std::uniform_int_distribution<int> count(1, 4);
  const long double M = max_bound * (0.2L + 0.8L * unit(rng));
  const int k = count(rng);
  std::vector<long double> xs, ws;
  for (int i = 0; i < k; ++i) xs.push_back(M * unit(rng));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  xs.back() = M;
  long double w = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ws.push_back(w);
    w *= unit(rng);
  }
  const bool center = std::bernoulli_distribution(0.5)(rng);
  long double total = center ? ws.front() * (1 + unit(rng)) : 0;
  const long double center_mass = total;
  for (long double v : ws) total += 2 * v;
  std::vector<Atom> atoms;
  if (center) atoms.push_back({0, center_mass / total});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    atoms.push_back({xs[i], ws[i] / total});
    atoms.push_back({-xs[i], ws[i] / total});
  }
  // Absorb rounding so the masses sum to one.
  long double s = 0;
  for (const auto& a : atoms) s += a.mass;
  atoms.front().mass += 1 - s;
  return InputDist::pmf(atoms);
}

InputDist random_asymmetric(std::mt19937_64& rng) {
  std::uniform_real_distribution<long double> unit(0.1L, 1.0L);
  const long double p = unit(rng) / 2;
  return InputDist::pmf({{-unit(rng), p}, {unit(rng) + 0.05L, 1 - p}});
}

constexpr int kTrials = 12;

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("random class members: estimator shape and identities") {
    std::mt19937_64 rng(20240611);
    const Grid grid = Grid::make(-8, 8, 65);
    for (int t = 0; t < kTrials; ++t) {
      const InputDist d = random_class_member(rng);
      REQUIRE(in_class_D(d).member);
      const Channel<long double> ch(d);
      long double prev = -INFINITY;
      for (long double y : grid.points()) {
        const long double f = ch.cond_mean(y);
        CHECK(std::fabs(f + ch.cond_mean(-y)) < 1e-14L);  // odd
        CHECK(f >= prev);                                 // f' = g2 >= 0
        CHECK(ch.cond_central_moment(y, 2) >= 0);
        CHECK(std::fabs(ch.tweedie(y) - f) < 1e-10L);
        prev = f;
      }
      CHECK(qprime_envelope_check(d, grid).holds);
    }
  }

  TEST_CASE("random class members with support in [-1, 1] give Freud weights") {
    std::mt19937_64 rng(20240612);
    for (int t = 0; t < kTrials; ++t) {
      const InputDist d = random_class_member(rng, 1);
      CHECK(check_freud(d, Grid::make(-12, 12, 121)).pass());
    }
  }

  TEST_CASE("random class members: MRS bound and monotonicity") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < kTrials / 2; ++t) {
      const InputDist d = random_class_member(rng);
      long double prev = 0;
      for (int n : {1, 2, 5, 10, 25, 50, 100}) {
        const MrsResult r = mrs_number(d, n);
        CHECK(r.a_n > prev);
        CHECK(r.a_n <= mrs_upper_bound(d.support_bound(), n));
        prev = r.a_n;
      }
    }
  }

  TEST_CASE("random class members: projections") {
    std::mt19937_64 rng(99);
    QuadConfig cfg;
    cfg.precision = Precision::Extended;
    for (int t = 0; t < kTrials / 2; ++t) {
      const InputDist d = random_class_member(rng);
      const Projector<long double> p(d, cfg, 8);
      long double prev = INFINITY;
      for (int n = 0; n <= 8; ++n) {
        const auto o = p.orthogonal(n);
        const auto h = p.hankel(n);
        for (int j = 0; j <= n; ++j) CHECK(std::fabs(o.coeffs[j] - h.coeffs[j]) < 1e-6L * (1 + std::fabs(o.coeffs[j])));
        CHECK(o.l2_error <= prev * (1 + 1e-12L));
        prev = o.l2_error;
      }
      for (int n : {1, 3, 6}) CHECK(mse_gap(d, n, cfg).bound_holds);
    }
  }

  TEST_CASE("random class members: derivative formula against finite differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<long double> ypick(-2, 2);
    for (int t = 0; t < kTrials / 2; ++t) {
      const InputDist d = random_class_member(rng);
      const Channel<long double> ch(d);
      for (int r = 2; r <= 5; ++r) {
        const GPoly p = closed_form_derivative(r);
        const long double y = ypick(rng);
        const long double scale = 1 + std::fabs(eval_gpoly(p, ch, y));
        CHECK(std::fabs(eval_gpoly(p, ch, y) - fd_derivative(ch, y, r - 1)) < 1e-5L * scale);
      }
      for (int r = 2; r <= 6; ++r) CHECK(derivative_norm_bound(d, r, false).holds);
    }
  }

  TEST_CASE("asymmetric laws fail evenness") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < kTrials; ++t) {
      const InputDist d = random_asymmetric(rng);
      const FreudReport r = check_freud(d, Grid::make(-6, 6, 61));
      CHECK(r.conditions[0].verdict == Verdict::Fail);
      CHECK(!r.theorem_applies);
    }
  }
}
