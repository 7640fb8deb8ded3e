#include "mmse/freud.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "mmse/channel.hpp"
#include "mmse/errors.hpp"

namespace mmse {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

bool FreudReport::pass() const {
  for (const auto& c : conditions)
    if (c.verdict != Verdict::Pass) return false;
  return !conditions.empty();
}

namespace {

std::vector<long double> positive_points(const Grid& grid) {
  std::vector<long double> out;
  for (long double y : grid.points())
    if (y > 0) out.push_back(y);
  return out;
}

ConditionResult check_even(const Channel<long double>& ch, const std::vector<long double>& ys, long double tol) {
  ConditionResult c{1, "Q even", Verdict::Pass, std::nullopt, "", ys};
  long double worst = 0;
  for (long double y : ys) {
    const long double d = std::fabs(ch.log_output_density(y) - ch.log_output_density(-y));
    if (!(d <= tol)) {
      c.verdict = Verdict::Fail;
      c.witness = y;
      c.detail = fmt::format("|Q({0:.6g}) - Q(-{0:.6g})| = {1:.3g}", static_cast<double>(y), static_cast<double>(d));
      return c;
    }
    worst = std::max(worst, d);
  }
  c.detail = fmt::format("max |Q(y) - Q(-y)| = {:.3g}", static_cast<double>(worst));
  return c;
}

ConditionResult check_positive(const Channel<long double>& ch, const std::vector<long double>& ys, long double floor) {
  ConditionResult c{2, "Q'(y) > 0 for y > 0", Verdict::Pass, std::nullopt, "", ys};
  for (long double y : ys) {
    const long double q = ch.q_prime(y);
    if (!(q > floor)) {
      c.verdict = Verdict::Fail;
      c.witness = y;
      c.detail = fmt::format("Q'({:.6g}) = {:.6g}", static_cast<double>(y), static_cast<double>(q));
      return c;
    }
  }
  return c;
}

ConditionResult check_increasing(const Channel<long double>& ch, const std::vector<long double>& ys) {
  ConditionResult c{3, "y Q'(y) strictly increasing", Verdict::Pass, std::nullopt, "", ys};
  long double prev = -INFINITY;
  for (long double y : ys) {
    const long double v = y * ch.q_prime(y);
    if (!(v > prev)) {
      c.verdict = Verdict::Fail;
      c.witness = y;
      c.detail = fmt::format("y Q'(y) = {:.17g} does not exceed the previous grid value {:.17g}", static_cast<double>(v),
                             static_cast<double>(prev));
      return c;
    }
    prev = v;
  }
  return c;
}

ConditionResult check_limit_at_zero(const Channel<long double>& ch) {
  const std::vector<long double> ys{1e-2L, 1e-4L, 1e-6L};
  ConditionResult c{4, "y Q'(y) -> 0 as y -> 0+", Verdict::Pass, std::nullopt, "", ys};
  std::vector<long double> vs;
  for (long double y : ys) vs.push_back(y * ch.q_prime(y));
  // Each hundredfold step toward 0 must shrink |y Q'(y)| at least linearly.
  for (std::size_t i = 1; i < ys.size(); ++i) {
    const long double allowed = std::fabs(vs[i - 1]) * (ys[i] / ys[i - 1]) * 1.01L;
    if (!(std::fabs(vs[i]) <= allowed)) {
      c.verdict = Verdict::Fail;
      c.witness = ys[i];
      c.detail = fmt::format("|y Q'(y)| = {:.6g} at y = {:.0e} decays slower than linearly", static_cast<double>(std::fabs(vs[i])),
                             static_cast<double>(ys[i]));
      return c;
    }
  }
  c.detail = fmt::format("y Q'(y) = {:.3g}, {:.3g}, {:.3g}", static_cast<double>(vs[0]), static_cast<double>(vs[1]),
                         static_cast<double>(vs[2]));
  return c;
}

ConditionResult check_ratio(const Channel<long double>& ch, const InputDist& dist, const Grid& grid, long double rel) {
  ConditionResult c{5, "ratio Q'(lambda y) / Q'(y) bounded", Verdict::Pass, std::nullopt, "", {}};
  if (!dist.compact()) {
    c.verdict = Verdict::Undetermined;
    c.detail = "no support bound; constants (lambda, a, b, c) not searched";
    return c;
  }
  const long double M = dist.support_bound();
  const long double lambda = M + 2;
  const long double a = (M * M + 5 * M + 8) / (2 * (M + 2));
  const long double b = (M * M + 7 * M + 8) / 4;
  const long double start = M + 4;

  for (long double y : grid.points())
    if (y > start) c.grid.push_back(y);
  constexpr int kTail = 64;
  for (int i = 1; i <= kTail; ++i) c.grid.push_back(start + (9 * start) * i / kTail);

  for (long double y : c.grid) {
    const long double ratio = ch.q_prime(lambda * y) / ch.q_prime(y);
    if (!(ratio >= a * (1 - rel) && ratio <= b * (1 + rel))) {
      c.verdict = Verdict::Fail;
      c.witness = y;
      c.detail = fmt::format("ratio {:.17g} outside [{:.17g}, {:.17g}]", static_cast<double>(ratio),
                             static_cast<double>(a), static_cast<double>(b));
      return c;
    }
  }
  c.detail = fmt::format("lambda = {:.6g}, a = {:.6g}, b = {:.6g}, c = {:.6g}", static_cast<double>(lambda),
                         static_cast<double>(a), static_cast<double>(b), static_cast<double>(start));
  return c;
}

}  // namespace

FreudReport check_freud(const InputDist& dist, const Grid& grid, const FreudTolerances& tol) {
  const Channel<long double> ch(dist);
  const std::vector<long double> ys = positive_points(grid);
  if (ys.size() < 2) throw InvalidArgument("Freud checks need at least two grid points with y > 0");

  FreudReport rep;
  rep.dist_label = dist.label();
  rep.compact = dist.compact();
  rep.support_bound = dist.support_bound();
  rep.conditions.push_back(check_even(ch, ys, tol.even));
  rep.conditions.push_back(check_positive(ch, ys, tol.positive));
  rep.conditions.push_back(check_increasing(ch, ys));
  rep.conditions.push_back(check_limit_at_zero(ch));
  rep.conditions.push_back(check_ratio(ch, dist, grid, tol.ratio));
  rep.theorem_applies = in_class_D(dist).member;
  return rep;
}

namespace {

struct SineRule {
  std::vector<long double> theta, weight;
};

const SineRule& sine_rule() {
  static const SineRule rule = [] {
    const auto gl = gauss_legendre<long double>(64, 0.0L, std::numbers::pi_v<long double> / 2);
    return SineRule{gl.nodes, gl.weights};
  }();
  return rule;
}

}  // namespace

long double mrs_functional(const std::function<long double(long double)>& qprime, long double z) {
  const SineRule& r = sine_rule();
  long double acc = 0;
  for (std::size_t i = 0; i < r.theta.size(); ++i) {
    const long double y = z * std::sin(r.theta[i]);
    acc += r.weight[i] * y * qprime(y);
  }
  return 2 * acc / std::numbers::pi_v<long double>;
}

MrsResult mrs_number(const std::function<long double(long double)>& qprime, int n, long double z_max) {
  if (n < 1) throw InvalidArgument("MRS index n must be positive");
  const long double target = n;
  auto F = [&](long double z) { return mrs_functional(qprime, z) - target; };

  long double lo = 0, hi = 1;
  long double fhi = F(hi);
  while (!(fhi > 0)) {
    if (!std::isfinite(fhi)) throw NumericFailure(fmt::format("MRS functional not finite at z = {}", static_cast<double>(hi)));
    lo = hi;
    hi *= 2;
    if (hi > z_max)
      throw OutOfRange(fmt::format("no MRS bracket for n = {} below z_max = {:g}", n, static_cast<double>(z_max)));
    fhi = F(hi);
  }
  const long double flo = lo == 0 ? -target : F(lo);

  long double a_n = hi;
  if (fhi != 0) {
    boost::math::tools::eps_tolerance<long double> tol(std::numeric_limits<long double>::digits - 3);
    std::uintmax_t iters = 200;
    const auto [x0, x1] = boost::math::tools::toms748_solve(F, lo, hi, flo, fhi, tol, iters);
    a_n = (x0 + x1) / 2;
  }
  MrsResult res{n, a_n, -F(a_n)};
  if (!(std::fabs(res.residual) <= 1e-8L))
    throw NumericFailure(fmt::format("MRS root for n = {} left residual {:.3g}", n, static_cast<double>(res.residual)));
  return res;
}

MrsResult mrs_number(const InputDist& dist, int n, long double z_max) {
  const Channel<long double> ch(dist);
  return mrs_number([&](long double y) { return ch.q_prime(y); }, n, z_max);
}

long double mrs_upper_bound(long double support_bound, int n) {
  return (2 * support_bound + std::sqrt(2.0L)) * std::sqrt(static_cast<long double>(n));
}

EnvelopeResult qprime_envelope_check(const InputDist& dist, const Grid& grid) {
  if (!dist.compact()) throw InvalidArgument("Q' envelope needs a compactly supported input");
  const Channel<long double> ch(dist);
  EnvelopeResult res;
  res.support_bound = dist.support_bound();
  const long double M = res.support_bound;
  for (long double y : grid.points()) {
    const long double q = ch.q_prime(y);
    if (q < y - M - 1e-9L || q > y + M + 1e-9L) {
      res.holds = false;
      res.witnesses.push_back(y);
    }
  }
  return res;
}

}  // namespace mmse
