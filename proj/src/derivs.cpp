#include "mmse/derivs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmse/errors.hpp"
#include "mmse/output_rule.hpp"

namespace mmse {

void GPoly::add(const Partition& monomial, const BigInt& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.emplace(monomial, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

std::optional<int> GPoly::homogeneous_degree() const {
  std::optional<int> deg;
  for (const auto& [mono, c] : terms_) {
    if (deg && *deg != mono.degree()) return std::nullopt;
    deg = mono.degree();
  }
  return deg;
}

BigInt GPoly::abs_coeff_sum() const {
  BigInt acc = 0;
  for (const auto& [mono, c] : terms_) acc += abs(c);
  return acc;
}

int GPoly::max_index() const {
  int idx = 0;
  for (const auto& [mono, c] : terms_) idx = std::max(idx, mono.max_part());
  return idx;
}

std::string GPoly::to_string() const {
  if (terms_.empty()) return "0";
  // Highest index first reads like the usual g4 - 3*g2^2.
  std::vector<const Terms::value_type*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
    const auto& ma = a->first.multiplicities();
    const auto& mb = b->first.multiplicities();
    if (ma.size() != mb.size()) return ma.size() > mb.size();
    return std::lexicographical_compare(mb.rbegin(), mb.rend(), ma.rbegin(), ma.rend());
  });
  std::string s;
  for (const auto* term : order) {
    const auto& [mono, c] = *term;
    BigInt mag = abs(c);
    if (s.empty())
      s += (c < 0 ? "-" : "");
    else
      s += (c < 0 ? " - " : " + ");
    bool first = true;
    if (mag != 1) {
      s += mag.str();
      first = false;
    }
    for (int i = 2; i <= mono.max_part(); ++i) {
      const int li = mono.multiplicity(i);
      if (li == 0) continue;
      if (!first) s += "*";
      s += "g" + std::to_string(i);
      if (li > 1) s += "^" + std::to_string(li);
      first = false;
    }
  }
  return s;
}

namespace {

using Exponents = std::map<int, int>;  // g-index -> power

Exponents to_exponents(const Partition& p) {
  Exponents e;
  for (int i = 2; i <= p.max_part(); ++i)
    if (p.multiplicity(i) > 0) e[i] = p.multiplicity(i);
  return e;
}

Partition from_exponents(const Exponents& e) {
  std::vector<int> dense(e.rbegin()->first - 1, 0);
  for (const auto& [i, a] : e) dense[i - 2] = a;
  return Partition(std::move(dense));
}

void bump(Exponents& e, int index, int delta) {
  if ((e[index] += delta) == 0) e.erase(index);
}

// d/dy of a single monomial, applied factor by factor.
void differentiate_into(const Partition& mono, const BigInt& coeff, GPoly& out) {
  const Exponents base = to_exponents(mono);
  for (const auto& [i, alpha] : base) {
    // alpha g_i^{alpha-1} g_{i+1}
    Exponents up = base;
    bump(up, i, -1);
    bump(up, i + 1, +1);
    out.add(from_exponents(up), coeff * alpha);

    // - alpha i g_2 g_{i-1} g_i^{alpha-1}; vanishes when g_{i-1} = g_1.
    if (i - 1 == 1) continue;
    Exponents down = base;
    bump(down, i, -1);
    bump(down, i - 1, +1);
    bump(down, 2, +1);
    out.add(from_exponents(down), -coeff * alpha * i);
  }
}

}  // namespace

GPoly symbolic_derivative(int r) {
  if (r < 2) throw InvalidArgument("derivative order r must be >= 2");
  GPoly current;
  current.add(Partition({1}), 1);  // f' = g_2
  for (int step = 2; step < r; ++step) {
    GPoly next;
    for (const auto& [mono, c] : current.terms()) differentiate_into(mono, c, next);
    current = std::move(next);
  }
  return current;
}

GPoly closed_form_derivative(int r) {
  GPoly out;
  for (const Partition& p : enumerate_partitions(r)) out.add(p, signed_cyclic_count(p));
  return out;
}

template <class Real>
Real eval_gpoly(const GPoly& poly, std::span<const Real> g) {
  if (poly.max_index() >= static_cast<int>(g.size()))
    throw InvalidArgument("eval_gpoly needs g_" + std::to_string(poly.max_index()));
  Real acc = 0;
  for (const auto& [mono, c] : poly.terms()) {
    Real term = static_cast<Real>(c.template convert_to<long double>());
    for (int i = 2; i <= mono.max_part(); ++i) {
      const int li = mono.multiplicity(i);
      for (int j = 0; j < li; ++j) term *= g[i];
    }
    acc += term;
  }
  if (!std::isfinite(acc)) throw NumericFailure("eval_gpoly overflowed for " + poly.to_string());
  return acc;
}

template <class Real>
Real eval_gpoly(const GPoly& poly, const Channel<Real>& channel, Real y) {
  const std::vector<Real> g = channel.cond_central_moments(y, std::max(poly.max_index(), 2));
  return eval_gpoly<Real>(poly, std::span<const Real>(g));
}

template double eval_gpoly<double>(const GPoly&, std::span<const double>);
template long double eval_gpoly<long double>(const GPoly&, std::span<const long double>);
template double eval_gpoly<double>(const GPoly&, const Channel<double>&, double);
template long double eval_gpoly<long double>(const GPoly&, const Channel<long double>&, long double);

namespace {

long double iterated_central(const Channel<long double>& ch, long double y, int order, long double h) {
  // (1 / 2h)^k sum_j (-1)^j binom(k, j) f(y + (k - 2j) h)
  long double acc = 0, binom = 1;
  for (int j = 0; j <= order; ++j) {
    const long double term = binom * ch.cond_mean(y + (order - 2 * j) * h);
    acc += (j % 2 == 0) ? term : -term;
    binom = binom * (order - j) / (j + 1);
  }
  return acc / std::pow(2 * h, order);
}

}  // namespace

long double fd_derivative(const Channel<long double>& channel, long double y, int order) {
  if (order < 1) throw InvalidArgument("finite-difference order must be >= 1");
  const long double eps = std::numeric_limits<long double>::epsilon();
  const long double h = (std::fabs(y) + 1) * std::pow(eps, 1.0L / (order + 4));
  const long double coarse = iterated_central(channel, y, order, h);
  const long double fine = iterated_central(channel, y, order, h / 2);
  return (4 * fine - coarse) / 3;
}

int q_r(int r) {
  if (r < 2) throw InvalidArgument("r must be >= 2");
  int s = 0;
  while ((s + 1) * (s + 4) <= 2 * r) ++s;  // (s+1)^2 + 3(s+1) <= 2r
  return s;
}

double gamma_r(int r) {
  const int q = q_r(r);
  return std::exp(std::lgamma(2.0 * r * q + 1) / (4.0 * q));
}

double beta_r(int r) {
  const double t = (std::sqrt(6.0 * r + 7) - 1) / 3;
  return t * t * (t + 0.5);
}

namespace {

template <class Real>
double derivative_l2(const InputDist& dist, const GPoly& poly, int outer_order) {
  Channel<Real> ch(dist);
  const OutputRule<Real> rule = make_output_rule(ch, outer_order);
  return static_cast<double>(l2_norm(rule, [&](Real y) { return eval_gpoly(poly, ch, y); }));
}

}  // namespace

DerivBoundReport derivative_norm_bound(const InputDist& dist, int r, bool use_beta, const QuadConfig& cfg) {
  DerivBoundReport rep;
  rep.r = r;
  rep.q_r = q_r(r);
  rep.gamma_r = gamma_r(r);
  rep.norm_order = 2.0 * r * rep.q_r;
  rep.norm_x = static_cast<double>(norm_q(dist, rep.norm_order));
  const double cr = total_cyclic_count(r, TotalCountMethod::StirlingFormula).convert_to<double>();
  const double scale = std::ldexp(cr, r);
  const double moment_term = std::pow(rep.norm_x, r);
  if (!std::isfinite(moment_term)) throw InvalidArgument("||X||_" + std::to_string(rep.norm_order) + "^r overflows");
  rep.rhs = scale * std::min(rep.gamma_r, moment_term);

  const GPoly poly = closed_form_derivative(r);
  rep.lhs = cfg.precision == Precision::Extended ? derivative_l2<long double>(dist, poly, cfg.outer_order)
                                                 : derivative_l2<double>(dist, poly, cfg.outer_order);
  rep.holds = rep.lhs <= rep.rhs;

  if (use_beta) {
    const double b = beta_r(r);
    rep.beta_r = b;
    const double k = 2 * b;
    const double gamma_b = std::exp(std::lgamma(k + 1) * r / (2 * k));
    const double norm_b = std::pow(static_cast<double>(norm_q(dist, k)), r);
    rep.beta_rhs = scale * std::min(gamma_b, norm_b);
  }
  return rep;
}

}  // namespace mmse
