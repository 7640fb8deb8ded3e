#include "mmse/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

#include "mmse/errors.hpp"

namespace mmse {

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::GaussHermite: return "gauss-hermite";
    case RuleKind::GaussLegendre: return "gauss-legendre";
    case RuleKind::Composite: return "composite";
  }
  return "unknown";
}

std::string to_string(Precision p) {
  return p == Precision::Extended ? "extended" : "double";
}

Precision parse_precision(std::string_view s) {
  if (s == "double") return Precision::Double;
  if (s == "extended") return Precision::Extended;
  throw InvalidArgument("precision must be 'double' or 'extended', got '" + std::string(s) + "'");
}

Precision default_precision() {
  const char* env = std::getenv("MMSE_PRECISION");
  if (env == nullptr || *env == '\0') return Precision::Double;
  return parse_precision(env);
}

namespace {

using LD = long double;

constexpr int kMaxOrder = 4000;

// Orthonormal recurrence with diagonal `alpha` and off-diagonal `beta`, where
// beta[k] couples p_{k-1} and p_k (beta[0] unused):
//   beta[k+1] p_{k+1} = (x - alpha[k]) p_k - beta[k] p_{k-1}
struct Jacobi {
  std::vector<LD> alpha;
  std::vector<LD> beta;
  LD mass;  // total mass of the underlying measure
};

struct RecurrenceEval {
  LD value;       // p_m(x) * beta[m], unnormalized last step
  LD derivative;  // its derivative
  LD sum_sq;      // sum_{k<m} p_k(x)^2
};

RecurrenceEval evaluate(const Jacobi& J, LD x) {
  const int m = static_cast<int>(J.alpha.size());
  LD p_prev = 0, p = 1;  // p_{-1}, p_0 (orthonormal w.r.t. unit mass)
  LD d_prev = 0, d = 0;
  LD sum_sq = 1;
  for (int k = 0; k < m; ++k) {
    LD next = (x - J.alpha[k]) * p - (k > 0 ? J.beta[k] * p_prev : 0);
    LD dnext = p + (x - J.alpha[k]) * d - (k > 0 ? J.beta[k] * d_prev : 0);
    if (k + 1 < m) {
      next /= J.beta[k + 1];
      dnext /= J.beta[k + 1];
      sum_sq += next * next;
    }
    p_prev = p;
    p = next;
    d_prev = d;
    d = dnext;
  }
  return {p, d, sum_sq};
}

struct RawRule {
  std::vector<LD> nodes;
  std::vector<LD> weights;
};

RawRule golub_welsch(const Jacobi& J, bool symmetric) {
  const int m = static_cast<int>(J.alpha.size());
  using Vec = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  Vec diag(m), off(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) diag[k] = J.alpha[k];
  for (int k = 1; k < m; ++k) off[k - 1] = J.beta[k];

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericFailure("Golub-Welsch eigen-decomposition did not converge");

  RawRule rule;
  rule.nodes.resize(m);
  for (int i = 0; i < m; ++i) rule.nodes[i] = solver.eigenvalues()[i];

  for (LD& x : rule.nodes) {
    for (int it = 0; it < 3; ++it) {
      RecurrenceEval e = evaluate(J, x);
      if (e.derivative == 0 || !std::isfinite(e.value / e.derivative)) break;
      LD step = e.value / e.derivative;
      x -= step;
      if (std::fabs(step) <= std::numeric_limits<LD>::epsilon() * (1 + std::fabs(x))) break;
    }
  }
  std::sort(rule.nodes.begin(), rule.nodes.end());
  if (symmetric) {
    for (int i = 0; i < m / 2; ++i) {
      LD half = (rule.nodes[m - 1 - i] - rule.nodes[i]) / 2;
      rule.nodes[i] = -half;
      rule.nodes[m - 1 - i] = half;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0;
  }

  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) rule.weights[i] = J.mass / evaluate(J, rule.nodes[i]).sum_sq;
  if (symmetric) {
    for (int i = 0; i < m / 2; ++i) {
      LD w = (rule.weights[i] + rule.weights[m - 1 - i]) / 2;
      rule.weights[i] = rule.weights[m - 1 - i] = w;
    }
  }
  return rule;
}

template <class Real>
QuadRule<Real> finish(RuleKind kind, int order, const RawRule& raw, LD shift, LD scale) {
  QuadRule<Real> rule;
  rule.kind = kind;
  rule.order = order;
  rule.nodes.reserve(raw.nodes.size());
  rule.weights.reserve(raw.nodes.size());
  for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
    Real w = static_cast<Real>(raw.weights[i] * scale);
    if (!(w > 0)) continue;  // underflow in the target type
    rule.nodes.push_back(static_cast<Real>(shift + scale * raw.nodes[i]));
    rule.weights.push_back(w);
  }
  return rule;
}

void check_order(int order) {
  if (order < 1) throw InvalidArgument("quadrature order must be >= 1, got " + std::to_string(order));
  if (order > kMaxOrder) throw InvalidArgument("quadrature order above " + std::to_string(kMaxOrder));
}

const RawRule& legendre_reference(int order) {
  // Rules are recomputed often (every density, every panel); memoize the
  // reference rule on [-1, 1] per order.
  thread_local std::map<int, RawRule> cache;
  if (auto it = cache.find(order); it != cache.end()) return it->second;
  Jacobi J;
  J.alpha.assign(order, 0);
  J.beta.assign(order, 0);
  for (int k = 1; k < order; ++k) J.beta[k] = k / std::sqrt(4.0L * k * k - 1);
  J.mass = 2;
  return cache.emplace(order, golub_welsch(J, true)).first->second;
}

}  // namespace

template <class Real>
QuadRule<Real> gauss_hermite(int order) {
  check_order(order);
  Jacobi J;
  J.alpha.assign(order, 0);
  J.beta.assign(order, 0);
  for (int k = 1; k < order; ++k) J.beta[k] = std::sqrt(static_cast<LD>(k));
  J.mass = 1;
  return finish<Real>(RuleKind::GaussHermite, order, golub_welsch(J, true), 0, 1);
}

template <class Real>
QuadRule<Real> gauss_legendre(int order, Real a, Real b) {
  check_order(order);
  if (!(a < b)) throw InvalidArgument("gauss_legendre requires a < b");
  const LD half = (static_cast<LD>(b) - static_cast<LD>(a)) / 2;
  const LD mid = (static_cast<LD>(a) + static_cast<LD>(b)) / 2;
  return finish<Real>(RuleKind::GaussLegendre, order, legendre_reference(order), mid, half);
}

template <class Real>
QuadRule<Real> composite_legendre(int order, std::span<const Real> breaks) {
  check_order(order);
  if (breaks.size() < 2) throw InvalidArgument("composite rule needs at least two breakpoints");
  QuadRule<Real> out;
  out.kind = RuleKind::Composite;
  out.order = order;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    QuadRule<Real> panel = gauss_legendre<Real>(order, breaks[p], breaks[p + 1]);
    out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return out;
}

template QuadRule<double> gauss_hermite<double>(int);
template QuadRule<long double> gauss_hermite<long double>(int);
template QuadRule<double> gauss_legendre<double>(int, double, double);
template QuadRule<long double> gauss_legendre<long double>(int, long double, long double);
template QuadRule<double> composite_legendre<double>(int, std::span<const double>);
template QuadRule<long double> composite_legendre<long double>(int, std::span<const long double>);

}  // namespace mmse
