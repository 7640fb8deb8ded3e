#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmse {

enum class RuleKind { GaussHermite, GaussLegendre, Composite };

// Working precision for y-integrals and the approximation pipeline.
// Extended maps to the 80-bit x87 long double.
enum class Precision { Double, Extended };

std::string to_string(RuleKind kind);
std::string to_string(Precision p);
Precision parse_precision(std::string_view s);

// Precision named by MMSE_PRECISION, Double when unset.
Precision default_precision();

// A fixed rule sum_i w_i h(x_i). Immutable after construction.
//
// Gauss-Hermite rules are normalized against the standard normal density, so
// their weights sum to one. Gauss-Legendre and composite rules integrate
// against dx on their interval.
template <class Real>
struct QuadRule {
  RuleKind kind = RuleKind::GaussLegendre;
  int order = 0;
  std::vector<Real> nodes;
  std::vector<Real> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  Real integrate(F&& h) const {
    Real acc = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * h(nodes[i]);
    return acc;
  }
};

// Nodes come from the eigenvalues of the Jacobi matrix (Golub-Welsch),
// polished by Newton steps on the three-term recurrence. Weights use the
// Christoffel sum 1 / sum_k p_k(x)^2 of the orthonormal polynomials, which
// keeps tiny tail weights accurate in relative terms. Node and weight
// generation always runs in long double; for Real = double, tail nodes whose
// weight underflows are dropped.
template <class Real>
QuadRule<Real> gauss_hermite(int order);

template <class Real>
QuadRule<Real> gauss_legendre(int order, Real a, Real b);

// Gauss-Legendre of the given order on each panel [breaks[i], breaks[i+1]].
template <class Real>
QuadRule<Real> composite_legendre(int order, std::span<const Real> breaks);

struct QuadConfig {
  int outer_order = 200;
  int inner_order = 200;
  Precision precision = default_precision();
};

}  // namespace mmse
