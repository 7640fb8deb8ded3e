#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmse/channel.hpp"
#include "mmse/partitions.hpp"
#include "mmse/quadrature.hpp"

namespace mmse {

// Integer combination of monomials g^lambda = prod_i g_i^{lambda_i} in the
// conditional central moments g_2, g_3, ... Zero coefficients are never
// stored.
class GPoly {
 public:
  using Terms = std::map<Partition, BigInt>;

  GPoly() = default;

  void add(const Partition& monomial, const BigInt& coeff);
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Common weighted degree of all monomials; nullopt when mixed or empty.
  std::optional<int> homogeneous_degree() const;
  BigInt abs_coeff_sum() const;
  int max_index() const;

  // "g4 - 3*g2^2"
  std::string to_string() const;

  bool operator==(const GPoly&) const = default;

 private:
  Terms terms_;
};

// f^{(r-1)} by r-2 symbolic differentiations of f' = g_2 with the product
// rule and g_i' = g_{i+1} - i g_2 g_{i-1} (g_1 = 0, g_0 = 1).
GPoly symbolic_derivative(int r);

// f^{(r-1)} = sum_{lambda in Pi_r} e_lambda g^lambda.
GPoly closed_form_derivative(int r);

// Evaluate with g[k] = g_k; g must cover every index the polynomial uses.
// Throws NumericFailure on overflow.
template <class Real>
Real eval_gpoly(const GPoly& poly, std::span<const Real> g);

template <class Real>
Real eval_gpoly(const GPoly& poly, const Channel<Real>& channel, Real y);

// (order)-th derivative of f(y) = E[X | Y = y] by iterated central
// differences with one Richardson step (h and h/2), in long double. The base
// step is h = (|y| + 1) eps^{1/(order + 4)}.
long double fd_derivative(const Channel<long double>& channel, long double y, int order);

// floor((sqrt(8r + 9) - 3) / 2), computed exactly.
int q_r(int r);
// ((2 r q_r)!)^{1 / (4 q_r)}
double gamma_r(int r);
// t^2 (t + 1/2) with t = (sqrt(6r + 7) - 1) / 3.
double beta_r(int r);

struct DerivBoundReport {
  int r = 0;
  int q_r = 0;
  double gamma_r = 0;
  double norm_order = 0;  // 2 r q_r
  double norm_x = 0;      // ||X||_{2 r q_r}
  double lhs = 0;         // ||f^{(r-1)}(Y)||_2
  double rhs = 0;         // 2^r C_r min(gamma_r, ||X||^r)
  bool holds = false;
  // Experimental refinement: 2 r q_r replaced by 2 beta_r.
  std::optional<double> beta_r;
  std::optional<double> beta_rhs;
};

DerivBoundReport derivative_norm_bound(const InputDist& dist, int r, bool use_beta, const QuadConfig& cfg = {});

}  // namespace mmse
