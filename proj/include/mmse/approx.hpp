#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmse/channel.hpp"
#include "mmse/output_rule.hpp"
#include "mmse/quadrature.hpp"

namespace mmse {

enum class ApproxMethod { Hankel, Orthogonal };

std::string to_string(ApproxMethod m);
ApproxMethod parse_method(std::string_view s);

// E[Y^k] for k = 0..max_k and E[X Y^j] for j = 0..max_k/2, from the moments
// of X through the binomial expansion of Y = X + N.
template <class Real>
struct YMomentTable {
  std::vector<Real> y;
  std::vector<Real> cross;
};

template <class Real>
YMomentTable<Real> y_moments(const InputDist& dist, int max_k);

struct PolyApproxResult {
  int n = 0;
  ApproxMethod method = ApproxMethod::Orthogonal;
  Precision precision = Precision::Double;
  std::vector<long double> coeffs;  // c_{n,0..n}: E_n(y) = sum_j c_j y^j
  long double l2_error = 0;         // ||E_n(Y) - E[X|Y]||_2
  // Hankel: 2-norm condition number of the diagonally scaled moment matrix.
  // Orthogonal: 1 (orthonormal basis).
  long double condition_estimate = 1;
  // Orthogonal only: max |<pi_i, pi_j> - delta_ij| after the recurrence.
  long double orthogonality_defect = 0;
};

// Hankel solves are refused once cond * eps exceeds this budget.
inline constexpr long double kHankelBudget = 1e-8L;

// Shared state for projecting f = E[X|Y] onto polynomials of degree
// <= max_degree under P_Y: the output rule, f at its nodes, and an orthonormal
// basis built by the Stieltjes (Lanczos) recurrence on that rule.
template <class Real>
class Projector {
 public:
  Projector(const InputDist& dist, const QuadConfig& cfg, int max_degree);

  int max_degree() const { return max_degree_; }
  const InputDist& dist() const { return channel_.dist(); }
  const Channel<Real>& channel() const { return channel_; }
  const OutputRule<Real>& rule() const { return rule_; }
  std::span<const Real> f_values() const { return f_; }
  // pi_j at the rule nodes and in the monomial basis.
  std::span<const Real> basis_values(int j) const { return values_.at(j); }
  std::span<const Real> basis_coeffs(int j) const { return coeffs_.at(j); }
  // <f, pi_j>
  Real fourier(int j) const { return fourier_.at(j); }
  Real f_norm() const { return f_norm_; }
  Real orthogonality_defect() const { return defect_; }

  PolyApproxResult orthogonal(int n) const;
  PolyApproxResult hankel(int n) const;

  // E_n at the rule nodes.
  std::vector<Real> approx_values(int n) const;
  // ||q(Y) - f(Y)||_2 for q given by monomial coefficients.
  Real distance(std::span<const Real> coeffs) const;
  // Residual left when E_{max_degree} is itself projected again; the
  // pipeline's self-consistency floor.
  Real noise_floor() const;

 private:
  void build_basis();
  void check_degree(int n) const;

  Channel<Real> channel_;
  QuadConfig cfg_;
  int max_degree_;
  OutputRule<Real> rule_;
  std::vector<Real> f_;
  std::vector<std::vector<Real>> values_;
  std::vector<std::vector<Real>> coeffs_;
  std::vector<Real> fourier_;
  Real f_norm_ = 0;
  Real defect_ = 0;
};

extern template class Projector<double>;
extern template class Projector<long double>;

// One-shot wrappers; precision from cfg.
PolyApproxResult best_poly_hankel(const InputDist& dist, int n, const QuadConfig& cfg = {});
PolyApproxResult best_poly_orthogonal(const InputDist& dist, int n, const QuadConfig& cfg = {});

struct MseGapReport {
  int n = 0;
  long double mse_poly = 0;  // ||X - E_n||_2^2
  long double mmse = 0;      // ||X - E[X|Y]||_2^2
  long double gap = 0;       // mse_poly - mmse, clamped at 0
  long double bound = 0;     // 2 ||X - E_n||_2 ||E_n - E[X|Y]||_2
  bool bound_holds = false;
};

MseGapReport mse_gap(const InputDist& dist, int n, const QuadConfig& cfg = {});

struct RateFitResult {
  std::vector<int> degrees;
  std::vector<long double> errors;
  std::vector<bool> used;  // entered the log-log fit
  long double noise_floor = 0;
  std::optional<double> slope;
  // Set when every degree from some n on sits at the floor: "exact at n=..".
  std::optional<std::string> note;
  std::vector<std::string> warnings;
};

// Least-squares slope of log(error) against log(n) over the degrees whose
// error clears 10x the noise floor.
RateFitResult rate_fit(const InputDist& dist, std::vector<int> degrees, const QuadConfig& cfg = {});

// Least-squares slope of log y against log x.
std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mmse
