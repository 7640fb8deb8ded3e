#pragma once

#include <vector>

#include "mmse/dist.hpp"

namespace mmse {

// Quantities conditional on Y = X + N with N ~ N(0, 1) independent of X.
//
// For discrete supports (pmf atoms or the inner quadrature of a density) every
// conditional expectation is a ratio E[Z w] / E[w] of Gaussian-weighted sums,
// w = exp(-(X - y)^2 / 2). The weights are evaluated as
// exp(-(x - y)^2 / 2 + s(y)) with s(y) = min_x (x - y)^2 / 2, so the largest
// weight is exactly one and nothing underflows for |y| >> 1. Gaussian and
// constant inputs use closed forms.
//
// Read-only after construction; safe to share between threads.
template <class Real>
class Channel {
 public:
  explicit Channel(InputDist dist);

  const InputDist& dist() const { return dist_; }

  Real output_density(Real y) const;
  Real log_output_density(Real y) const;
  // f(y) = E[X | Y = y]
  Real cond_mean(Real y) const;
  // g_k(y) = E[(X - f(y))^k | Y = y]; g_0 = 1 and g_1 = 0 exactly.
  Real cond_central_moment(Real y, int k) const;
  // g_0 .. g_kmax in one pass, sharing f(y).
  std::vector<Real> cond_central_moments(Real y, int kmax) const;
  // y + p_Y'(y) / p_Y(y), p_Y' by differentiating under the expectation.
  Real tweedie(Real y) const;
  // Q'(y) = y - f(y) = E[N | Y = y], where p_Y = exp(-Q).
  Real q_prime(Real y) const;

  Real mean_y() const { return mean_y_; }
  Real std_y() const { return std_y_; }

 private:
  struct Weights {
    std::vector<Real> w;  // normalized posterior weights over xs_
    Real log_sum;         // log sum_i m_i exp(-(x_i - y)^2 / 2)
  };
  Weights posterior(Real y) const;

  InputDist dist_;
  DistKind kind_;
  std::vector<Real> xs_;
  std::vector<Real> log_ms_;
  Real mean_x_ = 0;
  Real var_x_ = 0;
  Real mean_y_ = 0;
  Real std_y_ = 1;
};

extern template class Channel<double>;
extern template class Channel<long double>;

}  // namespace mmse
