#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "mmse/channel.hpp"
#include "mmse/errors.hpp"
#include "mmse/quadrature.hpp"

namespace mmse {

// Discrete rule for E[h(Y)]: a Gauss-Hermite rule recentered and rescaled to
// the mean and standard deviation of Y, with each weight multiplied by
// p_Y(y_i) / phi(y_i; mean, std). Var Y = Var X + 1 makes that ratio decay in
// both tails. For Gaussian input the ratio is identically one.
template <class Real>
struct OutputRule {
  int order = 0;
  Real mean = 0;
  Real stddev = 1;
  std::vector<Real> nodes;
  std::vector<Real> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  Real expect(F&& h) const {
    Real acc = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * h(nodes[i]);
    return acc;
  }
};

template <class Real>
OutputRule<Real> make_output_rule(const Channel<Real>& channel, int order);

// sqrt(sum_i w_i h(y_i)^2). Throws NumericFailure naming the first node where
// h is not finite.
template <class Real, class F>
Real l2_norm(const OutputRule<Real>& rule, F&& h) {
  Real acc = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Real v = h(rule.nodes[i]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "non-finite integrand value at node y=" << static_cast<double>(rule.nodes[i]) << " (index " << i << ")";
      throw NumericFailure(os.str());
    }
    acc += rule.weights[i] * v * v;
  }
  return std::sqrt(acc);
}

// ||h(Y)||_2 under P_Y, outer rule of order cfg.outer_order in the precision
// named by cfg (the function itself is evaluated in double).
double l2_norm_pY(const std::function<double(double)>& h, const InputDist& dist, const QuadConfig& cfg);

extern template OutputRule<double> make_output_rule<double>(const Channel<double>&, int);
extern template OutputRule<long double> make_output_rule<long double>(const Channel<long double>&, int);

}  // namespace mmse
