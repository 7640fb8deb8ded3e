#include "mmse/output_rule.hpp"

#include <numbers>

namespace mmse {

template <class Real>
OutputRule<Real> make_output_rule(const Channel<Real>& channel, int order) {
  // Standard-normal Hermite nodes are generated in long double; importance
  // ratios are taken in log space before the final exp.
  const QuadRule<long double> base = gauss_hermite<long double>(order);
  const Real mu = channel.mean_y();
  const Real sd = channel.std_y();
  const long double log_norm = std::log(static_cast<long double>(sd)) + std::log(2 * std::numbers::pi_v<long double>) / 2;

  OutputRule<Real> rule;
  rule.order = order;
  rule.mean = mu;
  rule.stddev = sd;
  rule.nodes.reserve(base.size());
  rule.weights.reserve(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const long double t = base.nodes[i];
    const Real y = static_cast<Real>(mu + sd * t);
    const long double log_phi = -t * t / 2 - log_norm;
    const long double log_ratio = static_cast<long double>(channel.log_output_density(y)) - log_phi;
    const Real w = static_cast<Real>(base.weights[i] * std::exp(log_ratio));
    if (!(w > 0)) continue;
    rule.nodes.push_back(y);
    rule.weights.push_back(w);
  }
  return rule;
}

double l2_norm_pY(const std::function<double(double)>& h, const InputDist& dist, const QuadConfig& cfg) {
  if (cfg.precision == Precision::Extended) {
    Channel<long double> ch(dist);
    auto rule = make_output_rule(ch, cfg.outer_order);
    return static_cast<double>(l2_norm(rule, [&](long double y) { return static_cast<long double>(h(static_cast<double>(y))); }));
  }
  Channel<double> ch(dist);
  auto rule = make_output_rule(ch, cfg.outer_order);
  return l2_norm(rule, h);
}

template OutputRule<double> make_output_rule<double>(const Channel<double>&, int);
template OutputRule<long double> make_output_rule<long double>(const Channel<long double>&, int);

}  // namespace mmse
