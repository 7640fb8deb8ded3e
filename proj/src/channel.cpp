#include "mmse/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmse/errors.hpp"

namespace mmse {

namespace {

template <class Real>
Real log_sqrt_2pi() {
  return std::log(2 * std::numbers::pi_v<Real>) / 2;
}

template <class Real>
Real odd_double_factorial(int k) {  // (k - 1)!! for even k
  Real acc = 1;
  for (int i = k - 1; i > 1; i -= 2) acc *= i;
  return acc;
}

}  // namespace

template <class Real>
Channel<Real>::Channel(InputDist dist) : dist_(std::move(dist)), kind_(dist_.kind()) {
  if (kind_ == DistKind::Gaussian) {
    const auto& g = std::get<Gaussian>(dist_.variant());
    mean_x_ = static_cast<Real>(g.mean);
    var_x_ = static_cast<Real>(g.var);
  } else {
    const auto& support = dist_.discrete_support();
    xs_.reserve(support.size());
    log_ms_.reserve(support.size());
    long double m1 = 0, m2 = 0;
    for (const Atom& a : support) {
      xs_.push_back(static_cast<Real>(a.x));
      log_ms_.push_back(static_cast<Real>(std::log(a.mass)));
      m1 += a.mass * a.x;
      m2 += a.mass * a.x * a.x;
    }
    mean_x_ = static_cast<Real>(m1);
    var_x_ = static_cast<Real>(std::max<long double>(0, m2 - m1 * m1));
  }
  mean_y_ = mean_x_;
  std_y_ = std::sqrt(var_x_ + 1);
}

template <class Real>
typename Channel<Real>::Weights Channel<Real>::posterior(Real y) const {
  // xs_ is sorted, so the nearest support point sets the shift.
  auto it = std::lower_bound(xs_.begin(), xs_.end(), y);
  Real nearest = std::numeric_limits<Real>::infinity();
  if (it != xs_.end()) nearest = std::min(nearest, std::fabs(*it - y));
  if (it != xs_.begin()) nearest = std::min(nearest, std::fabs(*std::prev(it) - y));
  const Real shift = nearest * nearest / 2;

  Weights out;
  out.w.resize(xs_.size());
  Real total = 0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const Real d = xs_[i] - y;
    out.w[i] = std::exp(log_ms_[i] - d * d / 2 + shift);
    total += out.w[i];
  }
  for (Real& w : out.w) w /= total;
  out.log_sum = std::log(total) - shift;
  return out;
}

template <class Real>
Real Channel<Real>::log_output_density(Real y) const {
  switch (kind_) {
    case DistKind::Gaussian: {
      const Real v = var_x_ + 1;
      const Real d = y - mean_x_;
      return -d * d / (2 * v) - std::log(v) / 2 - log_sqrt_2pi<Real>();
    }
    case DistKind::Constant: {
      const Real d = y - mean_x_;
      return -d * d / 2 - log_sqrt_2pi<Real>();
    }
    default:
      return posterior(y).log_sum - log_sqrt_2pi<Real>();
  }
}

template <class Real>
Real Channel<Real>::output_density(Real y) const {
  return std::exp(log_output_density(y));
}

template <class Real>
Real Channel<Real>::cond_mean(Real y) const {
  switch (kind_) {
    case DistKind::Gaussian: return mean_x_ + var_x_ / (var_x_ + 1) * (y - mean_x_);
    case DistKind::Constant: return mean_x_;
    default: {
      Weights p = posterior(y);
      Real f = 0;
      for (std::size_t i = 0; i < xs_.size(); ++i) f += p.w[i] * xs_[i];
      return f;
    }
  }
}

template <class Real>
std::vector<Real> Channel<Real>::cond_central_moments(Real y, int kmax) const {
  if (kmax < 0) throw InvalidArgument("central moment order must be nonnegative");
  std::vector<Real> g(kmax + 1, 0);
  g[0] = 1;
  if (kind_ == DistKind::Constant) return g;
  if (kind_ == DistKind::Gaussian) {
    // Posterior is N(f(y), s2 / (s2 + 1)).
    const Real v = var_x_ / (var_x_ + 1);
    for (int k = 2; k <= kmax; k += 2) g[k] = std::pow(v, k / 2) * odd_double_factorial<Real>(k);
    return g;
  }
  Weights p = posterior(y);
  Real f = 0;
  for (std::size_t i = 0; i < xs_.size(); ++i) f += p.w[i] * xs_[i];
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const Real d = xs_[i] - f;
    Real pw = p.w[i] * d;
    for (int k = 2; k <= kmax; ++k) {
      pw *= d;
      g[k] += pw;
    }
  }
  return g;
}

template <class Real>
Real Channel<Real>::cond_central_moment(Real y, int k) const {
  if (k < 0) throw InvalidArgument("central moment order must be nonnegative");
  if (k == 0) return 1;
  if (k == 1) return 0;
  return cond_central_moments(y, k)[k];
}

template <class Real>
Real Channel<Real>::tweedie(Real y) const {
  switch (kind_) {
    case DistKind::Gaussian: return y - (y - mean_x_) / (var_x_ + 1);
    case DistKind::Constant: return y - (y - mean_x_);
    default: {
      Weights p = posterior(y);
      Real score = 0;  // p_Y'(y) / p_Y(y) = E[(X - y) w] / E[w]
      for (std::size_t i = 0; i < xs_.size(); ++i) score += p.w[i] * (xs_[i] - y);
      return y + score;
    }
  }
}

template <class Real>
Real Channel<Real>::q_prime(Real y) const {
  return y - cond_mean(y);
}

template class Channel<double>;
template class Channel<long double>;

}  // namespace mmse
