#include "mmse/approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmse/errors.hpp"

namespace mmse {

std::string to_string(ApproxMethod m) { return m == ApproxMethod::Hankel ? "hankel" : "orthogonal"; }

ApproxMethod parse_method(std::string_view s) {
  if (s == "hankel") return ApproxMethod::Hankel;
  if (s == "ortho" || s == "orthogonal") return ApproxMethod::Orthogonal;
  throw InvalidArgument("method must be 'hankel' or 'ortho', got '" + std::string(s) + "'");
}

namespace {

constexpr long double kReorthTol = 1e-10L;

template <class Real>
Real normal_moment(int j) {
  if (j % 2 == 1) return 0;
  Real acc = 1;
  for (int i = j - 1; i > 1; i -= 2) acc *= i;
  return acc;
}

template <class Real>
std::vector<Real> binomial_row(int k) {
  std::vector<Real> row(k + 1, 1);
  for (int j = 1; j < k; ++j) row[j] = row[j - 1] * (k - j + 1) / j;
  return row;
}

template <class Real>
Real horner(std::span<const Real> c, Real y) {
  Real acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + *it;
  return acc;
}

template <class Real>
Real dot(const std::vector<Real>& w, std::span<const Real> a, std::span<const Real> b) {
  Real acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * a[i] * b[i];
  return acc;
}

}  // namespace

template <class Real>
YMomentTable<Real> y_moments(const InputDist& dist, int max_k) {
  if (max_k < 0) throw InvalidArgument("max_k must be nonnegative");
  if (max_k > dist.moment_cap())
    throw InvalidArgument("y_moments order " + std::to_string(max_k) + " exceeds moment cap " + std::to_string(dist.moment_cap()));
  // The cross moments reach E[X^{max_k/2 + 1}], which exceeds max_k only for max_k < 2.
  const int need = std::max(max_k, max_k / 2 + 1);
  std::vector<Real> mx(need + 1);
  for (int k = 0; k <= need; ++k) mx[k] = static_cast<Real>(moment(dist, k));

  YMomentTable<Real> t;
  t.y.resize(max_k + 1);
  for (int k = 0; k <= max_k; ++k) {
    const auto b = binomial_row<Real>(k);
    Real acc = 0;
    for (int j = 0; j <= k; ++j) acc += b[j] * mx[j] * normal_moment<Real>(k - j);
    t.y[k] = acc;
  }
  const int max_cross = max_k / 2;
  t.cross.resize(max_cross + 1);
  for (int j = 0; j <= max_cross; ++j) {
    const auto b = binomial_row<Real>(j);
    Real acc = 0;
    for (int i = 0; i <= j; ++i) acc += b[i] * mx[i + 1] * normal_moment<Real>(j - i);
    t.cross[j] = acc;
  }
  return t;
}

template <class Real>
Projector<Real>::Projector(const InputDist& dist, const QuadConfig& cfg, int max_degree)
    : channel_(dist), cfg_(cfg), max_degree_(max_degree) {
  if (max_degree < 0) throw InvalidArgument("degree must be nonnegative");
  rule_ = make_output_rule(channel_, cfg.outer_order);
  if (static_cast<int>(rule_.size()) <= max_degree)
    throw InvalidArgument("outer rule has " + std::to_string(rule_.size()) + " nodes; need more than degree " +
                          std::to_string(max_degree));
  f_.resize(rule_.size());
  for (std::size_t i = 0; i < rule_.size(); ++i) f_[i] = channel_.cond_mean(rule_.nodes[i]);
  f_norm_ = std::sqrt(dot<Real>(rule_.weights, f_, f_));
  build_basis();
}

template <class Real>
void Projector<Real>::build_basis() {
  const std::size_t N = rule_.size();
  const auto& y = rule_.nodes;
  const auto& w = rule_.weights;

  Real mass = 0;
  for (Real wi : w) mass += wi;
  values_.assign(1, std::vector<Real>(N, 1 / std::sqrt(mass)));
  coeffs_.assign(1, std::vector<Real>{1 / std::sqrt(mass)});

  Real b_prev = 0;
  for (int k = 0; k < max_degree_; ++k) {
    const auto& pk = values_[k];
    Real alpha = 0;
    for (std::size_t i = 0; i < N; ++i) alpha += w[i] * y[i] * pk[i] * pk[i];

    std::vector<Real> u(N);
    for (std::size_t i = 0; i < N; ++i) u[i] = (y[i] - alpha) * pk[i] - (k > 0 ? b_prev * values_[k - 1][i] : 0);
    std::vector<Real> cu(k + 2, 0);
    for (int j = 0; j <= k; ++j) {
      cu[j + 1] += coeffs_[k][j];
      cu[j] -= alpha * coeffs_[k][j];
    }
    if (k > 0)
      for (int j = 0; j < k; ++j) cu[j] -= b_prev * coeffs_[k - 1][j];

    auto drift = [&]() {
      const Real norm = std::sqrt(dot<Real>(w, u, u));
      Real worst = 0;
      for (int j = 0; j <= k; ++j) worst = std::max(worst, std::fabs(dot<Real>(w, u, values_[j])) / norm);
      return worst;
    };
    for (int pass = 0; pass < 2 && drift() > kReorthTol; ++pass) {
      for (int j = 0; j <= k; ++j) {
        const Real proj = dot<Real>(w, u, values_[j]);
        for (std::size_t i = 0; i < N; ++i) u[i] -= proj * values_[j][i];
        for (int m = 0; m <= j; ++m) cu[m] -= proj * coeffs_[j][m];
      }
    }
    const Real residual_drift = drift();
    if (residual_drift > kReorthTol) {
      std::ostringstream os;
      os << "orthogonality lost at degree " << k + 1 << ": drift " << static_cast<double>(residual_drift);
      throw NumericFailure(os.str());
    }

    const Real b = std::sqrt(dot<Real>(w, u, u));
    if (!(b > 0) || !std::isfinite(b)) throw NumericFailure("Stieltjes recurrence broke down at degree " + std::to_string(k + 1));
    for (Real& v : u) v /= b;
    for (Real& c : cu) c /= b;
    values_.push_back(std::move(u));
    coeffs_.push_back(std::move(cu));
    b_prev = b;
  }

  defect_ = 0;
  for (int i = 0; i <= max_degree_; ++i)
    for (int j = 0; j <= i; ++j)
      defect_ = std::max(defect_, std::fabs(dot<Real>(w, values_[i], values_[j]) - (i == j ? 1 : 0)));

  fourier_.resize(max_degree_ + 1);
  for (int j = 0; j <= max_degree_; ++j) fourier_[j] = dot<Real>(w, f_, values_[j]);
}

template <class Real>
void Projector<Real>::check_degree(int n) const {
  if (n < 0 || n > max_degree_)
    throw InvalidArgument("degree " + std::to_string(n) + " outside projector range 0.." + std::to_string(max_degree_));
}

template <class Real>
std::vector<Real> Projector<Real>::approx_values(int n) const {
  check_degree(n);
  std::vector<Real> out(rule_.size(), 0);
  for (int j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += fourier_[j] * values_[j][i];
  return out;
}

template <class Real>
Real Projector<Real>::distance(std::span<const Real> coeffs) const {
  Real acc = 0;
  for (std::size_t i = 0; i < rule_.size(); ++i) {
    const Real d = horner(coeffs, rule_.nodes[i]) - f_[i];
    acc += rule_.weights[i] * d * d;
  }
  return std::sqrt(acc);
}

template <class Real>
PolyApproxResult Projector<Real>::orthogonal(int n) const {
  check_degree(n);
  PolyApproxResult res;
  res.n = n;
  res.method = ApproxMethod::Orthogonal;
  res.precision = cfg_.precision;
  res.orthogonality_defect = defect_;

  std::vector<Real> c(n + 1, 0);
  for (int j = 0; j <= n; ++j)
    for (int m = 0; m <= j; ++m) c[m] += fourier_[j] * coeffs_[j][m];
  res.coeffs.assign(c.begin(), c.end());

  const std::vector<Real> en = approx_values(n);
  Real acc = 0;
  for (std::size_t i = 0; i < en.size(); ++i) {
    const Real d = en[i] - f_[i];
    acc += rule_.weights[i] * d * d;
  }
  res.l2_error = std::sqrt(acc);
  return res;
}

template <class Real>
PolyApproxResult Projector<Real>::hankel(int n) const {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  const YMomentTable<Real> mom = y_moments<Real>(channel_.dist(), 2 * n);

  Mat H(n + 1, n + 1);
  Vec rhs(n + 1), scale(n + 1);
  for (int i = 0; i <= n; ++i) scale[i] = 1 / std::sqrt(mom.y[2 * i]);
  for (int i = 0; i <= n; ++i) {
    rhs[i] = scale[i] * mom.cross[i];
    for (int j = 0; j <= n; ++j) H(i, j) = scale[i] * mom.y[i + j] * scale[j];
  }

  Eigen::SelfAdjointEigenSolver<Mat> eig(H, Eigen::EigenvaluesOnly);
  const Real lo = eig.eigenvalues().minCoeff();
  const Real hi = eig.eigenvalues().maxCoeff();
  const Real cond = lo > 0 ? hi / lo : std::numeric_limits<Real>::infinity();
  const Real eps = std::numeric_limits<Real>::epsilon();
  if (!(cond * eps <= static_cast<Real>(kHankelBudget))) {
    std::ostringstream os;
    os << "Hankel moment matrix ill-conditioned at n=" << n << ": condition " << static_cast<double>(cond)
       << " exceeds the " << to_string(cfg_.precision) << " precision budget";
    throw IllConditioned(n, static_cast<double>(cond), os.str());
  }

  Eigen::LDLT<Mat> ldlt(H);
  Vec z = ldlt.solve(rhs);
  PolyApproxResult res;
  res.n = n;
  res.method = ApproxMethod::Hankel;
  res.precision = cfg_.precision;
  res.condition_estimate = cond;
  std::vector<Real> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = scale[i] * z[i];
  for (Real v : c)
    if (!std::isfinite(v)) throw NumericFailure("Hankel solve produced non-finite coefficients at n=" + std::to_string(n));
  res.coeffs.assign(c.begin(), c.end());
  res.l2_error = distance(c);
  return res;
}

template <class Real>
Real Projector<Real>::noise_floor() const {
  const std::vector<Real> p = approx_values(max_degree_);
  std::vector<Real> back(p.size(), 0);
  for (int j = 0; j <= max_degree_; ++j) {
    const Real cj = dot<Real>(rule_.weights, p, values_[j]);
    for (std::size_t i = 0; i < p.size(); ++i) back[i] += cj * values_[j][i];
  }
  Real acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Real d = back[i] - p[i];
    acc += rule_.weights[i] * d * d;
  }
  // Never report a floor below the working precision of ||f||.
  return std::max(std::sqrt(acc), std::numeric_limits<Real>::epsilon() * f_norm_);
}

template class Projector<double>;
template class Projector<long double>;
template YMomentTable<double> y_moments<double>(const InputDist&, int);
template YMomentTable<long double> y_moments<long double>(const InputDist&, int);

namespace {

template <class F>
auto with_precision(const QuadConfig& cfg, F&& body) {
  if (cfg.precision == Precision::Extended) return body(static_cast<long double*>(nullptr));
  return body(static_cast<double*>(nullptr));
}

}  // namespace

PolyApproxResult best_poly_hankel(const InputDist& dist, int n, const QuadConfig& cfg) {
  if (n < 0) throw InvalidArgument("degree must be nonnegative");
  return with_precision(cfg, [&]<class Real>(Real*) { return Projector<Real>(dist, cfg, n).hankel(n); });
}

PolyApproxResult best_poly_orthogonal(const InputDist& dist, int n, const QuadConfig& cfg) {
  if (n < 0) throw InvalidArgument("degree must be nonnegative");
  return with_precision(cfg, [&]<class Real>(Real*) { return Projector<Real>(dist, cfg, n).orthogonal(n); });
}

MseGapReport mse_gap(const InputDist& dist, int n, const QuadConfig& cfg) {
  if (n < 0) throw InvalidArgument("degree must be nonnegative");
  return with_precision(cfg, [&]<class Real>(Real*) {
    const Projector<Real> proj(dist, cfg, n);
    const auto& rule = proj.rule();
    const std::vector<Real> en = proj.approx_values(n);
    const auto f = proj.f_values();
    Real f_en = 0, en_en = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      f_en += rule.weights[i] * f[i] * en[i];
      en_en += rule.weights[i] * en[i] * en[i];
    }
    const Real ex2 = static_cast<Real>(moment(dist, 2));
    const Real f_sq = proj.f_norm() * proj.f_norm();

    MseGapReport rep;
    rep.n = n;
    rep.mse_poly = ex2 - 2 * f_en + en_en;
    rep.mmse = ex2 - f_sq;
    rep.gap = std::max<long double>(0, rep.mse_poly - rep.mmse);
    const long double err = proj.orthogonal(n).l2_error;
    rep.bound = 2 * std::sqrt(std::max<long double>(0, rep.mse_poly)) * err;
    const long double slack = 64 * std::numeric_limits<Real>::epsilon() * std::max<long double>(1, ex2);
    rep.bound_holds = rep.gap <= rep.bound + slack;
    return rep;
  });
}

std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0) return std::nullopt;
  return (m * sxy - sx * sy) / denom;
}

RateFitResult rate_fit(const InputDist& dist, std::vector<int> degrees, const QuadConfig& cfg) {
  if (degrees.empty()) throw InvalidArgument("rate_fit needs at least one degree");
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  if (degrees.front() < 0) throw InvalidArgument("degrees must be nonnegative");

  RateFitResult out;
  if (const ClassDReport d = in_class_D(dist); !d.member)
    out.warnings.push_back("input is outside the even/compact/non-increasing class (" + d.violated +
                           "); the decay guarantee does not apply");

  with_precision(cfg, [&]<class Real>(Real*) {
    const Projector<Real> proj(dist, cfg, degrees.back());
    out.noise_floor = proj.noise_floor();
    for (int n : degrees) {
      out.degrees.push_back(n);
      out.errors.push_back(proj.orthogonal(n).l2_error);
    }
    return 0;
  });

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.degrees.size(); ++i) {
    const bool above = out.errors[i] >= 10 * out.noise_floor;
    const bool usable = above && out.degrees[i] >= 1;
    out.used.push_back(usable);
    if (!above) {
      std::ostringstream os;
      os << "n=" << out.degrees[i] << ": error " << static_cast<double>(out.errors[i])
         << " below 10x noise floor; excluded from the fit";
      out.warnings.push_back(os.str());
    }
    if (usable) {
      xs.push_back(out.degrees[i]);
      ys.push_back(static_cast<double>(out.errors[i]));
    }
  }
  out.slope = loglog_slope(xs, ys);
  if (!out.slope) {
    std::size_t k = out.degrees.size();
    while (k > 0 && !out.used[k - 1]) --k;
    if (k < out.degrees.size() && out.errors.back() < 10 * out.noise_floor)
      out.note = "exact at n=" + std::to_string(out.degrees[k]);
  }
  return out;
}

}  // namespace mmse
