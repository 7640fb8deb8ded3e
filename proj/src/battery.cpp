#include "mmse/battery.hpp"

#include <cmath>
#include <fmt/format.h>

#include "mmse/approx.hpp"
#include "mmse/channel.hpp"
#include "mmse/derivs.hpp"
#include "mmse/errors.hpp"
#include "mmse/freud.hpp"
#include "mmse/grid.hpp"
#include "mmse/partitions.hpp"

namespace mmse {

Fault parse_fault(std::string_view name) {
  if (name == "corrupt-e") return Fault::CorruptSignedCount;
  if (name == "skew-quadrature") return Fault::SkewQuadrature;
  throw InvalidArgument("unknown fault '" + std::string(name) + "'");
}

namespace {

using Check = std::function<std::string()>;  // throws on failure, returns detail

struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

class Runner {
 public:
  explicit Runner(const BatteryOptions& opts) : opts_(opts) {}

  void run(const std::string& module, const std::string& name, const Check& body) {
    CheckResult r{module, name, false, ""};
    try {
      r.detail = body();
      r.passed = true;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    if (opts_.on_result) opts_.on_result(r);
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const BatteryOptions& opts_;
  std::vector<CheckResult> results_;
};

long double double_factorial_odd(int k) {  // (k-1)!! for even k
  long double acc = 1;
  for (int i = k - 1; i > 1; i -= 2) acc *= i;
  return acc;
}

GPoly closed_form_with_faults(int r, const std::set<Fault>& faults) {
  GPoly p = closed_form_derivative(r);
  if (faults.count(Fault::CorruptSignedCount) && r == 6) p.add(enumerate_partitions(r).front(), 1);
  return p;
}

void quadrature_checks(Runner& run, const BatteryOptions& opts) {
  run.run("quadrature", "Gauss-Hermite even moments equal (k-1)!!", [&] {
    auto rule = gauss_hermite<long double>(opts.cfg.outer_order);
    if (opts.faults.count(Fault::SkewQuadrature)) rule.weights[rule.size() / 2] *= 1.001L;
    long double worst = 0;
    for (int k = 0; k <= 20; k += 2) {
      const long double m = rule.integrate([&](long double z) { return std::pow(z, k); });
      worst = std::max(worst, std::fabs(m / double_factorial_odd(k) - 1));
    }
    require(worst < 1e-14L, fmt::format("max relative moment error {:.3g}", static_cast<double>(worst)));
    return fmt::format("max relative error {:.2g}", static_cast<double>(worst));
  });
  run.run("quadrature", "Gauss-Legendre integrates degree 2n-1 exactly", [&] {
    const auto rule = gauss_legendre<long double>(32, -1, 3);
    long double worst = 0;
    for (int k = 0; k < 64; ++k) {
      const long double exact = (std::pow(3.0L, k + 1) - std::pow(-1.0L, k + 1)) / (k + 1);
      const long double got = rule.integrate([&](long double x) { return std::pow(x, k); });
      worst = std::max(worst, std::fabs(got / exact - 1));
    }
    require(worst < 1e-15L, fmt::format("max relative error {:.3g}", static_cast<double>(worst)));
    return fmt::format("max relative error {:.2g}", static_cast<double>(worst));
  });
}

void dist_checks(Runner& run) {
  run.run("dist", "uniform moments are 1/(k+1)", [&] {
    const InputDist u = InputDist::uniform(1);
    for (int k = 0; k <= 40; k += 2)
      require(std::fabs(moment(u, k) - 1.0L / (k + 1)) < 1e-15L, fmt::format("E[X^{}] wrong", k));
    return std::string("k = 0..40");
  });
  run.run("dist", "class membership of the built-in families", [&] {
    for (const auto& nd : class_D_family()) require(in_class_D(nd.dist).member, nd.name + " should be in the class");
    for (const auto& nd : non_class_D_family()) require(!in_class_D(nd.dist).member, nd.name + " should be outside");
    return std::string("4 members, 2 non-members");
  });
}

void channel_checks(Runner& run) {
  const Grid grid = Grid::make(-5, 5, 101);
  run.run("channel", "two-point f = tanh, g2 = sech^2", [&] {
    const Channel<long double> ch(InputDist::two_point(1));
    for (long double y : grid.points()) {
      require(std::fabs(ch.cond_mean(y) - std::tanh(y)) < 1e-15L, fmt::format("f({})", static_cast<double>(y)));
      const long double s = 1 / std::cosh(y);
      require(std::fabs(ch.cond_central_moment(y, 2) - s * s) < 1e-15L, fmt::format("g2({})", static_cast<double>(y)));
    }
    return std::string("101 points on [-5, 5]");
  });
  run.run("channel", "Tweedie identity and Q' envelope", [&] {
    for (const auto& nd : class_D_family()) {
      const Channel<long double> ch(nd.dist);
      for (long double y : grid.points())
        require(std::fabs(ch.tweedie(y) - ch.cond_mean(y)) <= 1e-8L, nd.name + ": tweedie differs from f");
      require(qprime_envelope_check(nd.dist, grid).holds, nd.name + ": envelope violated");
    }
    return std::string("class family, 101 points");
  });
  run.run("channel", "Gaussian posterior variance sigma^2/(sigma^2+1)", [&] {
    const Channel<long double> ch(InputDist::gaussian(0, 3));
    for (long double y : grid.points()) {
      require(std::fabs(ch.cond_mean(y) - 0.75L * y) < 1e-15L, "posterior mean");
      require(std::fabs(ch.cond_central_moment(y, 2) - 0.75L) < 1e-15L, "posterior variance");
    }
    return std::string("sigma^2 = 3");
  });
}

void partition_checks(Runner& run) {
  run.run("partitions", "C_r by Stirling numbers equals the sum of c_lambda", [&] {
    const int known[] = {1, 1, 4, 11, 56, 267};
    for (int r = 2; r <= 16; ++r) {
      const BigInt a = total_cyclic_count(r, TotalCountMethod::StirlingFormula);
      const BigInt b = total_cyclic_count(r, TotalCountMethod::SumOfCyclicCounts);
      require(a == b, fmt::format("r = {}: {} vs {}", r, a.str(), b.str()));
      if (r <= 7) require(a == known[r - 2], fmt::format("C_{} = {}", r, a.str()));
      require(a < boost::multiprecision::pow(BigInt(r), r), fmt::format("C_{} >= r^r", r));
    }
    return std::string("r = 2..16");
  });
  run.run("partitions", "transition worked example on (0,5,0,1)", [&] {
    const Partition lam({0, 5, 0, 1});
    const auto plus = tau_plus(lam);
    const auto minus = tau_minus(lam);
    require(plus.size() == 2 && plus[0].target == Partition({0, 4, 1, 1}) && plus[0].coeff == 5 &&
                plus[1].target == Partition({0, 5, 0, 0, 1}) && plus[1].coeff == 1,
            "tau+ mismatch");
    require(minus.size() == 2 && minus[0].target == Partition({2, 4, 0, 1}) && minus[0].coeff == 15 &&
                minus[1].target == Partition({1, 5, 1}) && minus[1].coeff == 5,
            "tau- mismatch");
    return std::string("coefficients 5, 1, 15, 5");
  });
}

void deriv_checks(Runner& run, const BatteryOptions& opts) {
  run.run("derivs", "symbolic = closed form = recurrence, r <= 12", [&] {
    for (int r = 2; r <= 12; ++r) {
      const GPoly sym = symbolic_derivative(r);
      const GPoly closed = closed_form_with_faults(r, opts.faults);
      require(sym == closed, fmt::format("r = {}: symbolic and closed form differ", r));
      GPoly rec;
      for (const auto& [p, c] : recurrence_coeffs(r)) rec.add(p, c);
      require(rec == closed, fmt::format("r = {}: recurrence and closed form differ", r));
      require(closed.homogeneous_degree() == r, fmt::format("r = {}: not homogeneous", r));
    }
    return std::string("r = 2..12");
  });
  run.run("derivs", "q_r = 1,1,1,2,2,2", [&] {
    const int want[] = {1, 1, 1, 2, 2, 2};
    for (int r = 2; r <= 7; ++r) require(q_r(r) == want[r - 2], fmt::format("q_{} = {}", r, q_r(r)));
    return std::string("r = 2..7");
  });
  run.run("derivs", "closed form matches finite differences", [&] {
    long double worst = 0;
    for (const auto& d : {InputDist::two_point(1), InputDist::uniform(1)}) {
      const Channel<long double> ch(d);
      for (int r = 2; r <= 5; ++r) {
        const GPoly p = closed_form_with_faults(r, opts.faults);
        for (int y = -2; y <= 2; ++y)
          worst = std::max(worst, std::fabs(eval_gpoly(p, ch, static_cast<long double>(y)) - fd_derivative(ch, y, r - 1)));
      }
    }
    require(worst <= 1e-5L, fmt::format("max deviation {:.3g}", static_cast<double>(worst)));
    return fmt::format("max deviation {:.2g}", static_cast<double>(worst));
  });
  run.run("derivs", "derivative norm bound, r = 2..6", [&] {
    double tightest = 0;
    for (const auto& nd : class_D_family())
      for (int r = 2; r <= 6; ++r) {
        const DerivBoundReport rep = derivative_norm_bound(nd.dist, r, false, opts.cfg);
        require(rep.holds, fmt::format("{} r = {}: {} > {}", nd.name, r, rep.lhs, rep.rhs));
        tightest = std::max(tightest, rep.lhs / rep.rhs);
      }
    return fmt::format("largest lhs/rhs {:.3g}", tightest);
  });
}

void approx_checks(Runner& run, const BatteryOptions& opts) {
  QuadConfig ext = opts.cfg;
  ext.precision = Precision::Extended;
  run.run("approx", "Gaussian input is exactly linear", [&] {
    const PolyApproxResult r = best_poly_orthogonal(InputDist::gaussian(0, 1), 1, ext);
    require(r.l2_error <= 1e-10L, "error too large");
    require(std::fabs(r.coeffs[0]) < 1e-8L && std::fabs(r.coeffs[1] - 0.5L) < 1e-8L, "coefficients not (0, 1/2)");
    const PolyApproxResult c = best_poly_orthogonal(InputDist::constant(0.5L), 0, ext);
    require(c.l2_error <= 1e-15L, "constant input not exact at n = 0");
    return fmt::format("error {:.2g}", static_cast<double>(r.l2_error));
  });
  run.run("approx", "Hankel and orthogonal coefficients agree, n <= 10", [&] {
    long double worst = 0;
    for (const auto& nd : class_D_family()) {
      const Projector<long double> proj(nd.dist, ext, 10);
      for (int n = 0; n <= 10; ++n) {
        const auto h = proj.hankel(n), o = proj.orthogonal(n);
        for (int j = 0; j <= n; ++j) worst = std::max(worst, std::fabs(h.coeffs[j] - o.coeffs[j]));
      }
    }
    require(worst <= 1e-6L, fmt::format("max coefficient gap {:.3g}", static_cast<double>(worst)));
    return fmt::format("max coefficient gap {:.2g}", static_cast<double>(worst));
  });
  run.run("approx", "non-polynomial estimators stay above the noise floor", [&] {
    for (const auto& d : {InputDist::two_point(1), InputDist::uniform(1)}) {
      const Projector<long double> proj(d, ext, 12);
      const long double floor = proj.noise_floor();
      for (int n = 0; n <= 12; ++n)
        require(proj.orthogonal(n).l2_error > 1e3L * floor, fmt::format("{} n = {}", d.label(), n));
    }
    return std::string("n = 0..12");
  });
  run.run("approx", "uniform errors decrease with slope <= -2", [&] {
    std::vector<int> ns;
    for (int n = 4; n <= 24; n += 2) ns.push_back(n);
    const RateFitResult fit = rate_fit(InputDist::uniform(1), ns, ext);
    for (std::size_t i = 1; i < fit.errors.size(); ++i)
      require(fit.errors[i] < fit.errors[i - 1], fmt::format("not decreasing at n = {}", fit.degrees[i]));
    require(fit.slope && *fit.slope <= -2, "slope above -2");
    return fmt::format("slope {:.3f}", *fit.slope);
  });
  run.run("approx", "MSE gap within 2 ||X - E_n|| ||E_n - f||", [&] {
    for (const auto& nd : class_D_family())
      for (int n : {1, 3, 5, 9}) require(mse_gap(nd.dist, n, ext).bound_holds, fmt::format("{} n = {}", nd.name, n));
    return std::string("n = 1, 3, 5, 9");
  });
}

void freud_checks(Runner& run) {
  const Grid grid = Grid::make(-10, 10, 201);
  run.run("freud", "class members give Freud weights", [&] {
    for (const auto& nd : class_D_family()) require(check_freud(nd.dist, grid).pass(), nd.name);
    require(check_freud(InputDist::constant(0), grid).pass(), "constant");
    return std::string("4 members and constant 0");
  });
  run.run("freud", "shifted uniform breaks evenness", [&] {
    const FreudReport rep = check_freud(InputDist::uniform(1, 1), grid);
    require(rep.conditions.at(0).verdict == Verdict::Fail && rep.conditions.at(0).witness, "evenness not flagged");
    return fmt::format("witness y = {:.3g}", static_cast<double>(*rep.conditions.at(0).witness));
  });
  run.run("freud", "MRS number of y^2 is sqrt(n)", [&] {
    long double worst = 0;
    for (int n = 1; n <= 100; ++n) {
      const MrsResult m = mrs_number([](long double y) { return 2 * y; }, n);
      worst = std::max(worst, std::fabs(m.a_n / std::sqrt(static_cast<long double>(n)) - 1));
    }
    require(worst <= 1e-8L, fmt::format("max relative error {:.3g}", static_cast<double>(worst)));
    return fmt::format("max relative error {:.2g}", static_cast<double>(worst));
  });
  run.run("freud", "MRS numbers increase and obey (2M + sqrt 2) sqrt n", [&] {
    for (const auto& nd : class_D_family()) {
      const Channel<long double> ch(nd.dist);
      const auto qp = [&](long double y) { return ch.q_prime(y); };
      long double prev = 0;
      for (int n = 1; n <= 100; ++n) {
        const long double a = mrs_number(qp, n).a_n;
        require(a > prev, fmt::format("{}: a_{} not increasing", nd.name, n));
        require(a <= mrs_upper_bound(nd.dist.support_bound(), n), fmt::format("{}: a_{} above bound", nd.name, n));
        prev = a;
      }
    }
    return std::string("n = 1..100");
  });
}

}  // namespace

std::vector<CheckResult> run_battery(const BatteryOptions& opts) {
  Runner run(opts);
  quadrature_checks(run, opts);
  dist_checks(run);
  channel_checks(run);
  partition_checks(run);
  deriv_checks(run, opts);
  approx_checks(run, opts);
  freud_checks(run);
  return run.take();
}

}  // namespace mmse
