#include "mmse/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "mmse/approx.hpp"
#include "mmse/battery.hpp"
#include "mmse/channel.hpp"
#include "mmse/derivs.hpp"
#include "mmse/errors.hpp"
#include "mmse/freud.hpp"
#include "mmse/grid.hpp"
#include "mmse/partitions.hpp"

namespace mmse {

namespace {

using Json = nlohmann::ordered_json;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string dist = "uniform";
  int outer_order = 200;
  int inner_order = 200;
  std::string precision;
  std::string format;
  std::string output;
  int moment_cap = 0;
  bool quiet = false;
};

std::string num(long double v) { return fmt::format("{:.17g}", v == 0 ? 0.0 : static_cast<double>(v)); }

Json jnum(long double v) {
  const double d = v == 0 ? 0.0 : static_cast<double>(v);
  return std::isfinite(d) ? Json(d) : Json(nullptr);
}

std::vector<int> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw Usage(fmt::format("{}: '{}' is not an integer", flag, item));
    if (!out.empty() && v <= out.back()) throw Usage(fmt::format("{}: list must be strictly increasing", flag));
    out.push_back(v);
  }
  if (out.empty()) throw Usage(flag + ": empty list");
  return out;
}

class Session {
 public:
  Session(const Common& c, std::ostream& err) : common_(c), err_(err) {}

  QuadConfig cfg() const {
    QuadConfig q;
    q.outer_order = common_.outer_order;
    q.inner_order = common_.inner_order;
    q.precision = common_.precision.empty() ? default_precision() : parse_precision(common_.precision);
    return q;
  }

  InputDist dist() const {
    InputDist d = load_dist(common_.dist);
    if (common_.inner_order != 200) d = d.with_inner_order(common_.inner_order);
    if (common_.moment_cap > 0) d = d.with_moment_cap(common_.moment_cap);
    return d;
  }

  std::string format(const std::string& fallback) const {
    const std::string f = common_.format.empty() ? fallback : common_.format;
    if (f != "csv" && f != "json") throw Usage("--format must be csv or json");
    return f;
  }

  void log(const std::string& msg) const {
    if (!common_.quiet) err_ << msg << '\n';
  }
  void warn(const std::string& msg) const { err_ << "warning: " << msg << '\n'; }

 private:
  const Common& common_;
  std::ostream& err_;
};

template <class F>
auto dispatch(Precision p, F&& body) {
  if (p == Precision::Extended) return body(static_cast<long double*>(nullptr));
  return body(static_cast<double*>(nullptr));
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string what = "f";
  int k = 2;
  std::string grid = "-4:4:81";
};

int cmd_eval(const Session& s, const EvalArgs& a, std::ostream& out) {
  const Grid grid = Grid::parse(a.grid);
  const InputDist dist = s.dist();
  const QuadConfig cfg = s.cfg();
  if (a.what == "gk" && a.k < 0) throw Usage("--k must be nonnegative");

  std::vector<long double> ys = grid.points(), vals;
  dispatch(cfg.precision, [&]<class Real>(Real*) {
    const Channel<Real> ch(dist);
    for (long double y : ys) {
      const Real yr = static_cast<Real>(y);
      Real v = 0;
      if (a.what == "f") v = ch.cond_mean(yr);
      else if (a.what == "gk") v = ch.cond_central_moment(yr, a.k);
      else if (a.what == "tweedie") v = ch.tweedie(yr);
      else if (a.what == "qprime") v = ch.q_prime(yr);
      else if (a.what == "py") v = ch.output_density(yr);
      else throw Usage("--what must be one of f, gk, tweedie, qprime, py");
      vals.push_back(v);
    }
    return 0;
  });

  if (s.format("csv") == "csv") {
    out << "y,value\n";
    for (std::size_t i = 0; i < ys.size(); ++i) out << num(ys[i]) << ',' << num(vals[i]) << '\n';
  } else {
    Json j;
    j["dist"] = dist.label();
    j["what"] = a.what;
    if (a.what == "gk") j["k"] = a.k;
    j["precision"] = to_string(cfg.precision);
    j["y"] = Json::array();
    j["value"] = Json::array();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      j["y"].push_back(jnum(ys[i]));
      j["value"].push_back(jnum(vals[i]));
    }
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

// deriv ----------------------------------------------------------------------

struct DerivArgs {
  int r = 2;
  std::string grid = "-2:2:5";
  bool check_fd = false;
  bool bound = false;
  bool beta = false;
  double fd_tol = 1e-5;
  std::string report;
};

Json bound_json(const DerivBoundReport& b) {
  Json j;
  j["r"] = b.r;
  j["q_r"] = b.q_r;
  j["gamma_r"] = jnum(b.gamma_r);
  j["norm_order"] = jnum(b.norm_order);
  j["norm_x"] = jnum(b.norm_x);
  j["lhs"] = jnum(b.lhs);
  j["rhs"] = jnum(b.rhs);
  j["holds"] = b.holds;
  if (b.beta_r) {
    j["beta_r"] = jnum(*b.beta_r);
    j["beta_rhs"] = jnum(*b.beta_rhs);
  }
  return j;
}

int cmd_deriv(const Session& s, const DerivArgs& a, std::ostream& out) {
  if (a.r < 2) throw Usage("--r must be >= 2");
  const Grid grid = Grid::parse(a.grid);
  const InputDist dist = s.dist();
  const QuadConfig cfg = s.cfg();
  const GPoly poly = closed_form_derivative(a.r);
  s.log(fmt::format("f^({}) = {}", a.r - 1, poly.to_string()));

  const std::vector<long double> ys = grid.points();
  std::vector<long double> vals, fds;
  dispatch(cfg.precision, [&]<class Real>(Real*) {
    const Channel<Real> ch(dist);
    for (long double y : ys) vals.push_back(eval_gpoly(poly, ch, static_cast<Real>(y)));
    return 0;
  });
  int code = kExitOk;
  if (a.check_fd) {
    const Channel<long double> ch(dist);
    long double worst = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      fds.push_back(fd_derivative(ch, ys[i], a.r - 1));
      worst = std::max(worst, std::fabs(fds.back() - vals[i]));
    }
    if (!(worst <= a.fd_tol)) {
      s.warn(fmt::format("finite differences differ by {:.3g} > {:.3g}", static_cast<double>(worst), a.fd_tol));
      code = kExitInvariant;
    }
  }
  std::optional<DerivBoundReport> bound;
  if (a.bound) {
    bound = derivative_norm_bound(dist, a.r, a.beta, cfg);
    if (!bound->holds) {
      s.warn(fmt::format("norm bound violated: {:.17g} > {:.17g}", bound->lhs, bound->rhs));
      code = kExitInvariant;
    }
  }

  if (s.format("csv") == "csv") {
    out << (a.check_fd ? "y,value,fd,abs_diff\n" : "y,value\n");
    for (std::size_t i = 0; i < ys.size(); ++i) {
      out << num(ys[i]) << ',' << num(vals[i]);
      if (a.check_fd) out << ',' << num(fds[i]) << ',' << num(std::fabs(fds[i] - vals[i]));
      out << '\n';
    }
    if (bound) {
      const std::string report = bound_json(*bound).dump(2) + "\n";
      if (a.report.empty()) {
        out << '\n' << report;
      } else {
        std::ofstream f(a.report);
        if (!f) throw Usage("cannot write " + a.report);
        f << report;
      }
    }
  } else {
    Json j;
    j["dist"] = dist.label();
    j["r"] = a.r;
    j["expression"] = poly.to_string();
    j["y"] = Json::array();
    j["value"] = Json::array();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      j["y"].push_back(jnum(ys[i]));
      j["value"].push_back(jnum(vals[i]));
    }
    if (a.check_fd) {
      j["fd"] = Json::array();
      for (long double v : fds) j["fd"].push_back(jnum(v));
    }
    if (bound) j["bound"] = bound_json(*bound);
    out << j.dump(2) << '\n';
  }
  return code;
}

// coeffs ---------------------------------------------------------------------

struct CoeffsArgs {
  int r = 2;
  bool check_recurrence = false;
};

int cmd_coeffs(const Session& s, const CoeffsArgs& a, std::ostream& out) {
  if (a.r < 2) throw Usage("--r must be >= 2");
  const GPoly poly = closed_form_derivative(a.r);
  const BigInt total = total_cyclic_count(a.r, TotalCountMethod::StirlingFormula);
  int code = kExitOk;

  Json checks;
  if (a.check_recurrence) {
    GPoly rec;
    for (const auto& [p, c] : recurrence_coeffs(a.r)) rec.add(p, c);
    checks["recurrence_matches"] = rec == poly;
    checks["symbolic_matches"] = symbolic_derivative(a.r) == poly;
    checks["sum_matches"] = total == total_cyclic_count(a.r, TotalCountMethod::SumOfCyclicCounts);
    for (const auto& [k, v] : checks.items())
      if (!v.get<bool>()) {
        s.warn(k + " is false");
        code = kExitInvariant;
      }
  }

  if (s.format("json") == "csv") {
    out << "lambda,e\n";
    for (const Partition& p : enumerate_partitions(a.r))
      out << '"' << p.to_string() << "\"," << signed_cyclic_count(p).str() << '\n';
    return code;
  }
  Json j;
  j["r"] = a.r;
  j["terms"] = Json::array();
  for (const Partition& p : enumerate_partitions(a.r))
    j["terms"].push_back({{"lambda", p.multiplicities()}, {"e", signed_cyclic_count(p).str()}});
  j["C_r"] = total.str();
  j["expression"] = poly.to_string();
  for (const auto& [k, v] : checks.items()) j[k] = v;
  out << j.dump(2) << '\n';
  return code;
}

// approx ---------------------------------------------------------------------

struct ApproxArgs {
  std::string n;  // default: 1, or even degrees 2..16 with --rate
  std::string method = "ortho";
  bool rate = false;
};

int cmd_approx(const Session& s, const ApproxArgs& a, std::ostream& out) {
  const std::string spec = !a.n.empty() ? a.n : a.rate ? "2,4,6,8,10,12,14,16" : "1";
  const std::vector<int> ns = parse_int_list(spec, "--n");
  if (ns.front() < 0) throw Usage("--n: degrees must be nonnegative");
  const ApproxMethod method = parse_method(a.method);
  const InputDist dist = s.dist();
  const QuadConfig cfg = s.cfg();

  std::vector<PolyApproxResult> results;
  dispatch(cfg.precision, [&]<class Real>(Real*) {
    const Projector<Real> proj(dist, cfg, ns.back());
    for (int n : ns) results.push_back(method == ApproxMethod::Hankel ? proj.hankel(n) : proj.orthogonal(n));
    return 0;
  });

  std::optional<double> slope;
  std::optional<std::string> note;
  if (a.rate) {
    if (ns.size() < 2) {
      s.warn("--rate needs at least two degrees");
    } else {
      const RateFitResult fit = rate_fit(dist, ns, cfg);
      for (const auto& w : fit.warnings) s.warn(w);
      slope = fit.slope;
      note = fit.note;
    }
  }

  if (s.format("json") == "csv") {
    out << "n,error\n";
    for (const auto& r : results) out << r.n << ',' << num(r.l2_error) << '\n';
    return kExitOk;
  }
  auto coeffs = [](const PolyApproxResult& r) {
    Json c = Json::array();
    for (long double v : r.coeffs) c.push_back(jnum(v));
    return c;
  };
  Json j;
  j["dist"] = dist.label();
  j["method"] = to_string(method);
  j["precision"] = to_string(cfg.precision);
  if (results.size() == 1) {
    j["n"] = results[0].n;
    j["coeffs"] = coeffs(results[0]);
    j["error"] = jnum(results[0].l2_error);
    if (method == ApproxMethod::Hankel) j["condition"] = jnum(results[0].condition_estimate);
  } else {
    j["n"] = ns;
    j["coeffs"] = Json::array();
    j["error"] = Json::array();
    for (const auto& r : results) {
      j["coeffs"].push_back(coeffs(r));
      j["error"].push_back(jnum(r.l2_error));
    }
    if (method == ApproxMethod::Hankel) {
      j["condition"] = Json::array();
      for (const auto& r : results) j["condition"].push_back(jnum(r.condition_estimate));
    }
  }
  j["slope"] = slope ? Json(*slope) : Json(nullptr);
  if (note) j["note"] = *note;
  out << j.dump(2) << '\n';
  return kExitOk;
}

// freud ----------------------------------------------------------------------

struct FreudArgs {
  std::string mrs;
  bool check = false;
  std::string grid = "-10:10:201";
};

int cmd_freud(const Session& s, const FreudArgs& a, std::ostream& out) {
  const InputDist dist = s.dist();
  const Grid grid = Grid::parse(a.grid);
  const bool run_check = a.check || a.mrs.empty();
  const bool member = in_class_D(dist).member;
  int code = kExitOk;

  std::vector<MrsResult> mrs;
  if (!a.mrs.empty()) {
    const std::vector<int> ns = parse_int_list(a.mrs, "--mrs");
    if (ns.front() < 1) throw Usage("--mrs: indices must be positive");
    const Channel<long double> ch(dist);
    for (int n : ns) mrs.push_back(mrs_number([&](long double y) { return ch.q_prime(y); }, n));
    if (member)
      for (const auto& m : mrs)
        if (m.a_n > mrs_upper_bound(dist.support_bound(), m.n)) {
          s.warn(fmt::format("a_{} = {:.17g} exceeds (2M + sqrt 2) sqrt n", m.n, static_cast<double>(m.a_n)));
          code = kExitInvariant;
        }
  }
  std::optional<FreudReport> rep;
  std::optional<EnvelopeResult> env;
  if (run_check) {
    rep = check_freud(dist, grid);
    if (dist.compact()) env = qprime_envelope_check(dist, grid);
    if (member && !rep->pass()) {
      for (const auto& c : rep->conditions)
        if (c.verdict != Verdict::Pass) s.warn(fmt::format("class member fails condition {} ({}): {}", c.index, c.name, c.detail));
      code = kExitInvariant;
    }
    if (env && !env->holds) {
      s.warn("Q' left the envelope [y - M, y + M]");
      code = kExitInvariant;
    }
  }

  if (s.format("json") == "csv") {
    if (!mrs.empty()) {
      out << "n,a_n,residual\n";
      for (const auto& m : mrs) out << m.n << ',' << num(m.a_n) << ',' << num(m.residual) << '\n';
    } else {
      out << "condition,verdict,witness\n";
      for (const auto& c : rep->conditions)
        out << c.index << ',' << to_string(c.verdict) << ',' << (c.witness ? num(*c.witness) : "") << '\n';
    }
    return code;
  }
  Json j;
  j["dist"] = dist.label();
  j["support_bound"] = jnum(dist.support_bound());
  if (!mrs.empty()) {
    j["mrs"] = Json::array();
    for (const auto& m : mrs) {
      Json e{{"n", m.n}, {"a_n", jnum(m.a_n)}, {"residual", jnum(m.residual)}};
      if (dist.compact()) e["upper_bound"] = jnum(mrs_upper_bound(dist.support_bound(), m.n));
      j["mrs"].push_back(e);
    }
  }
  if (rep) {
    Json f;
    f["pass"] = rep->pass();
    f["theorem_applies"] = rep->theorem_applies;
    f["conditions"] = Json::array();
    for (const auto& c : rep->conditions)
      f["conditions"].push_back({{"index", c.index},
                                 {"name", c.name},
                                 {"verdict", to_string(c.verdict)},
                                 {"witness", c.witness ? jnum(*c.witness) : Json(nullptr)},
                                 {"detail", c.detail}});
    j["freud"] = f;
  }
  if (env) {
    Json w = Json::array();
    for (long double y : env->witnesses) w.push_back(jnum(y));
    j["envelope"] = {{"holds", env->holds}, {"witnesses", w}};
  }
  out << j.dump(2) << '\n';
  return code;
}

// verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> inject;
};

int cmd_verify(const Session& s, const VerifyArgs& a, std::ostream& out) {
  BatteryOptions opts;
  opts.cfg = s.cfg();
  for (const auto& f : a.inject) opts.faults.insert(parse_fault(f));
  opts.on_result = [&](const CheckResult& r) { s.log(fmt::format("[{}] {}: {}", r.passed ? "ok" : "FAIL", r.module, r.name)); };
  const std::vector<CheckResult> results = run_battery(opts);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;

  if (s.format("csv") == "json") {
    Json j = Json::array();
    for (const auto& r : results)
      j.push_back({{"module", r.module}, {"check", r.name}, {"pass", r.passed}, {"detail", r.detail}});
    out << j.dump(2) << '\n';
  } else {
    out << "module,check,result,detail\n";
    for (const auto& r : results)
      out << r.module << ",\"" << r.name << "\"," << (r.passed ? "PASS" : "FAIL") << ",\"" << r.detail << "\"\n";
  }
  s.log(fmt::format("{}/{} checks passed", results.size() - failed, results.size()));
  return failed ? kExitInvariant : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MMSE estimators in the scalar Gaussian channel", "mmse"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dist", common.dist, "preset name[:params] or JSON spec file");
    sub->add_option("--outer-order", common.outer_order, "Gauss-Hermite order for y-integrals")->check(CLI::Range(2, 4000));
    sub->add_option("--inner-order", common.inner_order, "Gauss-Legendre order per density panel")->check(CLI::Range(2, 4000));
    sub->add_option("--precision", common.precision, "double or extended (default: MMSE_PRECISION or double)");
    sub->add_option("--moment-cap", common.moment_cap, "highest raw moment order of X")->check(CLI::PositiveNumber);
    sub->add_option("--format", common.format, "csv or json");
    sub->add_option("--output,-o", common.output, "write the artifact here instead of stdout");
    sub->add_flag("--quiet,-q", common.quiet, "no progress messages on stderr");
  };

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "f, g_k, Tweedie, Q' or p_Y on a grid");
  eval->add_option("--what", ea.what, "f|gk|tweedie|qprime|py");
  eval->add_option("--k", ea.k, "moment order for --what gk");
  eval->add_option("--grid", ea.grid, "lo:hi:steps");
  add_common(eval);

  DerivArgs da;
  auto* deriv = app.add_subcommand("deriv", "f^(r-1) from the partition formula");
  deriv->add_option("--r", da.r, "r >= 2")->required();
  deriv->add_option("--grid", da.grid, "lo:hi:steps");
  deriv->add_flag("--check-fd", da.check_fd, "compare with iterated central differences");
  deriv->add_option("--fd-tol", da.fd_tol, "absolute tolerance for --check-fd");
  deriv->add_flag("--bound", da.bound, "report the L2 norm bound");
  deriv->add_flag("--beta", da.beta, "also report the experimental beta_r variant");
  deriv->add_option("--report", da.report, "file for the bound report (CSV mode)");
  add_common(deriv);

  CoeffsArgs ca;
  auto* coeffs = app.add_subcommand("coeffs", "signed coefficients e_lambda of f^(r-1)");
  coeffs->add_option("--r", ca.r, "r >= 2")->required();
  coeffs->add_flag("--check-recurrence", ca.check_recurrence, "cross-check against the transition recurrence");
  add_common(coeffs);

  ApproxArgs aa;
  auto* approx = app.add_subcommand("approx", "best polynomial approximation of f");
  approx->add_option("--n", aa.n, "degree or comma-separated increasing list");
  approx->add_option("--method", aa.method, "hankel|ortho");
  approx->add_flag("--rate", aa.rate, "fit the log-log error slope");
  add_common(approx);

  FreudArgs fa;
  auto* freud = app.add_subcommand("freud", "Freud conditions and MRS numbers of p_Y");
  freud->add_option("--mrs", fa.mrs, "comma-separated increasing n");
  freud->add_flag("--check", fa.check, "check the Freud conditions");
  freud->add_option("--grid", fa.grid, "lo:hi:steps");
  add_common(freud);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the invariant battery");
  verify->add_option("--inject", va.inject)->group("");
  add_common(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  const Session session(common, err);
  std::ostringstream buf;
  int code = kExitOk;
  try {
    if (*eval) code = cmd_eval(session, ea, buf);
    else if (*deriv) code = cmd_deriv(session, da, buf);
    else if (*coeffs) code = cmd_coeffs(session, ca, buf);
    else if (*approx) code = cmd_approx(session, aa, buf);
    else if (*freud) code = cmd_freud(session, fa, buf);
    else if (*verify) code = cmd_verify(session, va, buf);
  } catch (const Usage& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SpecError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }

  if (common.output.empty()) {
    out << buf.str();
  } else {
    std::ofstream f(common.output, std::ios::binary);
    if (!f) {
      err << "usage error: cannot write " << common.output << '\n';
      return kExitUsage;
    }
    f << buf.str();
  }
  return code;
}

}  // namespace mmse
