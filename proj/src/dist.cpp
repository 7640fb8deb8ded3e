#include "mmse/dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "mmse/errors.hpp"

namespace mmse {

namespace {

using LD = long double;

constexpr LD kMassTol = 1e-12L;
constexpr LD kDensityNormTol = 1e-9L;

std::string fmt_ld(LD v) {
  std::ostringstream os;
  os.precision(17);
  os << static_cast<double>(v);
  return os.str();
}

// E[Z^j] for Z ~ N(0, 1).
LD std_normal_moment(int j) {
  if (j % 2 == 1) return 0;
  LD acc = 1;
  for (int i = j - 1; i > 1; i -= 2) acc *= i;
  return acc;
}

LD binom(int n, int k) {
  LD acc = 1;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

}  // namespace

std::string to_string(DistKind kind) {
  switch (kind) {
    case DistKind::Pmf: return "pmf";
    case DistKind::Density: return "density";
    case DistKind::Gaussian: return "gaussian";
    case DistKind::Constant: return "constant";
  }
  return "unknown";
}

InputDist::InputDist(Variant v, std::string label) : v_(std::move(v)), label_(std::move(label)) {
  build_support();
}

DistKind InputDist::kind() const { return static_cast<DistKind>(v_.index()); }

InputDist InputDist::pmf(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InvalidArgument("pmf needs at least one atom");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.x)) throw InvalidArgument("pmf atom location must be finite");
    if (!(a.mass > 0) || !std::isfinite(a.mass)) throw InvalidArgument("pmf masses must be positive, got " + fmt_ld(a.mass));
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().x == a.x)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }
  LD total = 0;
  for (const Atom& a : merged) total += a.mass;
  if (std::fabs(total - 1) > kMassTol) throw InvalidArgument("pmf masses sum to " + fmt_ld(total) + ", not 1");

  std::ostringstream label;
  label << "pmf{";
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (i) label << ",";
    label << "(" << fmt_ld(merged[i].x) << "," << fmt_ld(merged[i].mass) << ")";
  }
  label << "}";
  return InputDist(Pmf{std::move(merged)}, label.str());
}

InputDist InputDist::density(Density d) {
  if (!d.pdf) throw InvalidArgument("density needs an evaluable pdf");
  if (!(d.lo < d.hi) || !std::isfinite(d.lo) || !std::isfinite(d.hi))
    throw InvalidArgument("density support must be a finite interval lo < hi");
  if (d.inner_order < 1) throw InvalidArgument("density inner order must be >= 1");
  std::string label = d.name.empty() ? "density" : d.name;
  return InputDist(std::move(d), label);
}

InputDist InputDist::gaussian(LD mean, LD var) {
  if (!(var > 0) || !std::isfinite(var) || !std::isfinite(mean))
    throw InvalidArgument("gaussian input needs finite mean and variance > 0");
  return InputDist(Gaussian{mean, var}, "gaussian(" + fmt_ld(mean) + "," + fmt_ld(var) + ")");
}

InputDist InputDist::constant(LD value) {
  if (!std::isfinite(value)) throw InvalidArgument("constant input must be finite");
  return InputDist(Constant{value}, "constant(" + fmt_ld(value) + ")");
}

InputDist InputDist::uniform(LD halfwidth, LD center) {
  if (!(halfwidth > 0)) throw InvalidArgument("uniform halfwidth must be positive");
  const LD height = 1 / (2 * halfwidth);
  Density d;
  d.name = "uniform[" + fmt_ld(center - halfwidth) + "," + fmt_ld(center + halfwidth) + "]";
  d.pdf = [height](LD) { return height; };
  d.lo = center - halfwidth;
  d.hi = center + halfwidth;
  return density(std::move(d));
}

InputDist InputDist::triangular(LD halfwidth) {
  if (!(halfwidth > 0)) throw InvalidArgument("triangular halfwidth must be positive");
  Density d;
  d.name = "triangular(" + fmt_ld(halfwidth) + ")";
  d.pdf = [M = halfwidth](LD x) { return std::max<LD>(0, (M - std::fabs(x)) / (M * M)); };
  d.lo = -halfwidth;
  d.hi = halfwidth;
  return density(std::move(d));
}

InputDist InputDist::coswindow(LD halfwidth) {
  if (!(halfwidth > 0)) throw InvalidArgument("coswindow halfwidth must be positive");
  Density d;
  d.name = "coswindow(" + fmt_ld(halfwidth) + ")";
  d.pdf = [M = halfwidth](LD x) {
    return std::max<LD>(0, std::numbers::pi_v<LD> / (4 * M) * std::cos(std::numbers::pi_v<LD> * x / (2 * M)));
  };
  d.lo = -halfwidth;
  d.hi = halfwidth;
  return density(std::move(d));
}

InputDist InputDist::two_point(LD a) {
  if (!(a > 0)) throw InvalidArgument("two-point magnitude must be positive");
  InputDist out = pmf({{-a, 0.5L}, {a, 0.5L}});
  out.label_ = "two-point(+-" + fmt_ld(a) + ")";
  return out;
}

LD InputDist::support_bound() const {
  switch (kind()) {
    case DistKind::Gaussian: return std::numeric_limits<LD>::infinity();
    case DistKind::Constant: return std::fabs(std::get<Constant>(v_).value);
    case DistKind::Pmf: {
      const auto& atoms = std::get<Pmf>(v_).atoms;
      return std::max(std::fabs(atoms.front().x), std::fabs(atoms.back().x));
    }
    case DistKind::Density: {
      const auto& d = std::get<Density>(v_);
      return std::max(std::fabs(d.lo), std::fabs(d.hi));
    }
  }
  return 0;
}

InputDist InputDist::with_moment_cap(int cap) const {
  if (cap < 0) throw InvalidArgument("moment cap must be nonnegative");
  InputDist out = *this;
  out.moment_cap_ = cap;
  return out;
}

InputDist InputDist::with_inner_order(int order) const {
  if (kind() != DistKind::Density) return *this;
  if (order < 1) throw InvalidArgument("inner order must be >= 1");
  Density d = std::get<Density>(v_);
  d.inner_order = order;
  InputDist out(std::move(d), label_);
  out.moment_cap_ = moment_cap_;
  return out;
}

const std::vector<Atom>& InputDist::discrete_support() const {
  if (kind() == DistKind::Gaussian) throw InvalidArgument("gaussian input has no discrete support");
  return support_;
}

std::vector<LD> InputDist::density_breaks() const {
  const auto& d = std::get<Density>(v_);
  std::vector<LD> breaks{d.lo, d.hi};
  for (LD k : d.kinks)
    if (k > d.lo && k < d.hi) breaks.push_back(k);
  if (d.lo < 0 && d.hi > 0) breaks.push_back(0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

void InputDist::build_support() {
  support_.clear();
  switch (kind()) {
    case DistKind::Gaussian: return;
    case DistKind::Constant: support_.push_back({std::get<Constant>(v_).value, 1}); return;
    case DistKind::Pmf: support_ = std::get<Pmf>(v_).atoms; return;
    case DistKind::Density: break;
  }
  const auto& d = std::get<Density>(v_);
  std::vector<LD> breaks = density_breaks();
  QuadRule<LD> rule = composite_legendre<LD>(d.inner_order, breaks);
  LD total = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    LD p = d.pdf(rule.nodes[i]);
    if (!std::isfinite(p) || p < 0)
      throw InvalidArgument(label_ + ": density must be finite and nonnegative, fails at x=" + fmt_ld(rule.nodes[i]));
    LD m = rule.weights[i] * p;
    total += m;
    if (m > 0) support_.push_back({rule.nodes[i], m});
  }
  if (std::fabs(total - 1) > kDensityNormTol)
    throw InvalidArgument(label_ + ": density integrates to " + fmt_ld(total) + ", not 1");
  if (support_.empty()) throw InvalidArgument(label_ + ": density vanishes on its support");
}

long double moment(const InputDist& dist, int k) {
  if (k < 0) throw InvalidArgument("moment order must be nonnegative");
  if (k > dist.moment_cap())
    throw InvalidArgument("moment order " + std::to_string(k) + " exceeds cap " + std::to_string(dist.moment_cap()));
  if (k == 0) return 1;
  if (dist.kind() == DistKind::Gaussian) {
    const auto& g = std::get<Gaussian>(dist.variant());
    const LD sigma = std::sqrt(g.var);
    LD acc = 0;
    for (int j = 0; j <= k; j += 2) acc += binom(k, j) * std::pow(g.mean, k - j) * std::pow(sigma, j) * std_normal_moment(j);
    return acc;
  }
  LD acc = 0;
  for (const Atom& a : dist.discrete_support()) acc += a.mass * std::pow(a.x, k);
  return acc;
}

long double norm_q(const InputDist& dist, LD q) {
  if (!(q >= 1)) throw InvalidArgument("norm order q must be >= 1");
  if (dist.kind() != DistKind::Gaussian) {
    LD acc = 0;
    for (const Atom& a : dist.discrete_support())
      if (a.x != 0) acc += a.mass * std::pow(std::fabs(a.x), q);
    return std::pow(acc, 1 / q);
  }
  const auto& g = std::get<Gaussian>(dist.variant());
  const LD sigma = std::sqrt(g.var);
  if (g.mean == 0) {
    // E|Z|^q = 2^{q/2} Gamma((q+1)/2) / sqrt(pi)
    const LD log_abs = q / 2 * std::log(2.0L) + std::lgamma((q + 1) / 2) - std::log(std::numbers::pi_v<LD>) / 2;
    return sigma * std::exp(log_abs / q);
  }
  // E|mu + sigma Z|^q by panels in z, split at the kink z = -mu / sigma.
  const LD half = 12 + 2 * std::sqrt(q);
  std::vector<LD> breaks;
  constexpr int kPanels = 16;
  for (int p = 0; p <= kPanels; ++p) breaks.push_back(-half + 2 * half * p / kPanels);
  const LD kink = -g.mean / sigma;
  if (kink > -half && kink < half) breaks.push_back(kink);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  QuadRule<LD> rule = composite_legendre<LD>(64, breaks);
  const LD norm = 1 / std::sqrt(2 * std::numbers::pi_v<LD>);
  LD acc = rule.integrate([&](LD z) { return std::pow(std::fabs(g.mean + sigma * z), q) * norm * std::exp(-z * z / 2); });
  return std::pow(acc, 1 / q);
}

MomentTable moment_table(const InputDist& dist, int max_order, std::vector<LD> qs) {
  MomentTable t;
  t.max_order = max_order;
  t.raw.reserve(max_order + 1);
  for (int k = 0; k <= max_order; ++k) t.raw.push_back(moment(dist, k));
  std::sort(qs.begin(), qs.end());
  t.qs = std::move(qs);
  for (LD q : t.qs) t.norms.push_back(norm_q(dist, q));
  return t;
}

ClassDReport in_class_D(const InputDist& dist, LD tol) {
  ClassDReport rep;
  switch (dist.kind()) {
    case DistKind::Gaussian:
      rep.violated = "compact-support";
      rep.detail = "unbounded support";
      return rep;
    case DistKind::Pmf:
    case DistKind::Constant: {
      const auto& atoms = dist.discrete_support();
      for (const Atom& a : atoms) {
        auto mirror = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& b) {
          return std::fabs(b.x + a.x) <= tol * std::max<LD>(1, std::fabs(a.x));
        });
        if (mirror == atoms.end() || std::fabs(mirror->mass - a.mass) > tol) {
          rep.violated = "even";
          rep.witness = a.x;
          rep.detail = "no atom of equal mass at " + fmt_ld(-a.x);
          return rep;
        }
      }
      LD prev = std::numeric_limits<LD>::infinity();
      for (const Atom& a : atoms) {
        if (a.x < 0) continue;
        if (a.mass > prev + tol) {
          rep.violated = "non-increasing";
          rep.witness = a.x;
          rep.detail = "mass increases at x=" + fmt_ld(a.x);
          return rep;
        }
        prev = a.mass;
      }
      break;
    }
    case DistKind::Density: {
      const auto& d = std::get<Density>(dist.variant());
      auto p = [&](LD x) { return (x >= d.lo && x <= d.hi) ? d.pdf(x) : LD(0); };
      const LD M = dist.support_bound();
      constexpr int kGrid = 1025;
      LD prev = std::numeric_limits<LD>::infinity();
      for (int j = 0; j < kGrid; ++j) {
        const LD x = M * j / (kGrid - 1);
        const LD px = p(x);
        if (std::fabs(px - p(-x)) > tol) {
          rep.violated = "even";
          rep.witness = x;
          rep.detail = "p(x) != p(-x) at x=" + fmt_ld(x);
          return rep;
        }
        if (px > prev + tol) {
          rep.violated = "non-increasing";
          rep.witness = x;
          rep.detail = "density increases at x=" + fmt_ld(x);
          return rep;
        }
        prev = px;
      }
      break;
    }
  }
  rep.member = true;
  return rep;
}

namespace {

LD parse_mass(const nlohmann::json& m, std::size_t index) {
  const std::string where = "atoms[" + std::to_string(index) + "][1]";
  if (m.is_number()) return m.get<double>();
  if (m.is_string()) {
    const std::string s = m.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stold(s);
      const LD num = std::stold(s.substr(0, slash));
      const LD den = std::stold(s.substr(slash + 1));
      if (den == 0) throw SpecError(where + ": zero denominator");
      return num / den;
    } catch (const std::logic_error&) {
      throw SpecError(where + ": cannot parse mass '" + s + "'");
    }
  }
  throw SpecError(where + ": mass must be a number or a \"p/q\" string");
}

LD require_number(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw SpecError(std::string("missing field '") + field + "'");
  if (!j.at(field).is_number()) throw SpecError(std::string("field '") + field + "' must be a number");
  return j.at(field).get<double>();
}

}  // namespace

InputDist dist_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("distribution spec must be a JSON object");
  if (!j.contains("type") || !j.at("type").is_string()) throw SpecError("missing string field 'type'");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "pmf") {
      if (!j.contains("atoms") || !j.at("atoms").is_array()) throw SpecError("field 'atoms' must be an array of [x, m]");
      std::vector<Atom> atoms;
      const auto& arr = j.at("atoms");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_array() || arr[i].size() != 2 || !arr[i][0].is_number())
          throw SpecError("atoms[" + std::to_string(i) + "] must be [x, m]");
        atoms.push_back({arr[i][0].get<double>(), parse_mass(arr[i][1], i)});
      }
      return InputDist::pmf(std::move(atoms));
    }
    if (type == "uniform") {
      const LD center = j.contains("center") ? require_number(j, "center") : 0;
      return InputDist::uniform(require_number(j, "halfwidth"), center);
    }
    if (type == "gaussian") return InputDist::gaussian(require_number(j, "mean"), require_number(j, "var"));
    if (type == "constant") return InputDist::constant(require_number(j, "value"));
    if (type == "density") {
      if (!j.contains("preset") || !j.at("preset").is_string()) throw SpecError("missing string field 'preset'");
      const std::string preset = j.at("preset").get<std::string>();
      const LD M = require_number(j, "halfwidth");
      if (preset == "triangular") return InputDist::triangular(M);
      if (preset == "coswindow") return InputDist::coswindow(M);
      throw SpecError("field 'preset': unknown density preset '" + preset + "'");
    }
  } catch (const InvalidArgument& e) {
    throw SpecError(std::string("invalid ") + type + " spec: " + e.what());
  }
  throw SpecError("field 'type': unknown distribution type '" + type + "'");
}

InputDist load_dist(std::string_view arg) {
  std::vector<std::string> parts;
  {
    std::string s(arg);
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(':', start)) != std::string::npos; start = pos + 1) parts.push_back(s.substr(start, pos - start));
    parts.push_back(s.substr(start));
  }
  auto param = [&](std::size_t i, LD fallback) -> LD {
    if (parts.size() <= i) return fallback;
    try {
      return std::stold(parts[i]);
    } catch (const std::logic_error&) {
      throw SpecError("bad preset parameter '" + parts[i] + "' in '" + std::string(arg) + "'");
    }
  };
  const std::string& name = parts.front();
  try {
    if (name == "uniform") return InputDist::uniform(param(1, 1));
    if (name == "twopoint" || name == "two-point") return InputDist::two_point(param(1, 1));
    if (name == "gaussian") return InputDist::gaussian(param(1, 0), param(2, 1));
    if (name == "constant") return InputDist::constant(param(1, 0));
    if (name == "triangular") return InputDist::triangular(param(1, 1));
    if (name == "coswindow") return InputDist::coswindow(param(1, 1));
    if (name == "shifted-uniform") return InputDist::uniform(param(1, 1), param(1, 1));
  } catch (const InvalidArgument& e) {
    throw SpecError(std::string("invalid preset '") + std::string(arg) + "': " + e.what());
  }

  std::ifstream in{std::string(arg)};
  if (!in) throw SpecError("'" + std::string(arg) + "' is neither a distribution preset nor a readable file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string(arg) + ": " + e.what());
  }
  try {
    return dist_from_json(j);
  } catch (const SpecError& e) {
    throw SpecError(std::string(arg) + ": " + e.what());
  }
}

std::vector<NamedDist> class_D_family() {
  return {
      {"uniform", InputDist::uniform(1)},
      {"twopoint", InputDist::two_point(1)},
      {"triangular", InputDist::triangular(1)},
      {"coswindow", InputDist::coswindow(1)},
  };
}

std::vector<NamedDist> non_class_D_family() {
  return {
      {"gaussian", InputDist::gaussian(0, 1)},
      {"shifted-uniform", InputDist::uniform(1, 1)},
  };
}

}  // namespace mmse
