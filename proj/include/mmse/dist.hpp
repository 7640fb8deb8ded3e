#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mmse/quadrature.hpp"

namespace mmse {

struct Atom {
  long double x = 0;
  long double mass = 0;
};

struct Pmf {
  std::vector<Atom> atoms;  // sorted by location, distinct, positive masses
};

// Compactly supported density. `pdf` is only ever evaluated inside
// [lo, hi]; outside it the density is zero by construction.
struct Density {
  std::string name;
  std::function<long double(long double)> pdf;
  long double lo = 0;
  long double hi = 0;
  // Interior points where pdf may fail to be smooth. Zero is always added
  // when it lies inside the support.
  std::vector<long double> kinks;
  int inner_order = 200;
};

struct Gaussian {
  long double mean = 0;
  long double var = 1;
};

struct Constant {
  long double value = 0;
};

enum class DistKind { Pmf, Density, Gaussian, Constant };

std::string to_string(DistKind kind);

// Default cap on raw-moment orders: 2 * n_max * q_r(12) with n_max = 32.
inline constexpr int kDefaultMomentCap = 192;

// Law of X. Immutable after construction; invariants are checked by the
// factory functions, which throw InvalidArgument on violation.
class InputDist {
 public:
  using Variant = std::variant<Pmf, Density, Gaussian, Constant>;

  static InputDist pmf(std::vector<Atom> atoms);
  static InputDist density(Density d);
  static InputDist gaussian(long double mean, long double var);
  static InputDist constant(long double value);

  // Presets.
  static InputDist uniform(long double halfwidth, long double center = 0);
  static InputDist triangular(long double halfwidth);
  // p(x) = pi / (4M) cos(pi x / (2M)) on [-M, M].
  static InputDist coswindow(long double halfwidth);
  static InputDist two_point(long double a = 1);

  const Variant& variant() const { return v_; }
  DistKind kind() const;
  const std::string& label() const { return label_; }

  bool compact() const { return kind() != DistKind::Gaussian; }
  // M with supp(X) inside [-M, M]; +inf for Gaussian input.
  long double support_bound() const;

  int moment_cap() const { return moment_cap_; }
  InputDist with_moment_cap(int cap) const;
  // Re-discretize a density with a different inner Gauss-Legendre order
  // (per panel). No-op for other variants.
  InputDist with_inner_order(int order) const;

  // Atoms of a pmf/constant, or the inner quadrature nodes of a density with
  // weights w_i p(x_i). Throws for Gaussian input.
  const std::vector<Atom>& discrete_support() const;

  // Quadrature breakpoints [lo, kinks..., hi] of a density.
  std::vector<long double> density_breaks() const;

 private:
  InputDist(Variant v, std::string label);
  void build_support();

  Variant v_;
  std::string label_;
  int moment_cap_ = kDefaultMomentCap;
  std::vector<Atom> support_;
};

// E[X^k]. Closed form for Gaussian/constant, finite sum for pmf, inner
// quadrature for densities.
long double moment(const InputDist& dist, int k);

// (E|X|^q)^{1/q}, q >= 1.
long double norm_q(const InputDist& dist, long double q);

struct MomentTable {
  int max_order = 0;
  std::vector<long double> raw;    // E[X^k], k = 0..max_order
  std::vector<long double> qs;     // requested norm orders
  std::vector<long double> norms;  // ||X||_q for each entry of qs
};

MomentTable moment_table(const InputDist& dist, int max_order, std::vector<long double> qs = {});

struct ClassDReport {
  bool member = false;
  std::string violated;  // "compact-support", "even", "non-increasing" or empty
  std::optional<long double> witness;
  std::string detail;
};

// Membership in the class of compactly supported, even laws that are
// non-increasing on [0, inf) within their support. Densities are sampled on
// 1025 uniform points of [0, M].
ClassDReport in_class_D(const InputDist& dist, long double tol = 1e-9);

// Distribution spec (JSON):
//   {"type":"pmf","atoms":[[x,m],...]}         m may be a string "p/q"
//   {"type":"uniform","halfwidth":M[,"center":c]}
//   {"type":"gaussian","mean":mu,"var":s2}
//   {"type":"constant","value":c}
//   {"type":"density","preset":"triangular|coswindow","halfwidth":M}
// Throws SpecError naming the offending field.
InputDist dist_from_json(const nlohmann::json& j);

// `--dist` argument: a preset name ("uniform", "twopoint", "gaussian",
// "constant", "triangular", "coswindow", "shifted-uniform"), optionally with
// ':'-separated parameters (e.g. "uniform:2", "gaussian:0:4"), or a path to a
// JSON spec file.
InputDist load_dist(std::string_view arg);

struct NamedDist {
  std::string name;
  InputDist dist;
};

// Compact, even, non-increasing members used across the test battery.
std::vector<NamedDist> class_D_family();
// Laws outside the class: Gaussian and a shifted uniform on [0, 2].
std::vector<NamedDist> non_class_D_family();

}  // namespace mmse
