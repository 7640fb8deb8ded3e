#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmse/dist.hpp"
#include "mmse/grid.hpp"

namespace mmse {

enum class Verdict { Pass, Fail, Undetermined };

std::string to_string(Verdict v);

struct ConditionResult {
  int index = 0;  // 1..5
  std::string name;
  Verdict verdict = Verdict::Undetermined;
  std::optional<long double> witness;  // y where the condition broke
  std::string detail;
  std::vector<long double> grid;  // points actually examined
};

// Conditions on Q = -log p_Y for e^{-Q} to be a Freud weight:
//   1 Q even
//   2 Q'(y) > 0 for y > 0
//   3 y Q'(y) strictly increasing on (0, inf)
//   4 y Q'(y) -> 0 as y -> 0+
//   5 a <= Q'(lambda y) / Q'(y) <= b for y > c, with lambda = M + 2 and
//     c = M + 4 supplied by the compact-support construction.
struct FreudReport {
  std::string dist_label;
  bool compact = false;
  long double support_bound = 0;
  std::vector<ConditionResult> conditions;
  // Only a compact, even, non-increasing law is covered by the theorem that
  // p_Y is a Freud weight; for other laws this stays false even when every
  // numerical check passes.
  bool theorem_applies = false;

  bool pass() const;
};

struct FreudTolerances {
  long double even = 1e-10;     // |Q(y) - Q(-y)|
  long double positive = 0;     // Q'(y) > positive
  long double ratio = 1e-12;    // slack on the ratio bounds, relative
};

// Conditions 1-3 use the points y > 0 of `grid` (and their mirror images for
// evenness). Condition 4 samples y in {1e-2, 1e-4, 1e-6}. Condition 5 uses
// grid points beyond M + 4 plus a fixed tail sweep out to 10 (M + 4).
FreudReport check_freud(const InputDist& dist, const Grid& grid, const FreudTolerances& tol = {});

struct MrsResult {
  int n = 0;
  long double a_n = 0;
  long double residual = 0;  // n - (2/pi) int_0^1 a t Q'(a t) / sqrt(1 - t^2) dt
};

inline constexpr long double kMrsZMax = 1e6L;

// (2/pi) int_0^1 z t Q'(z t) / sqrt(1 - t^2) dt, via t = sin(theta) and
// 64-point Gauss-Legendre on [0, pi/2].
long double mrs_functional(const std::function<long double(long double)>& qprime, long double z);

// Unique positive root of mrs_functional(z) = n. Brackets by doubling from
// z = 1 and refines with TOMS 748. Throws OutOfRange when no bracket exists
// below z_max, and NumericFailure when |residual| > 1e-8.
MrsResult mrs_number(const std::function<long double(long double)>& qprime, int n, long double z_max = kMrsZMax);
MrsResult mrs_number(const InputDist& dist, int n, long double z_max = kMrsZMax);

// (2M + sqrt 2) sqrt n
long double mrs_upper_bound(long double support_bound, int n);

struct EnvelopeResult {
  bool holds = true;
  long double support_bound = 0;
  std::vector<long double> witnesses;  // grid points outside [y - M, y + M]
};

// y - M <= Q'(y) <= y + M at every grid point, within 1e-9.
EnvelopeResult qprime_envelope_check(const InputDist& dist, const Grid& grid);

}  // namespace mmse
