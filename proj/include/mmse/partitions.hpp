#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mmse {

using BigInt = boost::multiprecision::cpp_int;

// Integer partition into parts >= 2, stored by multiplicity:
// (lambda_2, ..., lambda_l) with lambda_l > 0. Part i occurs lambda_i times.
class Partition {
 public:
  // Strips trailing zeros; throws InvalidArgument for negative entries or an
  // all-zero tuple.
  explicit Partition(std::vector<int> multiplicities);

  // lambda_i for i >= 2 (zero past the end).
  int multiplicity(int part) const;
  int max_part() const { return static_cast<int>(mult_.size()) + 1; }
  // Weighted degree r = sum_i i * lambda_i.
  int degree() const;
  // Number of parts m = sum_i lambda_i.
  int parts() const;
  const std::vector<int>& multiplicities() const { return mult_; }

  // "(0,5,0,1)"
  std::string to_string() const;

  auto operator<=>(const Partition&) const = default;

 private:
  std::vector<int> mult_;
};

// All partitions of r into parts >= 2, lexicographic on the dense tuple.
std::vector<Partition> enumerate_partitions(int r);

// Number of cyclically-invariant ordered set-partitions of an r-set into
// blocks with sizes given by lambda:
//   (1/m) * multinomial(m; lambda) * multinomial(r; 2,..,2, ..., l,..,l).
BigInt cyclic_count(const Partition& lambda);

// (-1)^{m-1} cyclic_count(lambda); the coefficient of g^lambda in f^{(r-1)}.
BigInt signed_cyclic_count(const Partition& lambda);

// Stirling number of the second kind; 0 outside 0 <= k <= n.
BigInt stirling2(int n, int k);

enum class TotalCountMethod { StirlingFormula, SumOfCyclicCounts };

// C_r, the number of cyclically-invariant ordered set-partitions of an r-set
// into blocks of size >= 2.
BigInt total_cyclic_count(int r, TotalCountMethod method);

struct Transition {
  Partition target;
  BigInt coeff;
};

// Monomials produced by d/dy g^lambda. tau_plus moves one part of size i to
// size i+1 (coefficient lambda_i); tau_minus moves one part of size i >= 3 to
// size i-1 and adds a part of size 2 (coefficient i * lambda_i), entering
// with a minus sign.
std::vector<Transition> tau_plus(const Partition& lambda);
std::vector<Transition> tau_minus(const Partition& lambda);

// Predecessors of every nu in Pi_{r+1}, obtained by inverting tau_plus /
// tau_minus over Pi_r. Each Transition holds the predecessor lambda and the
// coefficient a_{lambda,nu} (resp. b_{lambda,nu}).
using PredecessorMap = std::map<Partition, std::vector<Transition>>;
PredecessorMap theta_plus(int r);
PredecessorMap theta_minus(int r);

// h_lambda for lambda in Pi_r from the seed h_{(1)} = 1 and
//   h_nu = sum_{theta+} h_lambda a - sum_{theta-} h_lambda b.
std::map<Partition, BigInt> recurrence_coeffs(int r);

}  // namespace mmse
