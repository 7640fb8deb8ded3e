#include "mmse/partitions.hpp"

#include <algorithm>
#include <numeric>

#include "mmse/errors.hpp"

namespace mmse {

namespace {

BigInt factorial(int n) {
  BigInt acc = 1;
  for (int i = 2; i <= n; ++i) acc *= i;
  return acc;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc *= n - k + i;
    acc /= i;
  }
  return acc;
}

void require_degree(int r) {
  if (r < 2) throw InvalidArgument("partition degree r must be >= 2, got " + std::to_string(r));
}

void enumerate_rec(int remaining, int part, std::vector<int>& dense, std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(dense);
    return;
  }
  if (part > remaining) return;
  for (int count = 0; count * part <= remaining; ++count) {
    dense[part - 2] = count;
    enumerate_rec(remaining - count * part, part + 1, dense, out);
  }
  dense[part - 2] = 0;
}

}  // namespace

Partition::Partition(std::vector<int> multiplicities) : mult_(std::move(multiplicities)) {
  for (int v : mult_)
    if (v < 0) throw InvalidArgument("partition multiplicities must be nonnegative");
  while (!mult_.empty() && mult_.back() == 0) mult_.pop_back();
  if (mult_.empty()) throw InvalidArgument("partition must have at least one part");
}

int Partition::multiplicity(int part) const {
  const int idx = part - 2;
  return (idx >= 0 && idx < static_cast<int>(mult_.size())) ? mult_[idx] : 0;
}

int Partition::degree() const {
  int r = 0;
  for (std::size_t i = 0; i < mult_.size(); ++i) r += static_cast<int>(i + 2) * mult_[i];
  return r;
}

int Partition::parts() const { return std::accumulate(mult_.begin(), mult_.end(), 0); }

std::string Partition::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < mult_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(mult_[i]);
  }
  return s + ")";
}

std::vector<Partition> enumerate_partitions(int r) {
  require_degree(r);
  std::vector<Partition> out;
  std::vector<int> dense(r - 1, 0);
  enumerate_rec(r, 2, dense, out);
  std::sort(out.begin(), out.end());
  return out;
}

BigInt cyclic_count(const Partition& lambda) {
  const int m = lambda.parts();
  const int r = lambda.degree();
  BigInt parts_multinomial = factorial(m);
  BigInt sizes_multinomial = factorial(r);
  for (int i = 2; i <= lambda.max_part(); ++i) {
    const int li = lambda.multiplicity(i);
    parts_multinomial /= factorial(li);
    const BigInt fi = factorial(i);
    for (int j = 0; j < li; ++j) sizes_multinomial /= fi;
  }
  return parts_multinomial * sizes_multinomial / m;
}

BigInt signed_cyclic_count(const Partition& lambda) {
  BigInt c = cyclic_count(lambda);
  return (lambda.parts() % 2 == 1) ? c : BigInt(-c);
}

BigInt stirling2(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  // Row-by-row triangle S(i, j) = j S(i-1, j) + S(i-1, j-1).
  std::vector<BigInt> row(k + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
    row[0] = 0;
  }
  return row[k];
}

BigInt total_cyclic_count(int r, TotalCountMethod method) {
  require_degree(r);
  BigInt total = 0;
  if (method == TotalCountMethod::SumOfCyclicCounts) {
    for (const Partition& p : enumerate_partitions(r)) total += cyclic_count(p);
    return total;
  }
  // sum_{k=1}^r (k-1)! sum_{j=0}^k (-1)^j binom(r, j) S(r-j, k-j)
  for (int k = 1; k <= r; ++k) {
    BigInt inner = 0;
    for (int j = 0; j <= k; ++j) {
      BigInt term = binomial(r, j) * stirling2(r - j, k - j);
      if (j % 2 == 1)
        inner -= term;
      else
        inner += term;
    }
    total += factorial(k - 1) * inner;
  }
  return total;
}

std::vector<Transition> tau_plus(const Partition& lambda) {
  std::vector<Transition> out;
  const int l = lambda.max_part();
  for (int i = 2; i <= l; ++i) {
    const int li = lambda.multiplicity(i);
    if (li == 0) continue;
    std::vector<int> nu = lambda.multiplicities();
    nu.resize(std::max<std::size_t>(nu.size(), static_cast<std::size_t>(i)), 0);  // room for part i+1
    nu[i - 2] -= 1;
    nu[i - 1] += 1;
    out.push_back({Partition(std::move(nu)), li});
  }
  return out;
}

std::vector<Transition> tau_minus(const Partition& lambda) {
  std::vector<Transition> out;
  const int l = lambda.max_part();
  for (int i = 3; i <= l; ++i) {
    const int li = lambda.multiplicity(i);
    if (li == 0) continue;
    std::vector<int> nu = lambda.multiplicities();
    nu[i - 3] += 1;  // part i-1
    nu[i - 2] -= 1;  // part i
    nu[0] += 1;      // new part of size 2
    out.push_back({Partition(std::move(nu)), BigInt(i) * li});
  }
  return out;
}

namespace {

PredecessorMap invert(int r, std::vector<Transition> (*tau)(const Partition&)) {
  require_degree(r);
  PredecessorMap out;
  for (const Partition& nu : enumerate_partitions(r + 1)) out[nu];
  for (const Partition& lambda : enumerate_partitions(r))
    for (Transition& t : tau(lambda)) out[t.target].push_back({lambda, std::move(t.coeff)});
  return out;
}

}  // namespace

PredecessorMap theta_plus(int r) { return invert(r, &tau_plus); }
PredecessorMap theta_minus(int r) { return invert(r, &tau_minus); }

std::map<Partition, BigInt> recurrence_coeffs(int r) {
  require_degree(r);
  std::map<Partition, BigInt> h{{Partition({1}), 1}};
  for (int s = 2; s < r; ++s) {
    const PredecessorMap plus = theta_plus(s);
    const PredecessorMap minus = theta_minus(s);
    std::map<Partition, BigInt> next;
    for (const Partition& nu : enumerate_partitions(s + 1)) {
      BigInt acc = 0;
      for (const Transition& t : plus.at(nu)) acc += h.at(t.target) * t.coeff;
      for (const Transition& t : minus.at(nu)) acc -= h.at(t.target) * t.coeff;
      next.emplace(nu, std::move(acc));
    }
    h = std::move(next);
  }
  return h;
}

}  // namespace mmse
