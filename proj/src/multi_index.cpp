#include "cdme/multi_index.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace cdme {

int degree(const MultiIndex& beta) {
  return std::accumulate(beta.begin(), beta.end(), 0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > 9.2e18) {
      throw std::overflow_error("binomial: result too large");
    }
  }
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double multi_factorial(const MultiIndex& beta) {
  double r = 1.0;
  for (int b : beta) r *= factorial(b);
  return r;
}

std::uint64_t MultiIndexSpace::hash_index(const MultiIndex& beta) {
  // FNV-1a over the exponents.
  std::uint64_t h = 1469598103934665603ull;
  for (int b : beta) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

void enumerate_degree(int remaining, int slot, MultiIndex& work,
                      std::vector<MultiIndex>& out) {
  if (slot == static_cast<int>(work.size()) - 1) {
    work[slot] = remaining;
    out.push_back(work);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    work[slot] = a;
    enumerate_degree(remaining - a, slot + 1, work, out);
  }
  work[slot] = 0;
}

}  // namespace

MultiIndexSpace::MultiIndexSpace(int num_modes, int max_degree, std::size_t size_cap)
    : num_modes_(num_modes), max_degree_(max_degree) {
  if (num_modes < 1) {
    throw std::invalid_argument("MultiIndexSpace: num_modes must be >= 1");
  }
  if (max_degree < 0) {
    throw std::invalid_argument("MultiIndexSpace: max_degree must be >= 0");
  }
  const double cardinality = binomial(num_modes + max_degree, num_modes);
  if (cardinality > static_cast<double>(size_cap)) {
    throw std::length_error("MultiIndexSpace: C(N+M,N) = " + std::to_string(cardinality) +
                            " exceeds the size cap " + std::to_string(size_cap));
  }

  indices_.reserve(static_cast<std::size_t>(cardinality));
  degree_offsets_.resize(max_degree + 2);
  MultiIndex work(num_modes, 0);
  for (int d = 0; d <= max_degree; ++d) {
    degree_offsets_[d] = indices_.size();
    enumerate_degree(d, 0, work, indices_);
  }
  degree_offsets_[max_degree + 1] = indices_.size();

  lookup_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    lookup_[hash_index(indices_[i])].push_back(static_cast<std::uint32_t>(i));
  }
}

std::ptrdiff_t MultiIndexSpace::find(const MultiIndex& beta) const {
  if (static_cast<int>(beta.size()) != num_modes_) return -1;
  const auto it = lookup_.find(hash_index(beta));
  if (it == lookup_.end()) return -1;
  for (std::uint32_t i : it->second) {
    if (indices_[i] == beta) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

SpacePtr make_space(int num_modes, int max_degree, std::size_t size_cap) {
  return std::make_shared<MultiIndexSpace>(num_modes, max_degree, size_cap);
}

}  // namespace cdme
