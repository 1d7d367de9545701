#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

namespace cdme {

/// Exponent vector over spectral modes; slot j holds the exponent of mode
/// j+1. The degree |beta| is the particle-number level the index lives on.
using MultiIndex = std::vector<int>;

int degree(const MultiIndex& beta);

/// Complete enumeration of { beta in N0^N : |beta| <= M } in graded
/// lexicographic order: ascending degree, and within a degree descending
/// lexicographic (so (2,0) precedes (1,1) precedes (0,2)). The enumeration
/// is the coordinate system for coefficient vectors and generator matrices.
class MultiIndexSpace {
 public:
  static constexpr std::size_t kDefaultSizeCap = 2'000'000;

  MultiIndexSpace(int num_modes, int max_degree,
                  std::size_t size_cap = kDefaultSizeCap);

  int num_modes() const { return num_modes_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& at(std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  /// Flat offset of beta, or -1 when beta is not in the space.
  std::ptrdiff_t find(const MultiIndex& beta) const;

  /// Offset of the first index of degree d (degrees are contiguous).
  std::size_t degree_begin(int d) const { return degree_offsets_[d]; }
  std::size_t degree_end(int d) const { return degree_offsets_[d + 1]; }

 private:
  int num_modes_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> degree_offsets_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> lookup_;

  static std::uint64_t hash_index(const MultiIndex& beta);
};

using SpacePtr = std::shared_ptr<MultiIndexSpace>;

SpacePtr make_space(int num_modes, int max_degree,
                    std::size_t size_cap = MultiIndexSpace::kDefaultSizeCap);

/// C(n, k) as double; throws when the result would exceed 2^63.
double binomial(int n, int k);

/// Product of component factorials, as double.
double multi_factorial(const MultiIndex& beta);

double factorial(int n);

}  // namespace cdme
