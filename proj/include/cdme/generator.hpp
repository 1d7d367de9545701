#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cdme/basis.hpp"
#include "cdme/coeff_state.hpp"
#include "cdme/dense.hpp"
#include "cdme/multi_index.hpp"

namespace cdme {

struct GeneratorParams {
  double creation_total = 0.0;            // integral of the creation rate
  std::vector<double> creation_coeffs;    // projected rate, mode k at [k-1]
  double annihilation_rate = 0.0;         // constant pairwise rate
  std::vector<double> eigenvalues;        // diffusion eigenvalue of mode k at [k-1]
};

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  double value;
};

/// Sparse linear operator L with dc/dt = L c over a multi-index space.
/// Immutable after assembly; entries are stored row-compressed in
/// (row, col) order so traversal and comparisons are deterministic.
class GeneratorMatrix {
 public:
  GeneratorMatrix(SpacePtr space, GeneratorParams params, std::vector<Triplet> entries);

  const MultiIndexSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const GeneratorParams& params() const { return params_; }
  std::size_t dim() const { return space_->size(); }
  std::size_t nnz() const { return values_.size(); }

  /// Entry L[row][col]; zero when not stored.
  double entry(std::size_t row, std::size_t col) const;

  /// y = L x.
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(const std::vector<double>& x) const;

  double max_abs_diagonal() const;

  DenseMatrix to_dense() const;

  /// Coordinate-list text: one "row col value" line per stored entry,
  /// in (row, col) order.
  void write_coo(std::ostream& os) const;

  template <typename F>
  void for_each_entry(F&& fn) const {
    for (std::size_t r = 0; r + 1 < row_ptr_.size(); ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        fn(r, static_cast<std::size_t>(cols_[p]), values_[p]);
      }
    }
  }

 private:
  SpacePtr space_;
  GeneratorParams params_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> values_;
};

/// Assembles L from the monomial-coefficient recursion of the projected
/// generating function: for row beta,
///   (L c)_beta = -(sum_k alpha_k beta_k) c_beta
///              + (lambda_d/2)(beta_1+2)(beta_1+1) c_{beta+2e1}
///              - (lambda_d/2)|beta|(|beta|-1) c_beta
///              + sum_k c_k c_{beta-e_k}
///              - gamma c_beta,
/// with indices outside the truncated space read as zero.
GeneratorMatrix assemble_from_genfun(SpacePtr space, const ModeBasis& basis,
                                     const CreationRate& creation,
                                     double annihilation_rate);

/// Assembles the same operator by projecting each term of the kernel
/// hierarchy equation (diffusion, pair-annihilation gain/loss, creation
/// gain/loss) onto the tensor cosine basis with Gauss-Legendre quadrature
/// and converting symmetric-kernel coefficients to multi-index
/// coefficients. Entirely independent bookkeeping from
/// assemble_from_genfun; the two must agree entrywise.
///
/// Cost grows with the symmetrization combinatorics; intended for the
/// cross-validation grids (small N, M), not production solves.
GeneratorMatrix assemble_from_cdme(SpacePtr space, const ModeBasis& basis,
                                   const CreationRate& creation,
                                   double annihilation_rate, int quad_points);

struct IntegratorConfig {
  enum class Method { rk4, expm };
  Method method = Method::expm;
  double dt = 1e-3;                  // rk4 step ceiling
  std::vector<double> output_times;  // non-negative, strictly increasing
};

/// Classical fourth-order step for dc/dt = L c.
std::vector<double> rk4_step(std::span<const double> c, const GeneratorMatrix& L, double dt);

/// Propagates the state to each output time. `expm` applies the dense
/// matrix exponential per distinct time gap (exact up to rounding); `rk4`
/// takes fixed steps of at most cfg.dt within each gap. Throws
/// std::runtime_error with a suggested step size when an rk4 trajectory
/// blows up.
std::vector<CoeffState> evolve(const CoeffState& state, const GeneratorMatrix& L,
                               const IntegratorConfig& cfg);

struct EntryDifference {
  double rel_error = 0.0;  // |a-b| / max(1, |a|, |b|)
  std::size_t row = 0;
  std::size_t col = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Worst unit-floored relative difference over the union of the two
/// sparsity patterns.
EntryDifference max_entry_difference(const GeneratorMatrix& a, const GeneratorMatrix& b);

}  // namespace cdme
