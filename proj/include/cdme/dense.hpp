#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cdme {

/// Row-major dense matrix, just big enough for desk-scale exponentials
/// and stationary solves.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  DenseMatrix& operator*=(double s);
  DenseMatrix& operator+=(const DenseMatrix& other);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);

/// Maximum absolute column sum.
double norm_one(const DenseMatrix& a);

struct LuFactors {
  DenseMatrix lu;
  std::vector<int> perm;
};

/// LU with partial pivoting; throws std::runtime_error on a numerically
/// singular pivot.
LuFactors lu_factor(DenseMatrix a);

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b);

/// Solves A X = B for the matrix B, overwriting it.
void lu_solve_inplace(const LuFactors& f, DenseMatrix& b);

/// Matrix exponential by Pade(13) scaling and squaring.
DenseMatrix expm(const DenseMatrix& a);

}  // namespace cdme
