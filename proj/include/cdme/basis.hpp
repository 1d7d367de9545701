#pragma once

#include <functional>
#include <vector>

namespace cdme {

/// Cosine eigenbasis of -d^2/dx^2 on [0,1] with homogeneous Neumann
/// boundary conditions, under the orthonormal convention: mode 1 is the
/// constant function 1, mode k >= 2 is sqrt(2)*cos((k-1)*pi*x). The
/// eigenvalue of mode k is (k-1)^2 * pi^2.
///
/// Mode indices are 1-based throughout the public API; this matches the
/// coefficient conventions used everywhere else (mode_coeffs[k-1] pairs
/// with mode k). Immutable after construction.
class ModeBasis {
 public:
  explicit ModeBasis(int num_modes);

  int num_modes() const { return num_modes_; }

  /// Eigenvalue of mode k, k in [1, num_modes].
  double eigenvalue(int k) const;

  /// Value of mode k at x, k in [1, num_modes], x in [0,1].
  double eval(int k, double x) const;

  /// Second derivative of mode k at x (the differentiated cosine, not the
  /// eigenvalue relation).
  double eval_second_derivative(int k, double x) const;

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

 private:
  int num_modes_;
  std::vector<double> eigenvalues_;
};

ModeBasis make_basis(int num_modes);

double eval_mode(const ModeBasis& basis, int k, double x);

/// A creation rate function lambda_c >= 0 on [0,1], decomposed as
/// total_rate * density with density a probability density, together with
/// its projection onto the first N basis modes.
struct CreationRate {
  /// Integral of the rate over [0,1].
  double total_rate = 0.0;
  /// <rate, xi_k> for k = 1..N (mode_coeffs[0] always equals total_rate).
  std::vector<double> mode_coeffs;
  /// rate(x) / total_rate; identically zero when total_rate == 0.
  std::function<double(double)> density;
  /// Upper bound of the density used by rejection sampling.
  double density_sup = 0.0;
  /// Exact fast path: density is the constant 1.
  bool uniform = false;
};

/// Projects an arbitrary non-negative rate function onto the basis by
/// Gauss-Legendre quadrature. Requires quad_points >= 2*num_modes.
/// Throws std::invalid_argument if a quadrature sample of rate_fn is
/// negative.
CreationRate project_creation_rate(const ModeBasis& basis,
                                   const std::function<double(double)>& rate_fn,
                                   int quad_points);

/// Rate identically equal to total_rate (uniform birth density), with
/// exact coefficients (total_rate, 0, ..., 0).
CreationRate constant_creation_rate(const ModeBasis& basis, double total_rate);

/// Rate given as a finite series sum_k coeffs[k-1] * xi_k. Validates
/// non-negativity on the quadrature grid.
CreationRate cosine_creation_rate(const ModeBasis& basis,
                                  const std::vector<double>& coeffs,
                                  int quad_points);

/// Rate tabulated at sorted abscissae with linear interpolation between
/// them and constant extension at the ends.
CreationRate tabulated_creation_rate(const ModeBasis& basis,
                                     const std::vector<double>& xs,
                                     const std::vector<double>& values,
                                     int quad_points);

}  // namespace cdme
