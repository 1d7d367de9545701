#pragma once

#include <functional>
#include <vector>

namespace cdme {

/// Nodes and weights of a fixed quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& fn) const;
};

/// Gauss-Legendre rule with `num_points` nodes on [0,1]. Exact for
/// polynomials up to degree 2*num_points - 1; error decays spectrally
/// for smooth integrands.
QuadratureRule gauss_legendre(int num_points);

/// Gauss-Hermite rule for integrals of the form int f(y) exp(-y^2) dy
/// over the real line.
QuadratureRule gauss_hermite(int num_points);

/// Integral of fn over [0,1] with a Gauss-Legendre rule of `num_points`
/// nodes. Requires num_points >= 2.
double quadrature(const std::function<double(double)>& fn, int num_points);

}  // namespace cdme
