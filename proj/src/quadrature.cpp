#include "cdme/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cdme {

double QuadratureRule::integrate(const std::function<double(double)>& fn) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum += weights[i] * fn(nodes[i]);
  }
  return sum;
}

QuadratureRule gauss_legendre(int num_points) {
  if (num_points < 1) {
    throw std::invalid_argument("gauss_legendre: num_points must be >= 1");
  }
  const int n = num_points;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  // Roots of the Legendre polynomial P_n on [-1,1] by Newton iteration,
  // then mapped affinely onto [0,1].
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    const double w = 1.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureRule gauss_hermite(int num_points) {
  if (num_points < 1) {
    throw std::invalid_argument("gauss_hermite: num_points must be >= 1");
  }
  const int n = num_points;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-14) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

double quadrature(const std::function<double(double)>& fn, int num_points) {
  if (num_points < 2) {
    throw std::invalid_argument("quadrature: num_points must be >= 2");
  }
  return gauss_legendre(num_points).integrate(fn);
}

}  // namespace cdme
