#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cdme/basis.hpp"
#include "cdme/coeff_state.hpp"
#include "cdme/quadrature.hpp"

namespace testutil {

// Small deterministic generator for test instances (independent of the
// library's RNG so the two cannot mask each other).
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// Brute-force tensor-product integral of the reconstructed n-particle
// kernel over [0,1]^n. Independent oracle for the number-law extraction.
inline double integrate_kernel(const cdme::CoeffState& state, const cdme::ModeBasis& basis,
                               int n, int points_per_axis = 24) {
  const cdme::QuadratureRule rule = cdme::gauss_legendre(points_per_axis);
  if (n == 0) return cdme::eval_kernel(state, basis, {});
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    total += w * cdme::eval_kernel(state, basis, x);
    int carry = n - 1;
    while (carry >= 0 && ++idx[carry] == static_cast<int>(rule.nodes.size())) {
      idx[carry] = 0;
      --carry;
    }
    if (carry < 0) break;
  }
  return total;
}

// n-weighted marginal of the kernel hierarchy at a point: the independent
// route to the one-particle intensity.
inline double intensity_by_marginals(const cdme::CoeffState& state,
                                     const cdme::ModeBasis& basis, double x_eval,
                                     int points_per_axis = 24) {
  const cdme::QuadratureRule rule = cdme::gauss_legendre(points_per_axis);
  const int max_deg = state.space->max_degree();
  double total = 0.0;
  for (int n = 1; n <= std::min(max_deg, 3); ++n) {
    // integrate eval_kernel(x_eval, y_2..y_n) over the y's
    std::vector<int> idx(n - 1, 0);
    std::vector<double> pt(n);
    pt[0] = x_eval;
    double marginal = 0.0;
    if (n == 1) {
      marginal = cdme::eval_kernel(state, basis, pt);
    } else {
      while (true) {
        double w = 1.0;
        for (int i = 0; i < n - 1; ++i) {
          pt[i + 1] = rule.nodes[idx[i]];
          w *= rule.weights[idx[i]];
        }
        marginal += w * cdme::eval_kernel(state, basis, pt);
        int carry = n - 2;
        while (carry >= 0 && ++idx[carry] == static_cast<int>(rule.nodes.size())) {
          idx[carry] = 0;
          --carry;
        }
        if (carry < 0) break;
      }
    }
    total += n * marginal;
  }
  return total;
}

}  // namespace testutil
