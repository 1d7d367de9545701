#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "cdme/basis.hpp"
#include "cdme/multi_index.hpp"

namespace cdme {

/// Coefficient vector of the generating function over a truncated
/// multi-index space; carries the full projected kernel hierarchy. Plain
/// value type: copy freely, mutate only through the integrator.
struct CoeffState {
  SpacePtr space;
  std::vector<double> coeffs;
  double time = 0.0;
};

/// Empty-system state: unit coefficient on the zero index, all others 0.
CoeffState vacuum_state(SpacePtr space);

/// Particle-number law P(n) for n = 0..M: the coefficients on the pure
/// mode-1 indices. Values can go slightly negative from truncation or
/// rounding; they are reported as-is.
std::vector<double> number_law(const CoeffState& state);

/// Cosine coefficients m_k of the one-particle intensity
/// m(t,x) = sum_k m_k xi_k(x):
///   m_1 = sum_n n * c_{n e1},   m_k = sum_n c_{e_k + (n-1) e1}  (k >= 2).
std::vector<double> intensity_coeffs(const CoeffState& state);

/// m(t,x) reconstructed from the intensity coefficients.
double eval_intensity(const CoeffState& state, const ModeBasis& basis, double x);

/// Arity cap for kernel evaluation; the symmetrization cost is
/// N^n * n and becomes pointless beyond a handful of particles.
inline constexpr int kKernelArityLimit = 6;

/// Projected n-particle kernel at (points[0], ..., points[n-1]):
///   (1/n!) sum over ordered mode tuples (j1..jn) of
///   type(j)! * c_{type(j)} * xi_{j1}(x1) ... xi_{jn}(xn),
/// evaluated by iterating multi-indices of degree n and symmetrizing.
/// n is points.size(); requires n <= max_degree and n <= kKernelArityLimit.
double eval_kernel(const CoeffState& state, const ModeBasis& basis,
                   std::span<const double> points);

/// Total probability mass sum_n P(n); equals 1 for exact dynamics, and
/// 1 minus the truncation leakage for a finite degree cap.
double mass(const CoeffState& state);

/// Serialization to the documented snapshot layout
/// {"N":..,"M":..,"t":..,"enumeration":"grlex","coeffs":[..]}.
nlohmann::json state_to_json(const CoeffState& state);
CoeffState state_from_json(const nlohmann::json& j);

}  // namespace cdme
