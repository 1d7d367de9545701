#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdme/basis.hpp"
#include "cdme/dense.hpp"

namespace cdme {

/// Classical particle-number master equation for birth(+1)/pair-death(-2),
/// truncated at max_count. This is exactly the pure mode-1 slice of the
/// hierarchy generator.
struct CmeSystem {
  int max_count = 0;
  double creation_total = 0.0;
  double annihilation_rate = 0.0;
  DenseMatrix matrix;  // (M+1)x(M+1), dP/dt = matrix * P
};

CmeSystem cme_generator(int max_count, double creation_total, double annihilation_rate);

/// Stationary law of the truncated chain: normalized null vector of the
/// conservative closure (no birth flux out of the top state). Requires
/// positive rates so the chain is irreducible.
std::vector<double> cme_stationary(const CmeSystem& sys);

/// Law at each output time starting from p0 (vacuum when p0 empty),
/// via the dense matrix exponential.
std::vector<std::vector<double>> cme_evolve(const CmeSystem& sys,
                                            const std::vector<double>& times,
                                            std::vector<double> p0 = {});

/// Poisson(gamma*t) law truncated to 0..max_count; the exact number law
/// of the creation-only process.
std::vector<double> creation_only_law(double gamma, double t, int max_count);

/// Modewise closed form of the one-particle intensity for the
/// creation-only process: m_1 = c_1 t, m_k = c_k (1 - e^{-alpha_k t}) / alpha_k.
std::vector<double> creation_only_intensity(const CreationRate& creation,
                                            const ModeBasis& basis, double t);

/// Probabilists' Hermite polynomial He_n(z).
double hermite_poly(int n, double z);

/// Gaussian-smooths He_n with a 64-node Gauss-Hermite rule and returns the
/// largest deviation from z^n over the grid. The smoothing maps Hermite
/// polynomials to monomials exactly, so the value measures only quadrature
/// and rounding error. Requires n <= 10.
double weierstrass_transfer_check(int degree, std::span<const double> grid);

struct ComparisonComponent {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::string metric;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<ComparisonComponent> components;
};

nlohmann::json report_to_json(const ComparisonReport& report);

/// Total-variation distance between two laws of equal length; when
/// standard errors are supplied, also per-component z-scores with a
/// 3-sigma pass rule (overall pass then requires both gates).
ComparisonReport compare_number_laws(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> stderrs = {},
                                     double tv_tolerance = 0.0, double z_limit = 3.0);

/// CDF at x of the reflected Brownian endpoint started at y0, elapsed time
/// t (the Neumann heat kernel cosine series, integrated).
double neumann_heat_cdf(double x, double y0, double t, int max_terms = 64);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace cdme
