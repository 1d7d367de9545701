#include "cdme/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cdme/quadrature.hpp"

namespace cdme {

CmeSystem cme_generator(int max_count, double creation_total, double annihilation_rate) {
  if (max_count < 0) {
    throw std::invalid_argument("cme_generator: max_count must be >= 0");
  }
  if (creation_total < 0.0 || annihilation_rate < 0.0) {
    throw std::invalid_argument("cme_generator: rates must be >= 0");
  }
  CmeSystem sys{max_count, creation_total, annihilation_rate,
                DenseMatrix(max_count + 1, max_count + 1)};
  for (int n = 0; n <= max_count; ++n) {
    sys.matrix(n, n) = -creation_total - 0.5 * annihilation_rate * n * (n - 1);
    if (n >= 1) sys.matrix(n, n - 1) = creation_total;
    if (n + 2 <= max_count) {
      sys.matrix(n, n + 2) = 0.5 * annihilation_rate * (n + 2) * (n + 1);
    }
  }
  return sys;
}

std::vector<double> cme_stationary(const CmeSystem& sys) {
  if (sys.creation_total <= 0.0 || sys.annihilation_rate <= 0.0) {
    throw std::invalid_argument("cme_stationary: needs strictly positive rates");
  }
  const int dim = sys.max_count + 1;
  // Conservative closure: the top state keeps its probability instead of
  // feeding a level that was truncated away.
  DenseMatrix a = sys.matrix;
  a(sys.max_count, sys.max_count) += sys.creation_total;
  // Replace the first equation by the normalization constraint.
  for (int j = 0; j < dim; ++j) a(0, j) = 1.0;
  std::vector<double> rhs(dim, 0.0);
  rhs[0] = 1.0;
  const LuFactors f = lu_factor(std::move(a));
  return lu_solve(f, rhs);
}

std::vector<std::vector<double>> cme_evolve(const CmeSystem& sys,
                                            const std::vector<double>& times,
                                            std::vector<double> p0) {
  const int dim = sys.max_count + 1;
  if (p0.empty()) {
    p0.assign(dim, 0.0);
    p0[0] = 1.0;
  }
  if (static_cast<int>(p0.size()) != dim) {
    throw std::invalid_argument("cme_evolve: initial law size mismatch");
  }
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  double t_now = 0.0;
  std::vector<double> p = std::move(p0);
  for (double t : times) {
    if (t < t_now) {
      throw std::invalid_argument("cme_evolve: times must be increasing and >= 0");
    }
    if (t > t_now) {
      DenseMatrix scaled = sys.matrix;
      scaled *= (t - t_now);
      p = matvec(expm(scaled), p);
      t_now = t;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<double> creation_only_law(double gamma, double t, int max_count) {
  if (gamma < 0.0 || t < 0.0) {
    throw std::invalid_argument("creation_only_law: gamma and t must be >= 0");
  }
  std::vector<double> law(max_count + 1, 0.0);
  const double mean = gamma * t;
  double term = std::exp(-mean);  // n = 0
  for (int n = 0; n <= max_count; ++n) {
    law[n] = term;
    term *= mean / (n + 1);
  }
  return law;
}

std::vector<double> creation_only_intensity(const CreationRate& creation,
                                            const ModeBasis& basis, double t) {
  if (t < 0.0) {
    throw std::invalid_argument("creation_only_intensity: t must be >= 0");
  }
  const int N = basis.num_modes();
  std::vector<double> m(N, 0.0);
  m[0] = creation.mode_coeffs[0] * t;
  for (int k = 2; k <= N; ++k) {
    const double alpha = basis.eigenvalue(k);
    m[k - 1] = creation.mode_coeffs[k - 1] * (1.0 - std::exp(-alpha * t)) / alpha;
  }
  return m;
}

double hermite_poly(int n, double z) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = z;
  for (int j = 1; j < n; ++j) {
    const double next = z * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double weierstrass_transfer_check(int degree, std::span<const double> grid) {
  if (degree < 0 || degree > 10) {
    throw std::invalid_argument("weierstrass_transfer_check: degree must be in [0, 10]");
  }
  // Unit-variance Gaussian smoothing through the substitution y = z + sqrt(2)u:
  // smooth(f)(z) = pi^{-1/2} * int f(z + sqrt(2) u) e^{-u^2} du.
  const QuadratureRule rule = gauss_hermite(64);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  double worst = 0.0;
  for (double z : grid) {
    double smoothed = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      smoothed += rule.weights[i] * hermite_poly(degree, z + std::numbers::sqrt2 * rule.nodes[i]);
    }
    smoothed *= inv_sqrt_pi;
    worst = std::max(worst, std::abs(smoothed - std::pow(z, degree)));
  }
  return worst;
}

nlohmann::json report_to_json(const ComparisonReport& report) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& c : report.components) {
    components.push_back({{"label", c.label},
                          {"value", c.value},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
  }
  return {{"metric", report.metric},
          {"value", report.value},
          {"tolerance", report.tolerance},
          {"pass", report.pass},
          {"components", components}};
}

ComparisonReport compare_number_laws(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> stderrs, double tv_tolerance,
                                     double z_limit) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("compare_number_laws: length mismatch");
  }
  if (!stderrs.empty() && stderrs.size() != a.size()) {
    throw std::invalid_argument("compare_number_laws: stderr length mismatch");
  }
  ComparisonReport report;
  report.metric = "total_variation";
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  report.value = 0.5 * tv;
  report.tolerance = tv_tolerance;
  bool pass = tv_tolerance <= 0.0 || report.value <= tv_tolerance;

  if (!stderrs.empty()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double diff = std::abs(a[i] - b[i]);
      double z;
      if (stderrs[i] > 0.0) {
        z = diff / stderrs[i];
      } else {
        z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      const bool comp_pass = z <= z_limit;
      pass = pass && comp_pass;
      report.components.push_back({"n=" + std::to_string(i), z, z_limit, comp_pass});
    }
  }
  report.pass = pass;
  return report;
}

double neumann_heat_cdf(double x, double y0, double t, int max_terms) {
  if (t <= 0.0) {
    throw std::invalid_argument("neumann_heat_cdf: t must be > 0");
  }
  double f = x;
  for (int j = 1; j <= max_terms; ++j) {
    const double decay = std::exp(-static_cast<double>(j) * j * std::numbers::pi *
                                  std::numbers::pi * t);
    if (decay < 1e-18) break;
    f += decay * 2.0 * std::cos(j * std::numbers::pi * y0) *
         std::sin(j * std::numbers::pi * x) / (j * std::numbers::pi);
  }
  return f;
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_test: no samples");
  }
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return {d, std::clamp(2.0 * p, 0.0, 1.0)};
}

}  // namespace cdme
