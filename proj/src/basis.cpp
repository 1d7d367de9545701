#include "cdme/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cdme/quadrature.hpp"

namespace cdme {

namespace {
constexpr double kPi = std::numbers::pi;
// Safety factor applied to the grid maximum when bounding a density from
// above for rejection sampling.
constexpr double kSupSafety = 1.01;
}  // namespace

ModeBasis::ModeBasis(int num_modes) : num_modes_(num_modes) {
  if (num_modes < 1) {
    throw std::invalid_argument("ModeBasis: num_modes must be >= 1");
  }
  eigenvalues_.resize(num_modes_);
  for (int k = 1; k <= num_modes_; ++k) {
    eigenvalues_[k - 1] = static_cast<double>(k - 1) * (k - 1) * kPi * kPi;
  }
}

double ModeBasis::eigenvalue(int k) const {
  if (k < 1 || k > num_modes_) {
    throw std::domain_error("ModeBasis::eigenvalue: mode index out of range");
  }
  return eigenvalues_[k - 1];
}

double ModeBasis::eval(int k, double x) const {
  if (k < 1 || k > num_modes_) {
    throw std::domain_error("ModeBasis::eval: mode index out of range");
  }
  if (x < 0.0 || x > 1.0) {
    throw std::domain_error("ModeBasis::eval: x outside [0,1]");
  }
  if (k == 1) return 1.0;
  return std::numbers::sqrt2 * std::cos((k - 1) * kPi * x);
}

double ModeBasis::eval_second_derivative(int k, double x) const {
  if (k < 1 || k > num_modes_) {
    throw std::domain_error("ModeBasis::eval_second_derivative: mode index out of range");
  }
  if (k == 1) return 0.0;
  const double freq = (k - 1) * kPi;
  return -freq * freq * std::numbers::sqrt2 * std::cos(freq * x);
}

ModeBasis make_basis(int num_modes) { return ModeBasis(num_modes); }

double eval_mode(const ModeBasis& basis, int k, double x) {
  return basis.eval(k, x);
}

CreationRate project_creation_rate(const ModeBasis& basis,
                                   const std::function<double(double)>& rate_fn,
                                   int quad_points) {
  const int n = basis.num_modes();
  if (quad_points < 2 * n) {
    throw std::invalid_argument("project_creation_rate: quad_points must be >= 2*num_modes");
  }
  const QuadratureRule rule = gauss_legendre(quad_points);

  std::vector<double> samples(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    samples[i] = rate_fn(rule.nodes[i]);
    if (samples[i] < 0.0) {
      throw std::invalid_argument("project_creation_rate: rate function is negative at x=" +
                                  std::to_string(rule.nodes[i]));
    }
  }

  CreationRate out;
  out.mode_coeffs.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i] * samples[i];
    for (int k = 1; k <= n; ++k) {
      out.mode_coeffs[k - 1] += rule.weights[i] * samples[i] * basis.eval(k, rule.nodes[i]);
    }
  }
  out.total_rate = total;

  double grid_max = std::max(rate_fn(0.0), rate_fn(1.0));
  for (double s : samples) grid_max = std::max(grid_max, s);
  if (total > 0.0) {
    out.density = [rate_fn, total](double x) { return rate_fn(x) / total; };
    out.density_sup = kSupSafety * grid_max / total;
  } else {
    out.density = [](double) { return 0.0; };
    out.density_sup = 0.0;
  }
  return out;
}

CreationRate constant_creation_rate(const ModeBasis& basis, double total_rate) {
  if (total_rate < 0.0) {
    throw std::invalid_argument("constant_creation_rate: rate must be non-negative");
  }
  CreationRate out;
  out.total_rate = total_rate;
  out.mode_coeffs.assign(basis.num_modes(), 0.0);
  out.mode_coeffs[0] = total_rate;
  out.density = [](double) { return 1.0; };
  out.density_sup = 1.0;
  out.uniform = true;
  return out;
}

CreationRate cosine_creation_rate(const ModeBasis& basis,
                                  const std::vector<double>& coeffs,
                                  int quad_points) {
  if (coeffs.empty()) {
    throw std::invalid_argument("cosine_creation_rate: need at least the constant coefficient");
  }
  auto rate_fn = [coeffs](double x) {
    double v = coeffs[0];
    for (std::size_t k = 2; k <= coeffs.size(); ++k) {
      v += coeffs[k - 1] * std::numbers::sqrt2 * std::cos((k - 1) * kPi * x);
    }
    return v;
  };
  return project_creation_rate(basis, rate_fn, quad_points);
}

CreationRate tabulated_creation_rate(const ModeBasis& basis,
                                     const std::vector<double>& xs,
                                     const std::vector<double>& values,
                                     int quad_points) {
  if (xs.size() != values.size() || xs.size() < 2) {
    throw std::invalid_argument("tabulated_creation_rate: need >= 2 matching (x, value) pairs");
  }
  if (!std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument("tabulated_creation_rate: abscissae must be sorted");
  }
  auto rate_fn = [xs, values](double x) {
    if (x <= xs.front()) return values.front();
    if (x >= xs.back()) return values.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - t) * values[j - 1] + t * values[j];
  };
  return project_creation_rate(basis, rate_fn, quad_points);
}

}  // namespace cdme
