#include "cdme/coeff_state.hpp"

#include <algorithm>
#include <stdexcept>

namespace cdme {

CoeffState vacuum_state(SpacePtr space) {
  CoeffState state;
  state.space = std::move(space);
  state.coeffs.assign(state.space->size(), 0.0);
  state.coeffs[0] = 1.0;  // index 0 is the zero multi-index by construction
  state.time = 0.0;
  return state;
}

std::vector<double> number_law(const CoeffState& state) {
  const auto& space = *state.space;
  std::vector<double> law(space.max_degree() + 1, 0.0);
  MultiIndex beta(space.num_modes(), 0);
  for (int n = 0; n <= space.max_degree(); ++n) {
    beta[0] = n;
    const auto i = space.find(beta);
    law[n] = state.coeffs[static_cast<std::size_t>(i)];
  }
  return law;
}

std::vector<double> intensity_coeffs(const CoeffState& state) {
  const auto& space = *state.space;
  const int N = space.num_modes();
  const int M = space.max_degree();
  std::vector<double> m(N, 0.0);
  MultiIndex beta(N, 0);
  for (int n = 1; n <= M; ++n) {
    beta.assign(N, 0);
    beta[0] = n;
    m[0] += n * state.coeffs[static_cast<std::size_t>(space.find(beta))];
    for (int k = 2; k <= N; ++k) {
      beta.assign(N, 0);
      beta[0] = n - 1;
      beta[k - 1] = 1;
      m[k - 1] += state.coeffs[static_cast<std::size_t>(space.find(beta))];
    }
  }
  return m;
}

double eval_intensity(const CoeffState& state, const ModeBasis& basis, double x) {
  const std::vector<double> m = intensity_coeffs(state);
  double v = 0.0;
  for (int k = 1; k <= basis.num_modes(); ++k) {
    v += m[k - 1] * basis.eval(k, x);
  }
  return v;
}

double eval_kernel(const CoeffState& state, const ModeBasis& basis,
                   std::span<const double> points) {
  const auto& space = *state.space;
  const int n = static_cast<int>(points.size());
  const int N = space.num_modes();
  if (n > space.max_degree()) {
    throw std::domain_error("eval_kernel: particle count exceeds max_degree");
  }
  if (n > kKernelArityLimit) {
    throw std::domain_error("eval_kernel: particle count exceeds the symmetrization limit");
  }
  if (n == 0) return state.coeffs[0];

  // E[l][k-1] = xi_k(points[l]).
  std::vector<std::vector<double>> E(n, std::vector<double>(N));
  for (int l = 0; l < n; ++l) {
    for (int k = 1; k <= N; ++k) E[l][k - 1] = basis.eval(k, points[l]);
  }

  const double inv_nfact = 1.0 / factorial(n);
  double result = 0.0;
  std::vector<int> tuple;  // 0-based mode slots, sorted ascending
  for (std::size_t i = space.degree_begin(n); i < space.degree_end(n); ++i) {
    const double c = state.coeffs[i];
    if (c == 0.0) continue;
    const MultiIndex& alpha = space.at(i);
    tuple.clear();
    for (int k = 0; k < N; ++k) {
      tuple.insert(tuple.end(), alpha[k], k);
    }
    double sym = 0.0;
    do {
      double prod = 1.0;
      for (int l = 0; l < n; ++l) prod *= E[l][tuple[l]];
      sym += prod;
    } while (std::next_permutation(tuple.begin(), tuple.end()));
    result += multi_factorial(alpha) * inv_nfact * c * sym;
  }
  return result;
}

double mass(const CoeffState& state) {
  const std::vector<double> law = number_law(state);
  double total = 0.0;
  for (double p : law) total += p;
  return total;
}

nlohmann::json state_to_json(const CoeffState& state) {
  return nlohmann::json{{"N", state.space->num_modes()},
                        {"M", state.space->max_degree()},
                        {"t", state.time},
                        {"enumeration", "grlex"},
                        {"coeffs", state.coeffs}};
}

CoeffState state_from_json(const nlohmann::json& j) {
  if (j.at("enumeration").get<std::string>() != "grlex") {
    throw std::invalid_argument("state_from_json: unsupported enumeration order");
  }
  CoeffState state;
  state.space = make_space(j.at("N").get<int>(), j.at("M").get<int>());
  state.coeffs = j.at("coeffs").get<std::vector<double>>();
  if (state.coeffs.size() != state.space->size()) {
    throw std::invalid_argument("state_from_json: coefficient count does not match C(N+M,N)");
  }
  state.time = j.at("t").get<double>();
  return state;
}

}  // namespace cdme
