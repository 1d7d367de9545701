#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cdme/analysis.hpp"
#include "cdme/generator.hpp"
#include "cdme/quadrature.hpp"
#include "test_util.hpp"

using namespace cdme;
using std::numbers::pi;

TEST_CASE("cme generator entries") {
  const double gamma = 0.4, lam = 2.0;
  const CmeSystem sys = cme_generator(5, gamma, lam);
  CHECK(sys.matrix(0, 2) == doctest::Approx(lam).epsilon(1e-15));  // (n+2)(n+1)/2 at n=0
  CHECK(sys.matrix(1, 3) == doctest::Approx(3.0 * lam).epsilon(1e-15));
  CHECK(sys.matrix(3, 2) == gamma);
  for (int n = 0; n <= 5; ++n) {
    CHECK(sys.matrix(n, n) == doctest::Approx(-gamma - 0.5 * lam * n * (n - 1)).epsilon(1e-15));
  }
  // columns conserve probability except the truncation column
  for (int c = 0; c <= 5; ++c) {
    double sum = 0.0;
    for (int r = 0; r <= 5; ++r) sum += sys.matrix(r, c);
    if (c == 5) {
      CHECK(sum == doctest::Approx(-gamma).epsilon(1e-13));
    } else {
      CHECK(std::abs(sum) < 1e-13);
    }
  }
  CHECK_THROWS_AS(cme_generator(-1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cme_generator(3, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pure annihilation preserves parity of the support") {
  const CmeSystem sys = cme_generator(6, 0.0, 1.0);
  std::vector<double> p0(7, 0.0);
  p0[4] = 1.0;
  const auto laws = cme_evolve(sys, {0.5, 2.0}, p0);
  for (const auto& law : laws) {
    for (int n = 1; n <= 5; n += 2) {
      CHECK(std::abs(law[n]) < 1e-16);
    }
    CHECK(law[0] + law[2] + law[4] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cme matrix equals the hierarchy slice exactly") {
  const double gamma = 0.8, lam = 1.7;
  const int M = 6, N = 2;
  const CmeSystem sys = cme_generator(M, gamma, lam);
  const ModeBasis basis = make_basis(N);
  const SpacePtr space = make_space(N, M);
  const GeneratorMatrix L =
      assemble_from_genfun(space, basis, constant_creation_rate(basis, gamma), lam);
  MultiIndex beta(N, 0);
  std::vector<std::size_t> slice(M + 1);
  for (int n = 0; n <= M; ++n) {
    beta[0] = n;
    slice[n] = static_cast<std::size_t>(space->find(beta));
  }
  for (int r = 0; r <= M; ++r) {
    for (int c = 0; c <= M; ++c) {
      CHECK(L.entry(slice[r], slice[c]) == sys.matrix(r, c));  // bitwise equal
    }
  }
}

TEST_CASE("stationary law of the truncated chain") {
  const CmeSystem sys = cme_generator(16, 1.0, 1.0);
  const std::vector<double> stat = cme_stationary(sys);

  double total = 0.0;
  for (double p : stat) {
    CHECK(p > -1e-15);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

  // residual of the conservative closure
  DenseMatrix closed = sys.matrix;
  closed(16, 16) += sys.creation_total;
  const std::vector<double> residual = matvec(closed, stat);
  for (double r : residual) CHECK(std::abs(r) < 1e-10);
  // the leaky matrix only differs by the top-state tail
  const std::vector<double> leaky = matvec(sys.matrix, stat);
  for (double r : leaky) CHECK(std::abs(r) < 1e-10);

  CHECK_THROWS_AS(cme_stationary(cme_generator(4, 0.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(cme_stationary(cme_generator(4, 1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("hierarchy converges to the stationary law") {
  const double gamma = 1.0, lam = 1.0;
  const int M = 16;
  const CmeSystem sys = cme_generator(M, gamma, lam);
  const std::vector<double> stat = cme_stationary(sys);

  const ModeBasis basis = make_basis(1);
  const SpacePtr space = make_space(1, M);
  const GeneratorMatrix L =
      assemble_from_genfun(space, basis, constant_creation_rate(basis, gamma), lam);
  IntegratorConfig cfg;
  cfg.method = IntegratorConfig::Method::expm;
  cfg.output_times = {20.0 / std::min(gamma, lam)};
  const std::vector<double> law = number_law(evolve(vacuum_state(space), L, cfg).front());

  double tv = 0.0;
  for (std::size_t n = 0; n < law.size(); ++n) tv += std::abs(law[n] - stat[n]);
  CHECK(0.5 * tv < 1e-6);
}

TEST_CASE("stationary mean grows with the birth/death ratio") {
  double prev_mean = -1.0;
  for (double gamma : {0.5, 1.0, 2.0, 4.0}) {
    const std::vector<double> stat = cme_stationary(cme_generator(30, gamma, 1.0));
    double mean = 0.0;
    for (std::size_t n = 0; n < stat.size(); ++n) mean += n * stat[n];
    CHECK(mean > prev_mean);
    prev_mean = mean;
  }
}

TEST_CASE("creation-only law oracle") {
  const std::vector<double> law = creation_only_law(1.0, 1.0, 8);
  CHECK(law[0] == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(law[1] == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(law[2] == doctest::Approx(0.36787944117144233 / 2.0).epsilon(1e-15));

  const std::vector<double> frozen = creation_only_law(2.0, 0.0, 4);
  CHECK(frozen[0] == 1.0);
  for (int n = 1; n <= 4; ++n) CHECK(frozen[n] == 0.0);
}

TEST_CASE("creation-only intensity oracle") {
  const ModeBasis basis = make_basis(2);
  CreationRate rate;
  rate.total_rate = 1.0;
  rate.mode_coeffs = {1.0, 0.0};

  auto zero = creation_only_intensity(rate, basis, 0.0);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  auto flat = creation_only_intensity(rate, basis, 2.0);
  CHECK(flat[0] == 2.0);
  CHECK(flat[1] == 0.0);

  rate.mode_coeffs = {1.0, 1.0};
  auto late = creation_only_intensity(rate, basis, 100.0);
  CHECK(late[1] == doctest::Approx(0.10132118364233778).epsilon(1e-12));  // 1/pi^2
}

TEST_CASE("probabilists' hermite polynomials") {
  const double z = 1.3;
  CHECK(hermite_poly(0, z) == 1.0);
  CHECK(hermite_poly(1, z) == z);
  CHECK(hermite_poly(2, z) == doctest::Approx(z * z - 1.0).epsilon(1e-15));
  CHECK(hermite_poly(3, z) == doctest::Approx(z * z * z - 3.0 * z).epsilon(1e-15));
  CHECK(hermite_poly(4, z) ==
        doctest::Approx(z * z * z * z - 6.0 * z * z + 3.0).epsilon(1e-15));
}

TEST_CASE("gaussian smoothing turns hermite polynomials into monomials") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-2.0 + 4.0 * i / 40.0);

  CHECK(weierstrass_transfer_check(0, grid) < 1e-14);
  CHECK(weierstrass_transfer_check(2, grid) < 1e-12);
  for (int n = 0; n <= 10; ++n) {
    CHECK(weierstrass_transfer_check(n, grid) < 1e-8);
  }
  CHECK_THROWS_AS((void)weierstrass_transfer_check(11, grid), std::invalid_argument);
}

TEST_CASE("gauss-hermite rule integrates gaussian moments") {
  const QuadratureRule rule = gauss_hermite(32);
  double total = 0.0, second = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i];
    second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  }
  CHECK(total == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
  CHECK(second == doctest::Approx(0.5 * std::sqrt(pi)).epsilon(1e-12));
}

TEST_CASE("number-law comparisons") {
  const std::vector<double> a = {1.0, 0.0};
  CHECK(compare_number_laws(a, a).value == 0.0);

  const std::vector<double> b = {0.0, 1.0};
  const ComparisonReport tv = compare_number_laws(a, b, {}, 0.5);
  CHECK(tv.value == 1.0);
  CHECK_FALSE(tv.pass);

  const std::vector<double> x = {0.50, 0.50};
  const std::vector<double> y = {0.52, 0.48};
  const std::vector<double> se = {0.01, 0.01};
  const ComparisonReport zpass = compare_number_laws(x, y, se);
  CHECK(zpass.pass);
  CHECK(zpass.components.size() == 2);
  CHECK(zpass.components[0].value == doctest::Approx(2.0).epsilon(1e-12));

  const std::vector<double> tight = {0.004, 0.004};
  const ComparisonReport zfail = compare_number_laws(x, y, tight);
  CHECK_FALSE(zfail.pass);

  CHECK_THROWS_AS(compare_number_laws(a, std::vector<double>{1.0}), std::invalid_argument);

  const nlohmann::json j = report_to_json(zpass);
  CHECK(j.at("pass") == true);
  CHECK(j.at("components").size() == 2);
}

TEST_CASE("reflected heat-kernel cdf") {
  CHECK(neumann_heat_cdf(0.0, 0.5, 0.1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(neumann_heat_cdf(1.0, 0.5, 0.1) == doctest::Approx(1.0).epsilon(1e-14));
  // near-uniform in the long-time limit
  for (double x : {0.2, 0.5, 0.8}) {
    CHECK(neumann_heat_cdf(x, 0.3, 5.0) == doctest::Approx(x).epsilon(1e-10));
  }
  // oracle: numerically integrate the series density
  const double t = 0.1, y0 = 0.5;
  auto density = [&](double x) {
    double v = 1.0;
    for (int j = 1; j <= 64; ++j) {
      v += 2.0 * std::exp(-j * j * pi * pi * t) * std::cos(j * pi * x) * std::cos(j * pi * y0);
    }
    return v;
  };
  for (double x : {0.25, 0.5, 0.75}) {
    double integral = 0.0;
    const QuadratureRule rule = gauss_legendre(128);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double node = rule.nodes[i] * x;  // map [0,1] to [0,x]
      integral += rule.weights[i] * x * density(node);
    }
    CHECK(neumann_heat_cdf(x, y0, t) == doctest::Approx(integral).epsilon(1e-10));
  }
  CHECK_THROWS_AS(neumann_heat_cdf(0.5, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("kolmogorov-smirnov test behaves") {
  testutil::Lcg lcg(987);
  std::vector<double> uniform(20000);
  for (double& x : uniform) x = lcg.uniform();
  const KsResult good = ks_test(uniform, [](double x) { return x; });
  CHECK(good.p_value > 0.001);

  std::vector<double> skewed(20000);
  for (std::size_t i = 0; i < skewed.size(); ++i) skewed[i] = std::sqrt(lcg.uniform());
  const KsResult bad = ks_test(skewed, [](double x) { return x; });
  CHECK(bad.p_value < 1e-6);
  CHECK(bad.statistic > 0.1);

  CHECK_THROWS_AS(ks_test({}, [](double x) { return x; }), std::invalid_argument);
}
