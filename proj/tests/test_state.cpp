#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cdme/coeff_state.hpp"
#include "cdme/multi_index.hpp"
#include "test_util.hpp"

using namespace cdme;

namespace {

CoeffState state_with(SpacePtr space, const std::vector<std::pair<MultiIndex, double>>& entries) {
  CoeffState s = vacuum_state(space);
  s.coeffs[0] = 0.0;
  for (const auto& [beta, v] : entries) {
    s.coeffs[static_cast<std::size_t>(space->find(beta))] = v;
  }
  return s;
}

}  // namespace

TEST_CASE("graded-lex enumeration matches the expected orders") {
  const SpacePtr s13 = make_space(1, 3);
  REQUIRE(s13->size() == 4);
  for (int n = 0; n <= 3; ++n) CHECK(s13->at(n) == MultiIndex{n});

  const SpacePtr s22 = make_space(2, 2);
  REQUIRE(s22->size() == 6);
  const std::vector<MultiIndex> expected = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(s22->at(i) == expected[i]);

  CHECK(make_space(4, 12)->size() == 1820);  // C(16,4)
  CHECK(binomial(16, 4) == 1820.0);
}

TEST_CASE("lookup round-trips every index") {
  const SpacePtr space = make_space(3, 5);
  for (std::size_t i = 0; i < space->size(); ++i) {
    CHECK(space->find(space->at(i)) == static_cast<std::ptrdiff_t>(i));
  }
  CHECK(space->find({9, 9, 9}) == -1);
  CHECK(space->find({1, 1}) == -1);  // wrong arity
}

TEST_CASE("degree blocks are contiguous") {
  const SpacePtr space = make_space(3, 4);
  for (int d = 0; d <= 4; ++d) {
    for (std::size_t i = space->degree_begin(d); i < space->degree_end(d); ++i) {
      CHECK(degree(space->at(i)) == d);
    }
  }
}

TEST_CASE("size guard rejects oversized spaces") {
  CHECK_THROWS_AS(make_space(10, 30, 1000), std::length_error);
  CHECK_THROWS_AS(make_space(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_space(2, -1), std::invalid_argument);
}

TEST_CASE("vacuum state") {
  const SpacePtr space = make_space(3, 4);
  const CoeffState v = vacuum_state(space);
  const std::vector<double> law = number_law(v);
  CHECK(law[0] == 1.0);
  for (std::size_t n = 1; n < law.size(); ++n) CHECK(law[n] == 0.0);
  CHECK(mass(v) == 1.0);
  for (double m : intensity_coeffs(v)) CHECK(m == 0.0);
  CHECK(v.time == 0.0);
}

TEST_CASE("number law reads the pure mode-1 coefficients") {
  const SpacePtr space = make_space(2, 3);
  const ModeBasis basis = make_basis(2);

  const CoeffState s = state_with(space, {{{2, 0}, 0.3}});
  CHECK(number_law(s)[2] == 0.3);
  // independent oracle: integrate the reconstructed 2-particle kernel
  CHECK(testutil::integrate_kernel(s, basis, 2) == doctest::Approx(0.3).epsilon(1e-10));

  const CoeffState t = state_with(space, {{{0, 1}, 0.5}});
  CHECK(number_law(t)[1] == 0.0);
  CHECK(std::abs(testutil::integrate_kernel(t, basis, 1)) < 1e-12);
}

TEST_CASE("intensity coefficients against the marginal oracle") {
  const SpacePtr space = make_space(2, 3);
  const ModeBasis basis = make_basis(2);

  const CoeffState one = state_with(space, {{{1, 0}, 1.0}});
  const std::vector<double> m1 = intensity_coeffs(one);
  CHECK(m1[0] == 1.0);
  CHECK(m1[1] == 0.0);
  CHECK(eval_intensity(one, basis, 0.42) == doctest::Approx(1.0));

  const CoeffState two = state_with(space, {{{1, 0}, 1.0}, {{0, 1}, 0.2}});
  CHECK(intensity_coeffs(two)[1] == 0.2);

  // richer state, oracle = n-weighted marginals of the kernels
  testutil::Lcg lcg(2024);
  CoeffState rich = vacuum_state(space);
  for (double& c : rich.coeffs) c = lcg.uniform(-0.3, 0.5);
  for (double x : {0.1, 0.55, 0.93}) {
    CHECK(eval_intensity(rich, basis, x) ==
          doctest::Approx(testutil::intensity_by_marginals(rich, basis, x)).epsilon(1e-8));
  }
}

TEST_CASE("kernel evaluation formula") {
  const SpacePtr space = make_space(2, 3);
  const ModeBasis basis = make_basis(2);

  const CoeffState s0 = state_with(space, {{{0, 0}, 0.7}});
  CHECK(eval_kernel(s0, basis, {}) == 0.7);

  const double a = 0.4, b = -0.2;
  const CoeffState s1 = state_with(space, {{{1, 0}, a}, {{0, 1}, b}});
  const double x = 0.3;
  const double expected = a + b * std::numbers::sqrt2 * std::cos(std::numbers::pi * x);
  const std::vector<double> pt = {x};
  CHECK(eval_kernel(s1, basis, pt) == doctest::Approx(expected).epsilon(1e-14));

  const CoeffState s2 = state_with(space, {{{2, 0}, 1.0}});
  const std::vector<double> pt2 = {0.81, 0.13};
  CHECK(eval_kernel(s2, basis, pt2) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS((void)eval_kernel(s2, basis, std::vector<double>(4, 0.5)),
                  std::domain_error);
  const SpacePtr big = make_space(1, 8);
  CHECK_THROWS_AS((void)eval_kernel(vacuum_state(big), make_basis(1),
                                    std::vector<double>(7, 0.5)),
                  std::domain_error);
}

TEST_CASE("kernel is symmetric under permutations of the points") {
  const SpacePtr space = make_space(3, 3);
  const ModeBasis basis = make_basis(3);
  testutil::Lcg lcg(77);
  CoeffState s = vacuum_state(space);
  for (double& c : s.coeffs) c = lcg.uniform(-1.0, 1.0);

  std::vector<double> pts = {0.15, 0.62, 0.88};
  const double reference = eval_kernel(s, basis, pts);
  std::sort(pts.begin(), pts.end());
  do {
    CHECK(eval_kernel(s, basis, pts) == doctest::Approx(reference).epsilon(1e-13));
  } while (std::next_permutation(pts.begin(), pts.end()));
}

TEST_CASE("kernel integrals reproduce the number law") {
  const SpacePtr space = make_space(3, 3);
  const ModeBasis basis = make_basis(3);
  testutil::Lcg lcg(5150);
  CoeffState s = vacuum_state(space);
  for (double& c : s.coeffs) c = lcg.uniform(-0.5, 0.8);
  const std::vector<double> law = number_law(s);
  for (int n = 0; n <= 3; ++n) {
    CHECK(testutil::integrate_kernel(s, basis, n) == doctest::Approx(law[n]).epsilon(1e-8));
  }
}

TEST_CASE("mass is linear") {
  const SpacePtr space = make_space(2, 4);
  testutil::Lcg lcg(31);
  CoeffState s = vacuum_state(space);
  for (double& c : s.coeffs) c = lcg.uniform(0.0, 1.0);
  const double m = mass(s);
  CoeffState doubled = s;
  for (double& c : doubled.coeffs) c *= 2.0;
  CHECK(mass(doubled) == doctest::Approx(2.0 * m).epsilon(1e-14));
}

TEST_CASE("state snapshots round-trip through json") {
  const SpacePtr space = make_space(2, 3);
  testutil::Lcg lcg(8);
  CoeffState s = vacuum_state(space);
  for (double& c : s.coeffs) c = lcg.uniform(-1.0, 1.0);
  s.time = 0.625;

  const nlohmann::json j = state_to_json(s);
  CHECK(j.at("N") == 2);
  CHECK(j.at("M") == 3);
  CHECK(j.at("enumeration") == "grlex");
  const CoeffState back = state_from_json(j);
  CHECK(back.time == s.time);
  CHECK(back.coeffs == s.coeffs);
  CHECK(back.space->num_modes() == 2);

  nlohmann::json bad = j;
  bad["enumeration"] = "colex";
  CHECK_THROWS_AS(state_from_json(bad), std::invalid_argument);
  nlohmann::json short_coeffs = j;
  short_coeffs["coeffs"] = std::vector<double>{1.0};
  CHECK_THROWS_AS(state_from_json(short_coeffs), std::invalid_argument);
}
