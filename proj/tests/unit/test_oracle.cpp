#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "janossy/kernels.hpp"
#include "janossy/models.hpp"
#include "janossy/oracle.hpp"
#include "janossy/random.hpp"

using namespace janossy;
using testing::unit_space;
using testing::vec;

TEST_SUITE("oracle") {

TEST_CASE("two equal atoms") {
  auto s = unit_space(2);
  ChainEnsemble e(s, {vec({1, 1})}, {vec({1, 1})}, {});
  auto dist = enumerate_density(e);
  REQUIRE(dist.configurations() == 2);
  CHECK(std::abs(dist.masses()[0] - 0.5) <= 1e-15);
  CHECK(std::abs(dist.masses()[1] - 0.5) <= 1e-15);
}

TEST_CASE("enumerated mass is normalized") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto e = build_random(seed, 3, 2, 2);
    auto dist = enumerate_density(e);
    CHECK(dist.configurations() == 81);
    CHECK(std::abs(dist.total_mass() - 1.0) <= 1e-10);
    Complex z = partition_function(e);
    CHECK(std::abs(dist.raw_partition() - z) <= 1e-10 * std::abs(z));
  }
}

TEST_CASE("coordinates decode base P digits") {
  auto e = build_random(2, 3, 2, 2);
  auto dist = enumerate_density(e);
  // 5 = 2 + 1*3: particle 0 of floor 0 at node 2, particle 1 at node 1
  CHECK(dist.coordinate(5, 0, 0) == 2);
  CHECK(dist.coordinate(5, 0, 1) == 1);
  CHECK(dist.coordinate(5, 1, 0) == 0);
}

TEST_CASE("brute correlation basics") {
  auto s = DiscretizedSpace::discrete({0.0, 1.0, 2.0}, {0.5, 1.0, 2.0});
  ChainEnsemble e(s, {vec({1, 2, 3})}, {vec({1, 1, 1})}, {});
  auto dist = enumerate_density(e);
  CHECK(brute_correlation(dist, {}) == 1.0);
  const double z = 0.5 * 1 + 1.0 * 2 + 2.0 * 3;
  for (int x = 0; x < 3; ++x) {
    std::vector<Site> pt{{0, x}};
    const double p = s.weight(static_cast<std::size_t>(x)) * (x + 1) / z;
    CHECK(brute_correlation(dist, pt) == doctest::Approx(p / s.weight(static_cast<std::size_t>(x))).epsilon(1e-14));
  }
}

TEST_CASE("brute janossy with empty windows integrates to one") {
  auto e = build_random(3, 3, 2, 2);
  auto dist = enumerate_density(e);
  CHECK(std::abs(brute_janossy(dist, WindowFamily::empty(e.space(), 2), {}) - 1.0) <= 1e-10);
  std::vector<Site> outside{{0, 0}};
  CHECK_THROWS_AS(brute_janossy(dist, WindowFamily::empty(e.space(), 2), outside), InvalidArgument);
}

TEST_CASE("enumeration guards") {
  auto e = build_random(4, 5, 2, 3);
  EnumerationOptions small;
  small.budget = 100;
  CHECK_THROWS_AS(enumerate_density(e, small), BudgetExceeded);
  auto q = build_unitary(Potential::gaussian(), 1, DiscretizedSpace::quadrature({-1, 1}, 4));
  CHECK_THROWS_AS(enumerate_density(q), InvalidArgument);
}

TEST_CASE("heine enumeration equals the pairing determinant") {
  Rng rng(77);
  auto s = DiscretizedSpace::discrete({0, 1, 2, 3, 4}, {0.3, 0.7, 1.1, 0.9, 0.5});
  for (int n = 1; n <= 3; ++n) {
    CMatrix psi(5, n), chi(5, n);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < n; ++j) {
        psi(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        chi(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
    Complex lhs = heine_enumeration(s, psi, chi);
    Complex rhs = determinant(pairing_matrix(s, psi, chi));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("quadrature oracle edges") {
  auto e = build_unitary(Potential::gaussian(), 2, DiscretizedSpace::quadrature({-6.0, 6.0}, 24));
  CHECK(std::abs(quad_oracle_m1(e, -7.0, 2) - 1.0) <= 1e-12);
  CHECK(std::abs(quad_oracle_m1(e, 7.0, 0) - 1.0) <= 1e-12);
  double total = 0.0;
  for (int k = 0; k <= 2; ++k) total += quad_oracle_m1(e, 0.3, k);
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK_THROWS_AS(quad_oracle_m1(build_random(1, 3, 1, 2), 0.0, 0), InvalidArgument);
}

}
