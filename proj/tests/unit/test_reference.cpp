#include <doctest.h>

#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "janossy/kernels.hpp"
#include "janossy/measure_space.hpp"
#include "janossy/models.hpp"

using namespace janossy;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// One-point densities of an n = 2 random instance by enumeration in 50 digits.
std::vector<std::vector<Big>> reference_density(const ChainEnsemble& e) {
  const int p = static_cast<int>(e.nodes());
  const int floors = e.floors();
  const auto& w = e.space().weights();
  auto re = [](Complex z) { return Big(z.real()); };
  auto det2 = [](const Big& a, const Big& b, const Big& c, const Big& d) { return a * d - b * c; };

  std::vector<std::vector<Big>> mass(static_cast<std::size_t>(floors), std::vector<Big>(static_cast<std::size_t>(p), Big(0)));
  Big z = 0;
  std::vector<int> c(static_cast<std::size_t>(2 * floors), 0);
  while (true) {
    auto at = [&](int l, int i) { return c[static_cast<std::size_t>(2 * l + i)]; };
    Big v = det2(re(e.f(0)(at(0, 0))), re(e.f(0)(at(0, 1))), re(e.f(1)(at(0, 0))), re(e.f(1)(at(0, 1))));
    for (int l = 0; l + 1 < floors; ++l) {
      const auto& g = e.link(l);
      v *= det2(re(g(at(l, 0), at(l + 1, 0))), re(g(at(l, 0), at(l + 1, 1))), re(g(at(l, 1), at(l + 1, 0))),
                re(g(at(l, 1), at(l + 1, 1))));
    }
    const int last = floors - 1;
    v *= det2(re(e.phi(0)(at(last, 0))), re(e.phi(1)(at(last, 0))), re(e.phi(0)(at(last, 1))), re(e.phi(1)(at(last, 1))));
    for (int k : c) v *= Big(w[static_cast<std::size_t>(k)]);
    z += v;
    for (int l = 0; l < floors; ++l) mass[static_cast<std::size_t>(l)][static_cast<std::size_t>(at(l, 0))] += v;
    std::size_t i = 0;
    while (i < c.size() && ++c[i] == p) c[i++] = 0;
    if (i == c.size()) break;
  }
  for (int l = 0; l < floors; ++l)
    for (int x = 0; x < p; ++x) {
      auto& m = mass[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)];
      m = 2 * m / z / Big(w[static_cast<std::size_t>(x)]);
    }
  return mass;
}

}  // namespace

TEST_SUITE("reference") {

TEST_CASE("gauss-legendre against adaptive kronrod") {
  auto space = DiscretizedSpace::quadrature({0.0, 1.0}, 32);
  const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [](double x) { return std::exp(x); }, 0.0, 1.0, 15, 1e-15);
  CHECK(std::abs(space.integrate([](double x) { return std::exp(x); }) - ref) <= 1e-12);
}

TEST_CASE("one point densities against a 50 digit enumeration") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto e = build_random(100 + seed, 5, 2, 3);
    auto k = correlation_kernel(e);
    auto ref = reference_density(e);
    for (int l = 0; l < 3; ++l)
      for (int x = 0; x < 5; ++x) {
        const double r = static_cast<double>(ref[static_cast<std::size_t>(l)][static_cast<std::size_t>(x)]);
        worst = std::max(worst, std::abs(k({l, x}, {l, x}) - r));
      }
  }
  CHECK(worst <= 1e-10);
}

}
