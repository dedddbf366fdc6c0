#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "janossy/kernels.hpp"
#include "janossy/models.hpp"

using namespace janossy;
using testing::max_abs;

namespace {

Complex rho(const BlockKernel& k, int floor, int node) { return k({floor, node}, {floor, node}); }

}  // namespace

TEST_SUITE("models") {

TEST_CASE("gaussian potential, one particle") {
  auto space = DiscretizedSpace::quadrature({-6.0, 6.0}, 64);
  auto k = correlation_kernel(build_unitary(Potential::gaussian(), 1, space));
  for (std::size_t i = 0; i < space.size(); i += 9) {
    const double x = space.node(i);
    CHECK(std::abs(rho(k, 0, static_cast<int>(i)) - std::exp(-x * x) / std::sqrt(std::numbers::pi)) <= 1e-10);
  }
}

TEST_CASE("gaussian potential, density integrates to n") {
  auto space = DiscretizedSpace::quadrature({-6.0, 6.0}, 64);
  for (int n : {2, 5, 10}) {
    auto k = correlation_kernel(build_unitary(Potential::gaussian(), n, space));
    Complex total = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) total += space.weight(i) * rho(k, 0, static_cast<int>(i));
    CHECK(std::abs(total - double(n)) <= 1e-8);
  }
}

TEST_CASE("basis invariance") {
  auto space = DiscretizedSpace::quadrature({-6.0, 6.0}, 48);
  auto e = build_unitary(Potential::gaussian(), 3, space);
  Eigen::Matrix3cd t;
  t << 1.0, 0.5, -2.0, 0.0, 3.0, 1.0, 0.25, 0.0, 1.0;
  CMatrix f = e.f_matrix() * t;
  CMatrix phi = e.phi_matrix() * t.transpose().inverse() * 2.0;
  std::vector<CVector> fs, ps;
  for (int j = 0; j < 3; ++j) {
    fs.push_back(f.col(j));
    ps.push_back(phi.col(j));
  }
  ChainEnsemble other(space, fs, ps, {});
  CHECK(max_abs(correlation_kernel(other).block(0, 0) - correlation_kernel(e).block(0, 0)) <= 1e-9);
}

TEST_CASE("uncoupled chain factorizes") {
  CoupledChainSpec spec;
  spec.n = 1;
  spec.potentials = {Potential::gaussian(), Potential{{0.0, 0.5, 1.0}}};
  spec.couplings = {0.0};
  spec.space = SpaceSpec::quadrature({-6.0, 6.0}, 32);
  auto e = build_coupled_chain(spec);
  auto k = correlation_kernel(e);
  for (int x = 0; x < 32; x += 5) {
    for (int y = 0; y < 32; y += 3) {
      std::vector<Site> pts{{0, x}, {1, y}};
      CHECK(std::abs(correlation_function(k, pts) - rho(k, 0, x) * rho(k, 1, y)) <= 1e-8);
    }
  }
}

TEST_CASE("weakly coupled pair has the gaussian partition function") {
  for (double c : {-0.3, 0.1, 0.25}) {
    CoupledChainSpec spec;
    spec.n = 1;
    spec.potentials = {Potential{{0.0, 0.0, 0.5}}, Potential{{0.0, 0.0, 0.5}}};
    spec.couplings = {c};
    spec.space = SpaceSpec::quadrature({-12.0, 12.0}, 96);
    // int int e^{-x^2/4} e^{c x y} e^{-y^2/4}
    const double exact = 2.0 * std::numbers::pi / std::sqrt(0.25 - c * c);
    CHECK(std::abs(partition_function(build_coupled_chain(spec)) - exact) <= 1e-8 * exact);
  }
}

TEST_CASE("coupled chain shape errors") {
  CoupledChainSpec spec;
  spec.n = 1;
  spec.potentials = {Potential::gaussian(), Potential::gaussian(), Potential::gaussian()};
  spec.couplings = {0.1};
  CHECK_THROWS_AS(build_coupled_chain(spec), InvalidArgument);
}

TEST_CASE("single brownian bridge") {
  KarlinMcGregorSpec spec;
  spec.times = {0.0, 0.3, 0.7, 1.0};
  spec.start = {-0.5};
  spec.end = {1.0};
  auto e = build_karlin_mcgregor(spec);
  auto k = correlation_kernel(e);
  const auto& space = e.space();
  for (int l = 0; l < 2; ++l) {
    const double t = spec.times[static_cast<std::size_t>(l + 1)];
    const double mean = -0.5 + 1.5 * t;
    const double var = t * (1.0 - t);
    for (std::size_t i = 0; i < space.size(); i += 7) {
      const double x = space.node(i);
      const double exact = std::exp(-(x - mean) * (x - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
      CHECK(std::abs(rho(k, l, static_cast<int>(i)) - exact) <= 1e-7);
    }
  }
}

TEST_CASE("two non-intersecting paths") {
  KarlinMcGregorSpec spec;
  spec.times = {0.0, 0.5, 1.0};
  spec.start = {-1.0, 1.0};
  spec.end = {-1.0, 1.0};
  auto e = build_karlin_mcgregor(spec);
  auto k = correlation_kernel(e);
  Complex total = 0.0;
  for (std::size_t i = 0; i < e.space().size(); ++i) total += e.space().weight(i) * rho(k, 0, static_cast<int>(i));
  CHECK(std::abs(total - 2.0) <= 1e-8);
  // det[p(a_i, b_j)] at the end time: non-crossing probability times the free weight
  const double p11 = heat_kernel(0, 1, -1, -1), p12 = heat_kernel(0, 1, -1, 1);
  CHECK(std::abs(partition_function(e) / 2.0 - (p11 * p11 - p12 * p12)) <= 1e-8);
}

TEST_CASE("karlin-mcgregor validation") {
  KarlinMcGregorSpec spec;
  spec.times = {0.0, 0.5, 0.4};
  spec.start = {0.0};
  spec.end = {0.0};
  CHECK_THROWS_AS(build_karlin_mcgregor(spec), InvalidArgument);
  spec.times = {0.0, 0.5, 1.0};
  spec.start = {1.0, 0.0};
  spec.end = {0.0, 1.0};
  CHECK_THROWS_AS(build_karlin_mcgregor(spec), InvalidArgument);
}

TEST_CASE("random instances") {
  auto a = build_random(5, 4, 2, 3);
  auto b = build_random(5, 4, 2, 3);
  CHECK(max_abs(a.f_matrix() - b.f_matrix()) == 0.0);
  CHECK(max_abs(a.link(1) - b.link(1)) == 0.0);
  CHECK(a.space().weights() == b.space().weights());
  CHECK(max_abs(build_random(6, 4, 2, 3).f_matrix() - a.f_matrix()) > 0.0);

  auto c = build_random(1, 4, 2, 3);
  CHECK(std::isfinite(c.gram_condition()));
  CHECK_THROWS_AS(build_random(1, 1, 2, 1), InvalidArgument);
}

TEST_CASE("totally positive random instances") {
  auto e = build_random_positive(3, 5, 2, 3);
  auto k = correlation_kernel(e);
  for (int l = 0; l < 3; ++l)
    for (int x = 0; x < 5; ++x) CHECK(rho(k, l, x).real() > 0.0);
  CHECK(partition_function(e).real() > 0.0);
}

TEST_CASE("model specs") {
  RandomSpec r{7, 4, 2, 2, false};
  ChainModelSpec spec = r;
  CHECK(model_floors(spec) == 2);
  CHECK_FALSE(model_space(spec).has_value());
  CHECK_THROWS_AS(with_space(spec, SpaceSpec::quadrature({0, 1}, 4)), InvalidArgument);

  UnitarySpec u;
  u.n = 2;
  ChainModelSpec us = u;
  auto moved = with_space(us, SpaceSpec::quadrature({-5, 5}, 20, {1.0}));
  CHECK(build_model(moved).nodes() == 40);
}

}
