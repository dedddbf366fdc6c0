#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "janossy/janossy_kernel.hpp"
#include "janossy/kernels.hpp"
#include "janossy/models.hpp"
#include "janossy/oracle.hpp"
#include "janossy/random.hpp"

using namespace janossy;
using testing::max_abs;
using testing::vec;

namespace {

WindowFamily random_windows(const ChainEnsemble& e, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Window> ws;
  for (int l = 0; l < e.floors(); ++l) {
    std::vector<bool> mask(static_cast<std::size_t>(e.nodes()));
    // keep at least n nodes outside
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = i >= static_cast<std::size_t>(e.particles()) && rng.bernoulli(0.5);
    ws.emplace_back(e.space(), mask);
  }
  return WindowFamily(ws);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("single forced configuration") {
  auto s = DiscretizedSpace::discrete({0.0}, {1.0});
  ChainEnsemble e(s, {vec({1.0})}, {vec({1.0})}, {});
  auto k = correlation_kernel(e);
  CHECK(std::abs(k({0, 0}, {0, 0}) - 1.0) <= 1e-15);
}

TEST_CASE("lower blocks carry no g term") {
  auto e = build_random(8, 4, 2, 3);
  auto k = correlation_kernel(e);
  auto full = FloorWeights::full(e.space(), 3);
  CMatrix xb = e.gram().partialPivLu().solve(left_convolutions(e, 0, full).transpose());
  CMatrix expect = right_convolutions(e, 2, full) * xb;
  CHECK(max_abs(k.block(2, 0) - expect) <= 1e-10 * max_abs(expect));
  // upper block differs by exactly -g
  CMatrix xb2 = e.gram().partialPivLu().solve(left_convolutions(e, 2, full).transpose());
  CMatrix upper = right_convolutions(e, 0, full) * xb2 - chain_convolve(e, 0, 2);
  CHECK(max_abs(k.block(0, 2) - upper) <= 1e-10 * max_abs(upper));
}

TEST_CASE("correlation function edge cases") {
  auto e = build_random(1, 4, 2, 2);
  auto k = correlation_kernel(e);
  CHECK(correlation_function(k, {}) == Complex(1.0));
  std::vector<Site> dup{{0, 1}, {0, 1}};
  CHECK(std::abs(correlation_function(k, dup)) <= 1e-12);
}

TEST_CASE("cross-floor two point correlation") {
  auto e = build_random(12, 4, 1, 2);
  auto k = correlation_kernel(e);
  auto dist = enumerate_density(e);
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      std::vector<Site> pts{{0, x}, {1, y}};
      CHECK(std::abs(correlation_function(k, pts) - brute_correlation(dist, pts)) <= 1e-10);
    }
  }
}

TEST_CASE("one point per floor") {
  auto e = build_random(13, 3, 1, 3);
  auto k = correlation_kernel(e);
  auto dist = enumerate_density(e);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        std::vector<Site> pts{{0, a}, {1, b}, {2, c}};
        CHECK(std::abs(correlation_function(k, pts) - brute_correlation(dist, pts)) <= 1e-10);
      }
}

TEST_CASE("restriction and fredholm determinant") {
  auto e = build_random(14, 4, 2, 2);
  auto k = correlation_kernel(e);
  auto empty = restrict_to(k, WindowFamily::empty(e.space(), 2));
  CHECK(empty.size() == 0);
  CHECK(fredholm_det(empty) == Complex(1.0));
  CHECK(std::abs(fredholm_det(restrict_to(k, WindowFamily::full(e.space(), 2)))) <= 1e-8);

  auto dist = enumerate_density(e);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto wf = random_windows(e, seed);
    std::vector<int> zero(2, 0);
    double ref = brute_count_probability(dist, wf, zero);
    CHECK(std::abs(fredholm_det(restrict_to(k, wf)) - ref) <= 1e-10);
  }
}

TEST_CASE("restriction symmetrizes by sqrt weights") {
  auto e = build_random(15, 3, 1, 1);
  auto k = correlation_kernel(e);
  auto op = restrict_to(k, WindowFamily::full(e.space(), 1));
  const auto& w = e.space().weights();
  CHECK(std::abs(op.matrix()(0, 1) - std::sqrt(w[0] * w[1]) * k({0, 0}, {0, 1})) <= 1e-14);
}

TEST_CASE("resolvent kernel") {
  auto e = build_random(16, 4, 2, 2);
  auto k = correlation_kernel(e);
  auto zero = resolvent_kernel(k, WindowFamily::empty(e.space(), 2));
  for (int l = 0; l < 2; ++l)
    for (int m = 0; m < 2; ++m) CHECK(max_abs(zero.block(l, m)) == 0.0);
  CHECK_THROWS_AS(resolvent_kernel(k, WindowFamily::full(e.space(), 2)), SingularMatrixError);

  auto wf = random_windows(e, 3);
  auto res = resolvent_kernel(k, wf);
  auto jk = janossy_kernel_explicit(e, wf);
  double scale = 0.0;
  for (const auto& a : wf.sites())
    for (const auto& b : wf.sites()) scale = std::max(scale, std::abs(res(a, b)));
  for (const auto& a : wf.sites())
    for (const auto& b : wf.sites()) CHECK(std::abs(res(a, b) - jk.kernel(a, b)) <= 1e-8 * (1.0 + scale));
}

TEST_CASE("dyson-mehta identities") {
  auto one = correlation_kernel(build_random(17, 5, 2, 1));
  for (int x = 0; x < 5; ++x)
    for (int z = 0; z < 5; ++z) {
      CHECK(dyson_mehta_check(one, 0, 0, x, z) <= 1e-10);
    }
  auto three = correlation_kernel(build_random(18, 4, 2, 3));
  for (int k = 0; k < 3; ++k)
    for (int x = 0; x < 4; ++x)
      for (int z = 0; z < 4; ++z) {
        CHECK(dyson_mehta_check(three, k, k, x, z) <= 1e-10);
        CHECK(dyson_mehta_check(three, k, k, x, z, DysonMehtaForm::composition) <= 1e-10);
      }
  // off-diagonal floors: the composed form holds
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < 3; ++m)
      CHECK(dyson_mehta_check(three, k, m, 1, 2, DysonMehtaForm::composition) <= 1e-10);
}

TEST_CASE("kernel indices are checked") {
  auto k = correlation_kernel(build_random(19, 3, 1, 2));
  CHECK_THROWS_AS(k.block(2, 0), InvalidArgument);
  CHECK_THROWS_AS(k({0, 3}, {0, 0}), InvalidArgument);
}

}
