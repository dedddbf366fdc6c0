#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "janossy/kernels.hpp"
#include "janossy/models.hpp"
#include "janossy/oracle.hpp"

using namespace janossy;
using testing::max_abs;
using testing::unit_space;
using testing::vec;

TEST_SUITE("chain_ensemble") {

TEST_CASE("convolution conventions") {
  auto e = build_random(3, 4, 2, 3);
  CHECK(max_abs(chain_convolve(e, 1, 1)) == 0.0);
  CHECK(max_abs(chain_convolve(e, 2, 0)) == 0.0);
  CHECK(max_abs(chain_convolve(e, 0, 1) - e.link(0)) == 0.0);
  CHECK(max_abs(chain_convolve(e, 1, 2) - e.link(1)) == 0.0);
}

TEST_CASE("identity links convolve to identity") {
  auto s = unit_space(3);
  CMatrix id = CMatrix::Identity(3, 3);
  ChainEnsemble e(s, {vec({1, 2, 3})}, {vec({1, 1, 1})}, {id, id});
  CHECK(max_abs(chain_convolve(e, 0, 2) - id) <= 1e-15);
  // phi passes through an identity chain untouched
  CHECK(max_abs(right_convolve(e, 0, 0) - e.phi(0)) <= 1e-15);
}

TEST_CASE("convolution matches direct double sum") {
  auto e = build_random(11, 4, 2, 3);
  const auto& w = e.space().weights();
  CMatrix g13 = chain_convolve(e, 0, 2);
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      Complex acc{};
      for (int z = 0; z < 4; ++z) acc += e.link(0)(x, z) * w[z] * e.link(1)(z, y);
      CHECK(std::abs(g13(x, y) - acc) <= 1e-13);
    }
  }
}

TEST_CASE("left and right convolutions") {
  auto e = build_random(5, 4, 2, 3);
  const auto& w = e.space().weights();
  CHECK(max_abs(left_convolve(e, 1, 0) - e.f(1)) == 0.0);
  CHECK(max_abs(right_convolve(e, 1, 2) - e.phi(1)) == 0.0);
  for (int y = 0; y < 4; ++y) {
    Complex acc{};
    for (int x = 0; x < 4; ++x) acc += e.f(0)(x) * w[x] * e.link(0)(x, y);
    CHECK(std::abs(left_convolve(e, 0, 1)(y) - acc) <= 1e-13);
  }
  for (int x = 0; x < 4; ++x) {
    Complex acc{};
    for (int y = 0; y < 4; ++y) acc += e.link(1)(x, y) * w[y] * e.phi(1)(y);
    CHECK(std::abs(right_convolve(e, 1, 1)(x) - acc) <= 1e-13);
  }
}

TEST_CASE("singleton space left convolution") {
  auto s = DiscretizedSpace::discrete({0.0}, {1.0});
  CMatrix one = CMatrix::Ones(1, 1);
  ChainEnsemble e(s, {vec({2.5})}, {vec({1.0})}, {one, one});
  for (int m = 0; m < 3; ++m) CHECK(std::abs(left_convolve(e, 0, m)(0) - 2.5) <= 1e-15);
}

TEST_CASE("gram matrix small cases") {
  auto s = unit_space(2);
  ChainEnsemble a(s, {vec({1, 2})}, {vec({3, 4})}, {});
  CHECK(std::abs(a.gram()(0, 0) - 11.0) <= 1e-14);

  ChainEnsemble b(s, {vec({1, 1})}, {vec({1, 1})}, {CMatrix::Identity(2, 2)});
  CHECK(std::abs(b.gram()(0, 0) - 2.0) <= 1e-14);
  CHECK(std::abs(partition_function(b) - 2.0) <= 1e-14);

  // indicator functions, n = 2
  ChainEnsemble c(s, {vec({1, 0}), vec({0, 1})}, {vec({1, 0}), vec({0, 1})}, {});
  CHECK(std::abs(partition_function(c) - 2.0) <= 1e-14);
}

TEST_CASE("complement gram with empty windows equals A") {
  auto e = build_random(2, 4, 2, 2);
  auto g = gram_matrix(e, GramVariant::complement, WindowFamily::empty(e.space(), 2));
  CHECK(max_abs(g.entries - e.gram()) <= 1e-14);
  CHECK(g.variant == GramVariant::complement);
}

TEST_CASE("gram entries match triple sum") {
  auto e = build_random(21, 4, 2, 3);
  const auto& w = e.space().weights();
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      Complex acc{};
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          for (int z = 0; z < 4; ++z)
            acc += e.f(j)(x) * w[x] * e.link(0)(x, y) * w[y] * e.link(1)(y, z) * w[z] * e.phi(k)(z);
      CHECK(std::abs(e.gram()(j, k) - acc) <= 1e-12 * std::abs(acc));
    }
  }
}

TEST_CASE("partition function matches enumeration") {
  auto e = build_random(9, 3, 2, 2);
  auto dist = enumerate_density(e);
  Complex z = partition_function(e);
  CHECK(std::abs(dist.raw_partition() - z) <= 1e-10 * std::abs(z));
}

TEST_CASE("marginal ensembles") {
  auto e = build_random(4, 4, 2, 3);
  std::vector<int> all{0, 1, 2};
  auto same = marginal_ensemble(e, all);
  CHECK(max_abs(same.f_matrix() - e.f_matrix()) <= 1e-15);
  CHECK(max_abs(same.phi_matrix() - e.phi_matrix()) <= 1e-15);

  std::vector<int> last{2};
  auto m = marginal_ensemble(e, last);
  CHECK(m.floors() == 1);
  CHECK(max_abs(m.f_matrix() - left_convolutions(e, 2, FloorWeights::full(e.space(), 3))) <= 1e-13);

  std::vector<int> ends{0, 2};
  auto p = marginal_ensemble(e, ends);
  auto kp = correlation_kernel(p);
  auto dist = enumerate_density(e);
  for (int x = 0; x < 4; ++x) {
    Site site{0, x};
    Complex rho = correlation_function(kp, std::span<const Site>(&site, 1));
    CHECK(std::abs(rho - brute_correlation(dist, std::span<const Site>(&site, 1))) <= 1e-10);
  }
  std::vector<int> bad{2, 0};
  CHECK_THROWS_AS(marginal_ensemble(e, bad), InvalidArgument);
}

TEST_CASE("construction errors") {
  auto s = unit_space(2);
  CHECK_THROWS_AS(ChainEnsemble(s, {vec({1, 2, 3})}, {vec({1, 1})}, {}), InvalidArgument);
  CHECK_THROWS_AS(ChainEnsemble(s, {vec({1, 2})}, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(ChainEnsemble(s, {vec({1, 2})}, {vec({1, 1})}, {CMatrix::Ones(3, 3)}), InvalidArgument);
  // rank-one A with n = 2
  CHECK_THROWS_AS(ChainEnsemble(s, {vec({1, 1}), vec({2, 2})}, {vec({1, 0}), vec({0, 1})}, {}),
                  SingularMatrixError);
}

TEST_CASE("extended and standard precision agree") {
  EnsembleOptions std_opts;
  std_opts.precision = Precision::standard;
  EnsembleOptions ext_opts;
  ext_opts.precision = Precision::extended;
  auto a = build_random(31, 5, 2, 3, std_opts);
  auto b = build_random(31, 5, 2, 3, ext_opts);
  CHECK_FALSE(a.extended_precision());
  CHECK(b.extended_precision());
  CHECK(std::abs(partition_function(a) - partition_function(b)) <= 1e-10 * std::abs(partition_function(b)));
  CHECK(max_abs(a.gram() - b.gram()) <= 1e-12 * max_abs(b.gram()));
}

}
