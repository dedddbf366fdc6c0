#include <doctest.h>

#include <cmath>

#include "janossy/measure_space.hpp"

using namespace janossy;

TEST_SUITE("measure_space") {

TEST_CASE("discrete space basics") {
  auto s = DiscretizedSpace::discrete({0.0, 1.0}, {1.0, 1.0});
  CHECK(s.size() == 2);
  CHECK(s.total_mass() == 2.0);
  CHECK(s.kind() == SpaceKind::discrete);
  CHECK_FALSE(s.rule().has_value());

  auto one = DiscretizedSpace::discrete({0.0}, {1.0});
  CHECK(one.size() == 1);
}

TEST_CASE("discrete space rejects bad input") {
  CHECK_THROWS_AS(DiscretizedSpace::discrete({1.0, 0.0}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(DiscretizedSpace::discrete({0.0, 0.0}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(DiscretizedSpace::discrete({0.0, 1.0}, {1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(DiscretizedSpace::discrete({0.0, 1.0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(DiscretizedSpace::discrete({}, {}), InvalidArgument);
}

TEST_CASE("gauss-legendre order 1 is the midpoint rule") {
  auto s = DiscretizedSpace::quadrature({-1.0, 1.0}, 1);
  REQUIRE(s.size() == 1);
  CHECK(s.node(0) == doctest::Approx(0.0));
  CHECK(s.weight(0) == doctest::Approx(2.0));
}

TEST_CASE("gauss-legendre polynomial exactness") {
  auto s = DiscretizedSpace::quadrature({-1.0, 1.0}, 16);
  CHECK(std::abs(s.integrate([](double x) { return x * x; }) - 2.0 / 3.0) <= 1e-14);
  // degree 2*16-1 is still exact
  CHECK(std::abs(s.integrate([](double x) { return std::pow(x, 31); })) <= 1e-14);
  CHECK(std::abs(s.integrate([](double x) { return std::pow(x, 30); }) - 2.0 / 31.0) <= 1e-14);
}

TEST_CASE("exponential on [0,1]") {
  auto s = DiscretizedSpace::quadrature({0.0, 1.0}, 32);
  CHECK(std::abs(s.integrate([](double x) { return std::exp(x); }) - (std::exp(1.0) - 1.0)) <= 1e-12);
}

TEST_CASE("breakpoints make panels") {
  auto s = DiscretizedSpace::quadrature({-6.0, 6.0}, 8, {0.5});
  CHECK(s.size() == 16);
  CHECK(s.total_mass() == doctest::Approx(12.0).epsilon(1e-14));
  // the window [0.5, 6] integrates exactly on its own panel
  auto w = Window::at_or_above(s, 0.5);
  CHECK(w.count() == 8);
  double mass = 0.0;
  for (int i : w.indices()) mass += s.weight(static_cast<std::size_t>(i));
  CHECK(mass == doctest::Approx(5.5).epsilon(1e-14));
  CHECK_THROWS_AS(DiscretizedSpace::quadrature({0.0, 1.0}, 4, {2.0}), InvalidArgument);
  CHECK_THROWS_AS(DiscretizedSpace::quadrature({1.0, 0.0}, 4), InvalidArgument);
  CHECK_THROWS_AS(DiscretizedSpace::quadrature({0.0, 1.0}, 0), InvalidArgument);
}

TEST_CASE("nodes are strictly increasing") {
  auto s = DiscretizedSpace::quadrature({-2.0, 3.0}, 12, {0.0, 1.0});
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.node(i - 1) < s.node(i));
}

TEST_CASE("window complement") {
  auto s = DiscretizedSpace::discrete({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
  Window w(s, {true, false, true});
  auto c = complement(w);
  CHECK(c.mask() == std::vector<bool>{false, true, false});
  CHECK(complement(c) == w);
  CHECK(complement(Window::full(s)).is_empty());
  CHECK(complement(Window::empty(s)).is_full());
}

TEST_CASE("window constructors") {
  auto s = DiscretizedSpace::discrete({0.0, 1.0, 2.0, 3.0}, {1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(Window(s, {true, false}), InvalidArgument);
  auto iv = Window::from_intervals(s, {{0.5, 1.0}, {3.0, 3.0}});
  CHECK(iv.indices() == std::vector<int>{1, 3});
  CHECK(Window::at_or_above(s, 2.0).indices() == std::vector<int>{2, 3});
  CHECK(Window::at_or_above(s, -1.0).is_full());
  CHECK(Window::at_or_above(s, 9.0).is_empty());
}

TEST_CASE("window rebind keeps intervals") {
  auto coarse = DiscretizedSpace::quadrature({-1.0, 1.0}, 4);
  auto fine = DiscretizedSpace::quadrature({-1.0, 1.0}, 12, {0.0});
  auto w = Window::at_or_above(coarse, 0.0);
  auto r = w.rebind(fine);
  CHECK(r.count() == 12);
  Window bare(coarse, {true, false, false, true});
  CHECK_THROWS_AS(bare.rebind(fine), InvalidArgument);
}

TEST_CASE("window families") {
  auto s = DiscretizedSpace::discrete({0.0, 1.0}, {1.0, 1.0});
  auto other = DiscretizedSpace::discrete({0.0, 1.0}, {2.0, 1.0});
  Window a(s, {true, false});
  WindowFamily wf({a, Window::full(s)});
  CHECK(wf.floors() == 2);
  CHECK(wf.sites() == std::vector<Site>{{0, 0}, {1, 0}, {1, 1}});
  CHECK(wf.contains({0, 0}));
  CHECK_FALSE(wf.contains({0, 1}));
  CHECK(wf.complement().sites() == std::vector<Site>{{0, 1}});
  CHECK_THROWS_AS(WindowFamily({a, Window::full(other)}), InvalidArgument);
  CHECK_THROWS_AS(WindowFamily(std::vector<Window>{}), InvalidArgument);
  CHECK(WindowFamily::empty(s, 3).sites().empty());
  CHECK(WindowFamily::full(s, 3).sites().size() == 6);
}

}
