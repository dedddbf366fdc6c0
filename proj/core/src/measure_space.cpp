#include "janossy/measure_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace janossy {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
  const auto n = static_cast<std::size_t>(order);
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);

  // Newton iteration on P_n from the Tricomi initial guess; roots are
  // symmetric so only the upper half is solved.
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

DiscretizedSpace DiscretizedSpace::finish(Impl impl) {
  const auto n = static_cast<Eigen::Index>(impl.nodes.size());
  impl.weight_vector = Eigen::Map<const RVector>(impl.weights.data(), n);
  impl.sqrt_weights = impl.weight_vector.cwiseSqrt();
  return DiscretizedSpace(std::make_shared<const Impl>(std::move(impl)));
}

DiscretizedSpace DiscretizedSpace::discrete(std::vector<double> points,
                                            std::vector<double> masses) {
  if (points.empty()) throw InvalidArgument("discrete space needs at least one point");
  if (points.size() != masses.size()) {
    std::ostringstream os;
    os << "discrete space: " << points.size() << " points but " << masses.size() << " masses";
    throw InvalidArgument(os.str());
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw InvalidArgument("discrete space: non-finite point");
    if (!(masses[i] > 0.0) || !std::isfinite(masses[i])) {
      throw InvalidArgument("discrete space: masses must be positive and finite");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw InvalidArgument("discrete space: points must be strictly increasing");
    }
  }
  Impl impl;
  impl.kind = SpaceKind::discrete;
  impl.nodes = std::move(points);
  impl.weights = std::move(masses);
  return finish(std::move(impl));
}

DiscretizedSpace DiscretizedSpace::quadrature(Interval interval, int order,
                                              std::vector<double> breakpoints) {
  if (!(interval.lo < interval.hi) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi)) {
    throw InvalidArgument("quadrature space: interval must satisfy a < b");
  }
  if (order < 1) throw InvalidArgument("quadrature space: order must be >= 1");
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  for (double b : breakpoints) {
    if (!(b > interval.lo && b < interval.hi)) {
      throw InvalidArgument("quadrature space: breakpoints must lie strictly inside the interval");
    }
  }

  std::vector<double> ref_nodes;
  std::vector<double> ref_weights;
  gauss_legendre(order, ref_nodes, ref_weights);

  std::vector<double> edges;
  edges.push_back(interval.lo);
  edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
  edges.push_back(interval.hi);

  Impl impl;
  impl.kind = SpaceKind::quadrature;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    for (std::size_t i = 0; i < ref_nodes.size(); ++i) {
      impl.nodes.push_back(mid + half * ref_nodes[i]);
      impl.weights.push_back(half * ref_weights[i]);
    }
  }
  impl.rule = QuadratureRule{interval, order, std::move(breakpoints)};
  return finish(std::move(impl));
}

double DiscretizedSpace::total_mass() const {
  double acc = 0.0;
  for (double w : impl_->weights) acc += w;
  return acc;
}

bool DiscretizedSpace::same_as(const DiscretizedSpace& other) const {
  if (impl_ == other.impl_) return true;
  return impl_->nodes == other.impl_->nodes && impl_->weights == other.impl_->weights;
}

Window::Window(DiscretizedSpace space, std::vector<bool> mask)
    : space_(std::move(space)), mask_(std::move(mask)) {
  if (mask_.size() != space_.size()) {
    std::ostringstream os;
    os << "window mask has " << mask_.size() << " entries, space has " << space_.size()
       << " nodes";
    throw InvalidArgument(os.str());
  }
}

Window Window::empty(const DiscretizedSpace& space) {
  return Window(space, std::vector<bool>(space.size(), false));
}

Window Window::full(const DiscretizedSpace& space) {
  return Window(space, std::vector<bool>(space.size(), true));
}

Window Window::from_intervals(const DiscretizedSpace& space, std::vector<Interval> intervals) {
  std::vector<bool> mask(space.size(), false);
  for (const auto& iv : intervals) {
    if (!(iv.lo <= iv.hi)) throw InvalidArgument("window interval must satisfy a <= b");
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double x = space.node(i);
    mask[i] = std::any_of(intervals.begin(), intervals.end(),
                          [x](const Interval& iv) { return iv.contains(x); });
  }
  Window w(space, std::move(mask));
  w.intervals_ = std::move(intervals);
  return w;
}

Window Window::at_or_above(const DiscretizedSpace& space, double s) {
  return from_intervals(space, {Interval{s, std::numeric_limits<double>::infinity()}});
}

std::size_t Window::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<int> Window::indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

Window Window::rebind(const DiscretizedSpace& space) const {
  if (!intervals_) {
    if (space.same_as(space_)) return Window(space, mask_);
    throw InvalidArgument("mask-only window cannot be rebuilt on a different space");
  }
  return from_intervals(space, *intervals_);
}

Window complement(const Window& window) {
  std::vector<bool> mask = window.mask();
  mask.flip();
  return Window(window.space(), std::move(mask));
}

WindowFamily::WindowFamily(std::vector<Window> windows) : windows_(std::move(windows)) {
  if (windows_.empty()) throw InvalidArgument("window family needs at least one floor");
  for (const auto& w : windows_) {
    if (!w.space().same_as(windows_.front().space())) {
      throw InvalidArgument("all windows of a family must share one space");
    }
  }
}

WindowFamily WindowFamily::empty(const DiscretizedSpace& space, int floors) {
  if (floors < 1) throw InvalidArgument("window family needs at least one floor");
  return WindowFamily(std::vector<Window>(static_cast<std::size_t>(floors), Window::empty(space)));
}

WindowFamily WindowFamily::full(const DiscretizedSpace& space, int floors) {
  if (floors < 1) throw InvalidArgument("window family needs at least one floor");
  return WindowFamily(std::vector<Window>(static_cast<std::size_t>(floors), Window::full(space)));
}

WindowFamily WindowFamily::uniform(const Window& window, int floors) {
  if (floors < 1) throw InvalidArgument("window family needs at least one floor");
  return WindowFamily(std::vector<Window>(static_cast<std::size_t>(floors), window));
}

std::vector<Site> WindowFamily::sites() const {
  std::vector<Site> out;
  for (int l = 0; l < floors(); ++l) {
    for (int x : windows_[static_cast<std::size_t>(l)].indices()) out.push_back({l, x});
  }
  return out;
}

bool WindowFamily::contains(const Site& site) const {
  if (site.floor < 0 || site.floor >= floors()) return false;
  const auto& w = windows_[static_cast<std::size_t>(site.floor)];
  if (site.node < 0 || static_cast<std::size_t>(site.node) >= w.mask().size()) return false;
  return w.contains(static_cast<std::size_t>(site.node));
}

WindowFamily WindowFamily::complement() const {
  std::vector<Window> out;
  out.reserve(windows_.size());
  for (const auto& w : windows_) out.push_back(janossy::complement(w));
  return WindowFamily(std::move(out));
}

}  // namespace janossy
