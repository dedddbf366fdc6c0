#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "janossy/types.hpp"

namespace janossy {

enum class SpaceKind { discrete, quadrature };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Composite Gauss-Legendre rule: `order` nodes on each panel between
/// consecutive breakpoints of the interval.
struct QuadratureRule {
  Interval interval;
  int order = 0;
  std::vector<double> breakpoints;  // strictly inside the interval, sorted

  friend bool operator==(const QuadratureRule&, const QuadratureRule&) = default;
};

/// A one-particle space (X, mu) as a finite node list with positive weights.
///
/// Exact-discrete spaces carry the atoms of a discrete measure; quadrature
/// spaces carry a Gauss-Legendre rule for Lebesgue measure on an interval.
/// Either way every integral over X becomes a weighted sum over nodes. Nodes
/// are strictly increasing. Copies share the same immutable storage.
class DiscretizedSpace {
 public:
  /// Exact-discrete space. Throws InvalidArgument unless points are strictly
  /// increasing, masses positive and both lists have the same nonzero length.
  static DiscretizedSpace discrete(std::vector<double> points, std::vector<double> masses);

  /// Gauss-Legendre space on [interval.lo, interval.hi]. Each breakpoint
  /// starts a new panel with its own `order`-point rule, which lets windows
  /// with an edge at a breakpoint be integrated without node-granularity error.
  static DiscretizedSpace quadrature(Interval interval, int order,
                                     std::vector<double> breakpoints = {});

  std::size_t size() const { return impl_->nodes.size(); }
  SpaceKind kind() const { return impl_->kind; }
  const std::vector<double>& nodes() const { return impl_->nodes; }
  const std::vector<double>& weights() const { return impl_->weights; }
  const RVector& weight_vector() const { return impl_->weight_vector; }
  const RVector& sqrt_weight_vector() const { return impl_->sqrt_weights; }
  /// Set for quadrature spaces only.
  const std::optional<QuadratureRule>& rule() const { return impl_->rule; }

  double node(std::size_t i) const { return impl_->nodes[i]; }
  double weight(std::size_t i) const { return impl_->weights[i]; }
  double total_mass() const;

  /// Weighted sum of f over the nodes.
  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < size(); ++i) acc += impl_->weights[i] * f(impl_->nodes[i]);
    return acc;
  }

  /// Same underlying node/weight data (pointer identity or equal contents).
  bool same_as(const DiscretizedSpace& other) const;

 private:
  struct Impl {
    SpaceKind kind = SpaceKind::discrete;
    std::vector<double> nodes;
    std::vector<double> weights;
    RVector weight_vector;
    RVector sqrt_weights;
    std::optional<QuadratureRule> rule;
  };

  explicit DiscretizedSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static DiscretizedSpace finish(Impl impl);

  std::shared_ptr<const Impl> impl_;
};

/// Gauss-Legendre nodes and weights for [-1, 1]; exact for polynomials of
/// degree <= 2 * order - 1.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// A subset I of the space, stored as a node membership mask. Windows built
/// from intervals remember them so they can be rebuilt on a refined space.
class Window {
 public:
  Window(DiscretizedSpace space, std::vector<bool> mask);

  static Window empty(const DiscretizedSpace& space);
  static Window full(const DiscretizedSpace& space);
  /// Nodes lying in any of the closed intervals.
  static Window from_intervals(const DiscretizedSpace& space, std::vector<Interval> intervals);
  /// Nodes >= s, i.e. the window [s, +inf).
  static Window at_or_above(const DiscretizedSpace& space, double s);

  const DiscretizedSpace& space() const { return space_; }
  const std::vector<bool>& mask() const { return mask_; }
  const std::optional<std::vector<Interval>>& intervals() const { return intervals_; }

  bool contains(std::size_t node) const { return mask_[node]; }
  std::size_t count() const;
  std::vector<int> indices() const;
  bool is_empty() const { return count() == 0; }
  bool is_full() const { return count() == mask_.size(); }

  /// Same window rebuilt on another space (needs an interval description).
  Window rebind(const DiscretizedSpace& space) const;

  friend bool operator==(const Window& a, const Window& b) { return a.mask_ == b.mask_; }

 private:
  DiscretizedSpace space_;
  std::vector<bool> mask_;
  std::optional<std::vector<Interval>> intervals_;
};

/// Nodewise negation of the mask.
Window complement(const Window& window);

/// One window per floor, all on the same space: I_1, ..., I_M.
class WindowFamily {
 public:
  explicit WindowFamily(std::vector<Window> windows);

  static WindowFamily empty(const DiscretizedSpace& space, int floors);
  static WindowFamily full(const DiscretizedSpace& space, int floors);
  /// The same window on every floor.
  static WindowFamily uniform(const Window& window, int floors);

  int floors() const { return static_cast<int>(windows_.size()); }
  const Window& operator[](int floor) const { return windows_.at(static_cast<std::size_t>(floor)); }
  const std::vector<Window>& windows() const { return windows_; }
  const DiscretizedSpace& space() const { return windows_.front().space(); }

  /// Window sites in (floor, node) lexicographic order.
  std::vector<Site> sites() const;
  bool contains(const Site& site) const;
  WindowFamily complement() const;

 private:
  std::vector<Window> windows_;
};

}  // namespace janossy
