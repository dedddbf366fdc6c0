#include "janossy/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "janossy/random.hpp"

namespace janossy {

namespace {

constexpr int kMonomialLimit = 8;

// Columns x^{j-1} e^{-V(x)/2}, or for n > kMonomialLimit the discrete
// orthonormal polynomials times e^{-V/2} from a Stieltjes recurrence with
// one step of reorthogonalization.
CMatrix weighted_polynomials(const DiscretizedSpace& space, const Potential& v, int n) {
  const auto p = static_cast<Eigen::Index>(space.size());
  const Eigen::Map<const RVector> x(space.nodes().data(), static_cast<Eigen::Index>(space.size()));
  const RVector& w = space.weight_vector();
  RVector base(p);
  for (Eigen::Index i = 0; i < p; ++i) base(i) = std::exp(-0.5 * v(x(i)));

  RVector cols(p * n);
  Eigen::Map<Eigen::MatrixXd> out(cols.data(), p, n);
  if (n <= kMonomialLimit) {
    for (Eigen::Index i = 0; i < p; ++i) {
      double power = 1.0;
      for (int j = 0; j < n; ++j) {
        out(i, j) = power * base(i);
        power *= x(i);
      }
    }
    return out.cast<Complex>();
  }

  auto inner = [&](const RVector& a, const RVector& b) { return (a.array() * b.array() * w.array()).sum(); };
  RVector prev = RVector::Zero(p);
  RVector cur = base / std::sqrt(inner(base, base));
  out.col(0) = cur;
  double beta = 0.0;
  for (int j = 1; j < n; ++j) {
    const double alpha = inner(x.cwiseProduct(cur), cur);
    RVector next = x.cwiseProduct(cur) - alpha * cur - beta * prev;
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        const RVector col = out.col(k);
        next -= inner(next, col) * col;
      }
    }
    const double norm = std::sqrt(inner(next, next));
    if (!(norm > 0.0)) throw InvalidArgument("orthonormal basis: polynomial degree exceeds the node count");
    next /= norm;
    beta = norm;
    prev = cur;
    cur = next;
    out.col(j) = cur;
  }
  return out.cast<Complex>();
}

std::vector<CVector> columns(const CMatrix& m) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

void check_particles(int n, const DiscretizedSpace& space) {
  if (n < 1) throw InvalidArgument("model needs n >= 1");
  if (static_cast<std::size_t>(n) > space.size()) {
    std::ostringstream os;
    os << "n = " << n << " exceeds the " << space.size() << " nodes of the space (A would be rank deficient)";
    throw InvalidArgument(os.str());
  }
}

void check_random(int nodes, int n, int floors) {
  if (n < 1 || floors < 1) throw InvalidArgument("random model needs n >= 1 and M >= 1");
  if (nodes < n) {
    std::ostringstream os;
    os << "random model needs P >= n (P = " << nodes << ", n = " << n << ")";
    throw InvalidArgument(os.str());
  }
}

void check_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw InvalidArgument(std::string(what) + " must be strictly increasing");
    }
  }
}

}  // namespace

double Potential::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

DiscretizedSpace SpaceSpec::build() const {
  if (kind == SpaceKind::discrete) return DiscretizedSpace::discrete(points, masses);
  return DiscretizedSpace::quadrature(interval, order, breakpoints);
}

SpaceSpec SpaceSpec::quadrature(Interval interval, int order, std::vector<double> breakpoints) {
  SpaceSpec s;
  s.kind = SpaceKind::quadrature;
  s.interval = interval;
  s.order = order;
  s.breakpoints = std::move(breakpoints);
  return s;
}

SpaceSpec SpaceSpec::discrete(std::vector<double> points, std::vector<double> masses) {
  SpaceSpec s;
  s.kind = SpaceKind::discrete;
  s.points = std::move(points);
  s.masses = std::move(masses);
  return s;
}

ChainEnsemble build_unitary(const Potential& potential, int n, const DiscretizedSpace& space,
                            EnsembleOptions options) {
  check_particles(n, space);
  const CMatrix f = weighted_polynomials(space, potential, n);
  return ChainEnsemble(space, columns(f), columns(f), {}, options);
}

ChainEnsemble build_unitary(const UnitarySpec& spec, EnsembleOptions options) {
  return build_unitary(spec.potential, spec.n, spec.space.build(), options);
}

ChainEnsemble build_coupled_chain(const CoupledChainSpec& spec, EnsembleOptions options) {
  const int m = static_cast<int>(spec.potentials.size());
  if (m < 1) throw InvalidArgument("coupled chain needs at least one potential");
  if (spec.couplings.size() != static_cast<std::size_t>(m - 1)) {
    std::ostringstream os;
    os << "coupled chain with " << m << " potentials needs " << m - 1 << " couplings, got "
       << spec.couplings.size();
    throw InvalidArgument(os.str());
  }
  const DiscretizedSpace space = spec.space.build();
  check_particles(spec.n, space);
  const auto p = static_cast<Eigen::Index>(space.size());
  const Eigen::Map<const RVector> x(space.nodes().data(), static_cast<Eigen::Index>(space.size()));

  const CMatrix f = weighted_polynomials(space, spec.potentials.front(), spec.n);
  const CMatrix phi = weighted_polynomials(space, spec.potentials.back(), spec.n);
  std::vector<CMatrix> links;
  for (int l = 0; l + 1 < m; ++l) {
    const double c = spec.couplings[static_cast<std::size_t>(l)];
    const bool interior = l + 1 < m - 1;
    const Potential& v = spec.potentials[static_cast<std::size_t>(l + 1)];
    CMatrix g(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double right = interior ? std::exp(-v(x(j))) : 1.0;
      for (Eigen::Index i = 0; i < p; ++i) g(i, j) = std::exp(c * x(i) * x(j)) * right;
    }
    links.push_back(std::move(g));
  }
  return ChainEnsemble(space, columns(f), columns(phi), std::move(links), options);
}

double heat_kernel(double s, double t, double x, double y) {
  const double dt = t - s;
  return std::exp(-(y - x) * (y - x) / (2.0 * dt)) / std::sqrt(2.0 * std::numbers::pi * dt);
}

SpaceSpec karlin_mcgregor_space(const KarlinMcGregorSpec& spec) {
  if (spec.space) return *spec.space;
  if (spec.times.size() < 3 || spec.start.empty() || spec.end.empty()) {
    throw InvalidArgument("karlin-mcgregor needs at least three times and nonempty endpoints");
  }
  const auto [slo, shi] = std::minmax_element(spec.start.begin(), spec.start.end());
  const auto [elo, ehi] = std::minmax_element(spec.end.begin(), spec.end.end());
  const double pad = 6.0 * std::sqrt(spec.times.back() - spec.times.front());
  return SpaceSpec::quadrature({std::min(*slo, *elo) - pad, std::max(*shi, *ehi) + pad}, spec.order);
}

ChainEnsemble build_karlin_mcgregor(const KarlinMcGregorSpec& spec, EnsembleOptions options) {
  if (spec.transition != "heat") {
    throw InvalidArgument("unknown transition kernel '" + spec.transition + "' (known: heat)");
  }
  if (spec.times.size() < 3) throw InvalidArgument("karlin-mcgregor needs times t_0..t_{M+1} with M >= 1");
  check_increasing(spec.times, "times");
  check_increasing(spec.start, "start points");
  check_increasing(spec.end, "end points");
  if (spec.start.size() != spec.end.size()) {
    throw InvalidArgument("start and end point lists must have the same length n");
  }
  const int n = static_cast<int>(spec.start.size());
  const int m = static_cast<int>(spec.times.size()) - 2;
  const DiscretizedSpace space = karlin_mcgregor_space(spec).build();
  check_particles(n, space);
  const auto p = static_cast<Eigen::Index>(space.size());
  const Eigen::Map<const RVector> x(space.nodes().data(), static_cast<Eigen::Index>(space.size()));
  const auto& t = spec.times;

  std::vector<CVector> f, phi;
  for (int i = 0; i < n; ++i) {
    CVector fi(p), pi(p);
    for (Eigen::Index k = 0; k < p; ++k) {
      fi(k) = heat_kernel(t[0], t[1], spec.start[static_cast<std::size_t>(i)], x(k));
      pi(k) = heat_kernel(t[static_cast<std::size_t>(m)], t[static_cast<std::size_t>(m + 1)], x(k),
                          spec.end[static_cast<std::size_t>(i)]);
    }
    f.push_back(std::move(fi));
    phi.push_back(std::move(pi));
  }
  std::vector<CMatrix> links;
  for (int l = 0; l + 1 < m; ++l) {
    const double s0 = t[static_cast<std::size_t>(l + 1)];
    const double s1 = t[static_cast<std::size_t>(l + 2)];
    CMatrix g(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < p; ++i) g(i, j) = heat_kernel(s0, s1, x(i), x(j));
    }
    links.push_back(std::move(g));
  }
  return ChainEnsemble(space, std::move(f), std::move(phi), std::move(links), options);
}

ChainEnsemble build_random(std::uint64_t seed, int nodes, int n, int floors, EnsembleOptions options) {
  check_random(nodes, n, floors);
  Rng rng(seed);
  std::vector<double> points(static_cast<std::size_t>(nodes));
  std::vector<double> masses(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    points[static_cast<std::size_t>(i)] = i;
    masses[static_cast<std::size_t>(i)] = rng.uniform(0.2, 1.2);
  }
  auto vectors = [&] {
    std::vector<CVector> out;
    for (int j = 0; j < n; ++j) {
      CVector v(nodes);
      for (int i = 0; i < nodes; ++i) v(i) = rng.uniform(0.2, 1.2);
      out.push_back(std::move(v));
    }
    return out;
  };
  auto f = vectors();
  auto phi = vectors();
  std::vector<CMatrix> links;
  for (int l = 0; l + 1 < floors; ++l) {
    CMatrix g(nodes, nodes);
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) g(i, j) = rng.uniform(0.2, 1.2);
    }
    links.push_back(std::move(g));
  }
  return ChainEnsemble(DiscretizedSpace::discrete(std::move(points), std::move(masses)), std::move(f),
                       std::move(phi), std::move(links), options);
}

ChainEnsemble build_random_positive(std::uint64_t seed, int nodes, int n, int floors,
                                    EnsembleOptions options) {
  check_random(nodes, n, floors);
  Rng rng(seed);
  std::vector<double> points(static_cast<std::size_t>(nodes));
  // Gaps bounded below keep the nodes distinct and the kernels well conditioned.
  double acc = 0.0;
  for (auto& x : points) {
    acc += rng.uniform(0.5, 1.5);
    x = acc;
  }
  for (auto& x : points) x /= acc;
  std::vector<double> masses(static_cast<std::size_t>(nodes));
  for (auto& m : masses) m = rng.uniform(0.2, 1.2);
  auto rates = [&] {
    std::vector<double> r(static_cast<std::size_t>(n));
    double a = rng.uniform(-1.0, 0.0);
    for (auto& v : r) {
      v = a;
      a += rng.uniform(0.5, 1.5);
    }
    return r;
  };
  const auto a = rates();
  const auto b = rates();
  auto exponentials = [&](const std::vector<double>& r) {
    std::vector<CVector> out;
    for (double rate : r) {
      CVector v(nodes);
      for (int i = 0; i < nodes; ++i) v(i) = std::exp(rate * points[static_cast<std::size_t>(i)]);
      out.push_back(std::move(v));
    }
    return out;
  };
  auto f = exponentials(a);
  auto phi = exponentials(b);
  std::vector<CMatrix> links;
  for (int l = 0; l + 1 < floors; ++l) {
    const double c = rng.uniform(0.5, 1.5);
    CMatrix g(nodes, nodes);
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        g(i, j) = std::exp(c * points[static_cast<std::size_t>(i)] * points[static_cast<std::size_t>(j)]);
      }
    }
    links.push_back(std::move(g));
  }
  return ChainEnsemble(DiscretizedSpace::discrete(std::move(points), std::move(masses)), std::move(f),
                       std::move(phi), std::move(links), options);
}

ChainEnsemble build_random(const RandomSpec& spec, EnsembleOptions options) {
  return spec.positive ? build_random_positive(spec.seed, spec.nodes, spec.n, spec.floors, options)
                       : build_random(spec.seed, spec.nodes, spec.n, spec.floors, options);
}

ChainEnsemble build_model(const ChainModelSpec& spec, EnsembleOptions options) {
  return std::visit(
      [&](const auto& s) -> ChainEnsemble {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UnitarySpec>) {
          return build_unitary(s, options);
        } else if constexpr (std::is_same_v<T, CoupledChainSpec>) {
          return build_coupled_chain(s, options);
        } else if constexpr (std::is_same_v<T, KarlinMcGregorSpec>) {
          return build_karlin_mcgregor(s, options);
        } else if constexpr (std::is_same_v<T, RandomSpec>) {
          return build_random(s, options);
        } else {
          return ChainEnsemble(s.space.build(), s.f, s.phi, s.links, options);
        }
      },
      spec);
}

std::optional<SpaceSpec> model_space(const ChainModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::optional<SpaceSpec> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RandomSpec>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, KarlinMcGregorSpec>) {
          return karlin_mcgregor_space(s);
        } else {
          return s.space;
        }
      },
      spec);
}

ChainModelSpec with_space(const ChainModelSpec& spec, SpaceSpec space) {
  return std::visit(
      [&](auto s) -> ChainModelSpec {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RandomSpec> || std::is_same_v<T, ExplicitSpec>) {
          throw InvalidArgument("this model's space is fixed by its sampled data");
        } else {
          s.space = std::move(space);
          return s;
        }
      },
      spec);
}

int model_floors(const ChainModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UnitarySpec>) {
          return 1;
        } else if constexpr (std::is_same_v<T, CoupledChainSpec>) {
          return static_cast<int>(s.potentials.size());
        } else if constexpr (std::is_same_v<T, KarlinMcGregorSpec>) {
          return static_cast<int>(s.times.size()) - 2;
        } else if constexpr (std::is_same_v<T, RandomSpec>) {
          return s.floors;
        } else {
          return static_cast<int>(s.links.size()) + 1;
        }
      },
      spec);
}

}  // namespace janossy
