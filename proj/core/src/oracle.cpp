#include "janossy/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "janossy/linalg.hpp"
#include "janossy/parallel.hpp"

namespace janossy {

namespace {

constexpr std::size_t kChunk = 4096;

double config_count(std::size_t nodes, int digits) {
  return std::pow(static_cast<double>(nodes), static_cast<double>(digits));
}

// Neumaier-compensated sum of complex values in a fixed order.
class CompensatedSum {
 public:
  void add(Complex v) {
    add_part(re_, re_c_, v.real());
    add_part(im_, im_c_, v.imag());
  }
  Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& sum, double& comp, double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

// Runs visit(chunk, begin, end) over [0, total) in fixed kChunk-sized
// pieces, possibly concurrently, and returns per-chunk results in order.
template <class T, class F>
std::vector<T> chunked(std::size_t total, F&& visit) {
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<T> out(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    out[c] = visit(begin, std::min(total, begin + kChunk));
  });
  return out;
}

void decode(std::size_t index, std::size_t base, std::span<int> coords) {
  for (auto& v : coords) {
    v = static_cast<int>(index % base);
    index /= base;
  }
}

double factorial_ratio(int n, int k) {
  double r = 1.0;
  for (int i = n - k + 1; i <= n; ++i) r *= i;
  return r;
}

std::vector<std::vector<int>> split_by_floor(const ChainEnsemble& e, std::span<const Site> points) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(e.floors()));
  for (const auto& p : points) {
    if (p.floor < 0 || p.floor >= e.floors() || p.node < 0 || p.node >= e.nodes()) {
      throw InvalidArgument("oracle: site outside the ensemble");
    }
    auto& v = out[static_cast<std::size_t>(p.floor)];
    v.push_back(p.node);
    if (static_cast<int>(v.size()) > e.particles()) {
      throw InvalidArgument("oracle: more than n points on one floor");
    }
  }
  return out;
}

}  // namespace

EnumeratedDistribution::EnumeratedDistribution(ChainEnsemble ensemble, std::vector<Complex> masses,
                                               Complex raw_partition)
    : ensemble_(std::move(ensemble)), masses_(std::move(masses)), raw_partition_(raw_partition) {
  const auto digits = static_cast<std::size_t>(ensemble_.floors() * ensemble_.particles());
  strides_.resize(digits);
  std::size_t s = 1;
  for (std::size_t d = 0; d < digits; ++d) {
    strides_[d] = s;
    s *= static_cast<std::size_t>(ensemble_.nodes());
  }
}

Complex EnumeratedDistribution::total_mass() const {
  CompensatedSum acc;
  for (const auto& m : masses_) acc.add(m);
  return acc.value();
}

int EnumeratedDistribution::coordinate(std::size_t config, int floor, int particle) const {
  const auto d = static_cast<std::size_t>(floor * ensemble_.particles() + particle);
  return static_cast<int>((config / strides_[d]) % static_cast<std::size_t>(ensemble_.nodes()));
}

Complex configuration_weight(const ChainEnsemble& e, std::span<const int> coords) {
  const int n = e.particles();
  const int floors = e.floors();
  auto at = [&](int l, int i) { return coords[static_cast<std::size_t>(l * n + i)]; };
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = e.f_matrix()(at(0, j), i);
  Complex value = small_determinant(m);
  for (int l = 0; l + 1 < floors && value != Complex{}; ++l) {
    const CMatrix& g = e.link(l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(at(l, i), at(l + 1, j));
    value *= small_determinant(m);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = e.phi_matrix()(at(floors - 1, i), j);
  return value * small_determinant(m);
}

EnumeratedDistribution enumerate_density(const ChainEnsemble& ensemble, EnumerationOptions options) {
  if (ensemble.space().kind() != SpaceKind::discrete) {
    throw InvalidArgument("enumerate_density needs an exact-discrete space");
  }
  const int digits = ensemble.floors() * ensemble.particles();
  const auto p = static_cast<std::size_t>(ensemble.nodes());
  const double required = config_count(p, digits);
  if (required > options.budget) throw BudgetExceeded(required, options.budget);
  const auto total = static_cast<std::size_t>(required);
  const RVector& w = ensemble.space().weight_vector();

  std::vector<Complex> masses(total);
  const auto partial = chunked<Complex>(total, [&](std::size_t begin, std::size_t end) {
    std::vector<int> coords(static_cast<std::size_t>(digits));
    CompensatedSum acc;
    for (std::size_t c = begin; c < end; ++c) {
      decode(c, p, coords);
      double mass = 1.0;
      for (int x : coords) mass *= w(x);
      masses[c] = configuration_weight(ensemble, coords) * mass;
      acc.add(masses[c]);
    }
    return acc.value();
  });
  CompensatedSum z;
  for (const auto& v : partial) z.add(v);
  const Complex raw = z.value();
  if (raw == Complex{}) throw SingularMatrixError("enumerated partition function", std::numeric_limits<double>::infinity());
  for (auto& m : masses) m /= raw;
  return EnumeratedDistribution(ensemble, std::move(masses), raw);
}

double brute_correlation(const EnumeratedDistribution& dist, std::span<const Site> points) {
  const ChainEnsemble& e = dist.ensemble();
  const auto fixed = split_by_floor(e, points);
  const RVector& w = e.space().weight_vector();
  double factor = 1.0;
  double weight = 1.0;
  for (int l = 0; l < e.floors(); ++l) {
    const auto& nodes = fixed[static_cast<std::size_t>(l)];
    factor *= factorial_ratio(e.particles(), static_cast<int>(nodes.size()));
    for (int x : nodes) weight *= w(x);
  }
  CompensatedSum acc;
  for (std::size_t c = 0; c < dist.configurations(); ++c) {
    bool match = true;
    for (int l = 0; l < e.floors() && match; ++l) {
      const auto& nodes = fixed[static_cast<std::size_t>(l)];
      for (std::size_t i = 0; i < nodes.size() && match; ++i) {
        match = dist.coordinate(c, l, static_cast<int>(i)) == nodes[i];
      }
    }
    if (match) acc.add(dist.masses()[c]);
  }
  return factor * acc.value().real() / weight;
}

double brute_janossy(const EnumeratedDistribution& dist, const WindowFamily& windows,
                     std::span<const Site> points) {
  const ChainEnsemble& e = dist.ensemble();
  if (windows.floors() != e.floors()) throw InvalidArgument("brute_janossy: floor count mismatch");
  for (const auto& p : points) {
    if (!windows.contains(p)) throw InvalidArgument("brute_janossy: site outside its window");
  }
  const auto fixed = split_by_floor(e, points);
  const RVector& w = e.space().weight_vector();
  double factor = 1.0;
  double weight = 1.0;
  for (int l = 0; l < e.floors(); ++l) {
    const auto& nodes = fixed[static_cast<std::size_t>(l)];
    factor *= factorial_ratio(e.particles(), static_cast<int>(nodes.size()));
    for (int x : nodes) weight *= w(x);
  }
  CompensatedSum acc;
  for (std::size_t c = 0; c < dist.configurations(); ++c) {
    bool match = true;
    for (int l = 0; l < e.floors() && match; ++l) {
      const auto& nodes = fixed[static_cast<std::size_t>(l)];
      const Window& window = windows[l];
      for (int i = 0; i < e.particles() && match; ++i) {
        const int x = dist.coordinate(c, l, i);
        match = static_cast<std::size_t>(i) < nodes.size()
                    ? x == nodes[static_cast<std::size_t>(i)]
                    : !window.contains(static_cast<std::size_t>(x));
      }
    }
    if (match) acc.add(dist.masses()[c]);
  }
  return factor * acc.value().real() / weight;
}

double brute_count_probability(const EnumeratedDistribution& dist, const WindowFamily& windows,
                               std::span<const int> counts) {
  const ChainEnsemble& e = dist.ensemble();
  if (windows.floors() != e.floors() || counts.size() != static_cast<std::size_t>(e.floors())) {
    throw InvalidArgument("brute_count_probability: floor count mismatch");
  }
  CompensatedSum acc;
  for (std::size_t c = 0; c < dist.configurations(); ++c) {
    bool match = true;
    for (int l = 0; l < e.floors() && match; ++l) {
      int inside = 0;
      for (int i = 0; i < e.particles(); ++i) {
        inside += windows[l].contains(static_cast<std::size_t>(dist.coordinate(c, l, i))) ? 1 : 0;
      }
      match = inside == counts[static_cast<std::size_t>(l)];
    }
    if (match) acc.add(dist.masses()[c]);
  }
  return acc.value().real();
}

double quad_oracle_m1(const ChainEnsemble& ensemble, double s, int k, double budget) {
  if (ensemble.floors() != 1) throw InvalidArgument("quad_oracle_m1 needs a one-floor ensemble");
  const int n = ensemble.particles();
  if (n > 3) throw InvalidArgument("quad_oracle_m1 supports n <= 3");
  if (k < 0) throw InvalidArgument("quad_oracle_m1: negative count");
  if (k > n) return 0.0;
  const auto p = static_cast<std::size_t>(ensemble.nodes());
  const double required = config_count(p, n);
  if (required > budget) throw BudgetExceeded(required, budget);
  const auto total = static_cast<std::size_t>(required);
  const auto& space = ensemble.space();

  // Per chunk: [total mass, mass with exactly k coordinates >= s].
  const auto partial = chunked<std::array<Complex, 2>>(total, [&](std::size_t begin, std::size_t end) {
    std::vector<int> coords(static_cast<std::size_t>(n));
    CompensatedSum all;
    CompensatedSum hit;
    for (std::size_t c = begin; c < end; ++c) {
      decode(c, p, coords);
      double mass = 1.0;
      int above = 0;
      for (int x : coords) {
        mass *= space.weight(static_cast<std::size_t>(x));
        above += space.node(static_cast<std::size_t>(x)) >= s ? 1 : 0;
      }
      const Complex v = configuration_weight(ensemble, coords) * mass;
      all.add(v);
      if (above == k) hit.add(v);
    }
    return std::array<Complex, 2>{all.value(), hit.value()};
  });
  CompensatedSum all;
  CompensatedSum hit;
  for (const auto& v : partial) {
    all.add(v[0]);
    hit.add(v[1]);
  }
  return (hit.value() / all.value()).real();
}

Complex heine_enumeration(const DiscretizedSpace& space, const CMatrix& psi, const CMatrix& chi,
                          double budget) {
  const auto p = static_cast<Eigen::Index>(space.size());
  if (psi.rows() != p || chi.rows() != p || psi.cols() != chi.cols()) {
    throw InvalidArgument("heine_enumeration: families must be n columns sampled on every node");
  }
  const int n = static_cast<int>(psi.cols());
  const double required = config_count(space.size(), n);
  if (required > budget) throw BudgetExceeded(required, budget);
  const auto total = static_cast<std::size_t>(required);

  const auto partial = chunked<Complex>(total, [&](std::size_t begin, std::size_t end) {
    std::vector<int> coords(static_cast<std::size_t>(n));
    CMatrix a(n, n);
    CMatrix b(n, n);
    CompensatedSum acc;
    for (std::size_t c = begin; c < end; ++c) {
      decode(c, space.size(), coords);
      double mass = 1.0;
      for (int j = 0; j < n; ++j) {
        const int x = coords[static_cast<std::size_t>(j)];
        mass *= space.weight(static_cast<std::size_t>(x));
        for (int i = 0; i < n; ++i) {
          a(i, j) = psi(x, i);
          b(i, j) = chi(x, i);
        }
      }
      acc.add(small_determinant(a) * small_determinant(b) * mass);
    }
    return acc.value();
  });
  CompensatedSum z;
  for (const auto& v : partial) z.add(v);
  return z.value() / std::tgamma(static_cast<double>(n) + 1.0);
}

}  // namespace janossy
