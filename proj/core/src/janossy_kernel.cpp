#include "janossy/janossy_kernel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "janossy/linalg.hpp"
#include "janossy/parallel.hpp"
#include "chain_math.hpp"

namespace janossy {

namespace {

void check_windows(const ChainEnsemble& e, const WindowFamily& windows) {
  if (windows.floors() != e.floors() || !windows.space().same_as(e.space())) {
    throw InvalidArgument("window family does not match the ensemble");
  }
}

void check_counts(int particles, int floors, std::span<const int> counts) {
  if (counts.size() != static_cast<std::size_t>(floors)) {
    std::ostringstream os;
    os << "expected " << floors << " counts, got " << counts.size();
    throw InvalidArgument(os.str());
  }
  for (int c : counts) {
    if (c < 0 || c > particles) {
      std::ostringstream os;
      os << "count " << c << " outside [0, " << particles << "]";
      throw InvalidArgument(os.str());
    }
  }
}

// Calls visit(chosen) for every k-subset of pool, in lexicographic order.
void for_each_combination(const std::vector<int>& pool, int k,
                          const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(chosen.size()) == k) {
      visit(chosen);
      return;
    }
    const std::size_t need = static_cast<std::size_t>(k) - chosen.size();
    for (std::size_t i = start; i + need <= pool.size(); ++i) {
      chosen.push_back(pool[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

std::string describe_windows(const WindowFamily& windows) {
  std::ostringstream os;
  os << "windows with node counts [";
  for (int l = 0; l < windows.floors(); ++l) {
    if (l) os << ", ";
    os << windows[l].count() << "/" << windows[l].mask().size();
  }
  os << "]";
  return os.str();
}

}  // namespace

JanossyKernel janossy_kernel_explicit(const ChainEnsemble& ensemble, const WindowFamily& windows) {
  check_windows(ensemble, windows);
  const FloorWeights weights = FloorWeights::complement(windows);
  GramMatrix gram{gram_entries(ensemble, weights), GramVariant::complement, windows};
  const double cond = condition_number(gram.entries);
  if (!(cond <= ensemble.options().max_condition)) {
    throw SingularMatrixError("A^c (complement Gram)", cond, describe_windows(windows));
  }
  BlockKernel kernel = chain_kernel(ensemble, weights, KernelKind::janossy_explicit, "A^c");
  // Pr(no particles in the windows) = det(A^c) / det(A).
  auto log_det = [](const auto& math) { return math.gram_log_det(); };
  const auto num = detail::with_chain_math(ensemble, weights, log_det);
  const auto den = detail::with_chain_math(ensemble, FloorWeights::full(ensemble.space(), ensemble.floors()), log_det);
  const Complex normalization =
      num.first == Complex{} ? Complex{} : num.first / den.first * std::exp(num.second - den.second);
  return JanossyKernel{std::move(kernel), windows, normalization, std::move(gram), cond};
}

Complex janossy_density(const JanossyKernel& jk, std::span<const Site> points) {
  std::vector<int> per_floor(static_cast<std::size_t>(jk.windows.floors()), 0);
  const int n = jk.kernel.ensemble().particles();
  for (const auto& p : points) {
    if (!jk.windows.contains(p)) {
      std::ostringstream os;
      os << "janossy_density: site (" << p.floor << ", " << p.node
         << ") is not inside its floor's window";
      throw InvalidArgument(os.str());
    }
    if (++per_floor[static_cast<std::size_t>(p.floor)] > n) {
      throw InvalidArgument("janossy_density: more than n points on one floor");
    }
  }
  if (points.empty()) return jk.normalization;
  return jk.normalization * determinant(jk.kernel.matrix_at(points));
}

Complex count_probability(const JanossyKernel& jk, std::span<const int> counts) {
  const ChainEnsemble& e = jk.kernel.ensemble();
  check_counts(e.particles(), e.floors(), counts);
  const RVector& w = e.space().weight_vector();

  std::vector<std::vector<int>> pools;
  for (int l = 0; l < e.floors(); ++l) {
    pools.push_back(jk.windows[l].indices());
    if (static_cast<int>(pools.back().size()) < counts[static_cast<std::size_t>(l)]) return {};
  }

  // J vanishes when two points coincide, so ordered k-tuples over I^k reduce
  // to k! copies of each subset; the 1/k! normalization cancels them.
  Complex acc{};
  std::vector<Site> sites;
  std::function<void(int)> rec = [&](int floor) {
    if (floor == e.floors()) {
      double mass = 1.0;
      for (const auto& s : sites) mass *= w(s.node);
      acc += sites.empty() ? Complex{1.0, 0.0}
                           : determinant(jk.kernel.matrix_at(sites)) * mass;
      return;
    }
    for_each_combination(pools[static_cast<std::size_t>(floor)],
                         counts[static_cast<std::size_t>(floor)],
                         [&](const std::vector<int>& chosen) {
                           for (int x : chosen) sites.push_back({floor, x});
                           rec(floor + 1);
                           sites.resize(sites.size() - chosen.size());
                         });
  };
  rec(0);
  return jk.normalization * acc;
}

double count_probability(const ChainEnsemble& ensemble, const WindowFamily& windows,
                         std::span<const int> counts) {
  check_windows(ensemble, windows);
  check_counts(ensemble.particles(), ensemble.floors(), counts);
  try {
    return count_probability(janossy_kernel_explicit(ensemble, windows), counts).real();
  } catch (const SingularMatrixError&) {
    const auto table = count_distribution_fredholm(ensemble, windows);
    std::size_t index = 0;
    std::size_t stride = 1;
    for (int c : counts) {
      index += static_cast<std::size_t>(c) * stride;
      stride *= static_cast<std::size_t>(ensemble.particles() + 1);
    }
    return table[index];
  }
}

std::vector<double> count_distribution_fredholm(const ChainEnsemble& ensemble,
                                                const WindowFamily& windows) {
  check_windows(ensemble, windows);
  const RestrictedOperator op = restrict_to(correlation_kernel(ensemble), windows);
  const int floors = ensemble.floors();
  const int base = ensemble.particles() + 1;
  std::size_t total = 1;
  for (int l = 0; l < floors; ++l) total *= static_cast<std::size_t>(base);

  const auto size = static_cast<Eigen::Index>(op.size());
  const CMatrix id = CMatrix::Identity(size, size);
  auto digits = [&](std::size_t index) {
    std::vector<int> d(static_cast<std::size_t>(floors));
    for (auto& v : d) {
      v = static_cast<int>(index % static_cast<std::size_t>(base));
      index /= static_cast<std::size_t>(base);
    }
    return d;
  };
  auto root = [&](long long power) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(power % base) / base;
    return Complex(std::cos(angle), std::sin(angle));
  };

  // F(t) at every grid point t_l = omega^{j_l}.
  std::vector<Complex> samples(total);
  parallel_for(total, [&](std::size_t idx) {
    const auto j = digits(idx);
    CMatrix scaled = op.matrix();
    for (Eigen::Index r = 0; r < size; ++r) {
      const Site& s = op.sites()[static_cast<std::size_t>(r)];
      scaled.row(r) *= (1.0 - root(j[static_cast<std::size_t>(s.floor)]));
    }
    samples[idx] = determinant(id - scaled);
  });

  std::vector<double> out(total);
  for (std::size_t k = 0; k < total; ++k) {
    const auto kd = digits(k);
    Complex acc{};
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto jd = digits(idx);
      long long power = 0;
      for (int l = 0; l < floors; ++l) {
        power += static_cast<long long>(jd[static_cast<std::size_t>(l)]) *
                 kd[static_cast<std::size_t>(l)];
      }
      acc += samples[idx] * std::conj(root(power));
    }
    out[k] = acc.real() / static_cast<double>(total);
  }
  return out;
}

std::vector<ExtremePoint> kth_extreme_distribution(const ChainEnsemble& ensemble, int floor, int k,
                                                   std::span<const double> s_grid) {
  const int n = ensemble.particles();
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "kth_extreme_distribution: rank " << k << " outside [1, " << n << "]";
    throw InvalidArgument(os.str());
  }
  const int selected[] = {floor};
  const ChainEnsemble marginal = marginal_ensemble(ensemble, selected);
  const DiscretizedSpace& space = marginal.space();

  std::vector<ExtremePoint> out(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) {
    ExtremePoint& pt = out[i];
    pt.s = s_grid[i];
    pt.count_probabilities.assign(static_cast<std::size_t>(k) + 1, 0.0);
    const Window window = Window::at_or_above(space, pt.s);
    const WindowFamily family({window});
    if (window.is_empty()) {
      pt.count_probabilities[0] = 1.0;
    } else if (window.is_full()) {
      if (k == n) pt.count_probabilities[static_cast<std::size_t>(k)] = 1.0;
    } else {
      try {
        const JanossyKernel jk = janossy_kernel_explicit(marginal, family);
        for (int j = 0; j <= k; ++j) {
          const int counts[] = {j};
          pt.count_probabilities[static_cast<std::size_t>(j)] = count_probability(jk, counts).real();
        }
      } catch (const SingularMatrixError& err) {
        pt.warnings.push_back(std::string("explicit Janossy kernel unavailable (") + err.what() +
                              "); counts taken from the Fredholm generating function");
        const auto table = count_distribution_fredholm(marginal, family);
        for (int j = 0; j <= k; ++j) {
          pt.count_probabilities[static_cast<std::size_t>(j)] = table[static_cast<std::size_t>(j)];
        }
      }
    }
    double below = 0.0;
    for (int j = 0; j < k; ++j) below += pt.count_probabilities[static_cast<std::size_t>(j)];
    pt.tail = 1.0 - below;
    pt.cdf = below;
  });
  return out;
}

JanossyKernel biorthogonal_janossy_recipe(const ChainEnsemble& ensemble, const Window& window) {
  if (ensemble.floors() != 1) {
    throw InvalidArgument("biorthogonal_janossy_recipe needs a one-floor ensemble");
  }
  const WindowFamily windows({window});
  check_windows(ensemble, windows);

  // Step 1: the same ensemble with X replaced by X \ I.
  const FloorWeights weights = FloorWeights::complement(windows);
  const CMatrix& f = ensemble.f_matrix();
  const CMatrix& phi = ensemble.phi_matrix();
  GramMatrix gram{f.transpose() * weights[0].cast<Complex>().asDiagonal() * phi,
                  GramVariant::complement, windows};
  const double cond = condition_number(gram.entries);
  if (!(cond <= ensemble.options().max_condition)) {
    throw SingularMatrixError("A^c (biorthogonal recipe)", cond, describe_windows(windows));
  }

  // Step 2: biorthogonal bases from P G = L U:
  //   f~ = L^-1 P f,  phi~ = phi U^-1,  so <f~_i, phi~_j>_{I^c} = delta_ij.
  const Eigen::PartialPivLU<CMatrix> lu(gram.entries);
  const CMatrix& packed = lu.matrixLU();
  const CMatrix f_tilde_t =
      packed.triangularView<Eigen::UnitLower>().solve(lu.permutationP() * f.transpose());
  const CMatrix phi_tilde_t = packed.triangularView<Eigen::Upper>().transpose().solve(phi.transpose());

  // Step 3: K(x, y) = sum_i phi~_i(x) f~_i(y), extended to every node.
  std::vector<CMatrix> blocks{phi_tilde_t.transpose() * f_tilde_t};

  const LogDeterminant num = log_determinant(gram.entries);
  const LogDeterminant den = log_determinant(ensemble.gram());
  const Complex normalization =
      num.is_zero() ? Complex{} : num.phase / den.phase * std::exp(num.log_abs - den.log_abs);
  return JanossyKernel{BlockKernel(ensemble, KernelKind::janossy_explicit, std::move(blocks)),
                       windows, normalization, std::move(gram), cond};
}

}  // namespace janossy
