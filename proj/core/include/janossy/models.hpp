#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "janossy/chain_ensemble.hpp"
#include "janossy/measure_space.hpp"

namespace janossy {

/// V(x) = sum_k coefficients[k] x^k.
struct Potential {
  std::vector<double> coefficients;

  double operator()(double x) const;
  /// V(x) = x^2.
  static Potential gaussian() { return Potential{{0.0, 0.0, 1.0}}; }
};

/// Description of a DiscretizedSpace, kept so a model can be rebuilt on a
/// refined space (for instance with a breakpoint added at a threshold).
struct SpaceSpec {
  SpaceKind kind = SpaceKind::quadrature;
  std::vector<double> points;
  std::vector<double> masses;
  Interval interval{-6.0, 6.0};
  int order = 64;
  std::vector<double> breakpoints;

  DiscretizedSpace build() const;
  static SpaceSpec quadrature(Interval interval, int order, std::vector<double> breakpoints = {});
  static SpaceSpec discrete(std::vector<double> points, std::vector<double> masses);
};

struct UnitarySpec {
  Potential potential = Potential::gaussian();
  int n = 1;
  SpaceSpec space;
};

/// Eigenvalues of M Hermitian matrices coupled in a chain.
struct CoupledChainSpec {
  int n = 1;
  std::vector<Potential> potentials;  ///< V_1..V_M
  std::vector<double> couplings;      ///< c_1..c_{M-1}
  SpaceSpec space;
};

/// n non-intersecting heat-kernel paths observed at times t_1..t_M, started
/// at `start` at time t_0 and conditioned to end at `end` at time t_{M+1}.
struct KarlinMcGregorSpec {
  std::string transition = "heat";
  std::vector<double> times;  ///< t_0..t_{M+1}
  std::vector<double> start;
  std::vector<double> end;
  int order = 96;
  /// Overrides the automatic space when set.
  std::optional<SpaceSpec> space;
};

struct RandomSpec {
  std::uint64_t seed = 0;
  int nodes = 4;
  int n = 2;
  int floors = 1;
  /// Totally positive entries instead of independent uniforms.
  bool positive = false;
};

/// Explicit node-sampled data.
struct ExplicitSpec {
  SpaceSpec space;
  std::vector<CVector> f;
  std::vector<CVector> phi;
  std::vector<CMatrix> links;
};

using ChainModelSpec =
    std::variant<UnitarySpec, CoupledChainSpec, KarlinMcGregorSpec, RandomSpec, ExplicitSpec>;

/// f_j = phi_j = x^{j-1} e^{-V/2}. For n > 8 the monomials are replaced by a
/// basis orthonormal in the discrete inner product (same span).
ChainEnsemble build_unitary(const Potential& potential, int n, const DiscretizedSpace& space,
                            EnsembleOptions options = {});
ChainEnsemble build_unitary(const UnitarySpec& spec, EnsembleOptions options = {});

/// f_j = x^{j-1} e^{-V_1/2}, phi_j = y^{j-1} e^{-V_M/2},
/// g_{l,l+1}(x, y) = e^{c_l x y} e^{-V_{l+1}(y)} for interior floors l+1 < M and
/// plain e^{c_l x y} for the last link. For M = 1, V_1 is split by halves.
ChainEnsemble build_coupled_chain(const CoupledChainSpec& spec, EnsembleOptions options = {});

/// p_{s,t}(x, y) = exp(-(y - x)^2 / (2 (t - s))) / sqrt(2 pi (t - s)).
double heat_kernel(double s, double t, double x, double y);
/// Endpoint range widened by 6 sqrt(t_{M+1} - t_0), Gauss-Legendre of spec.order.
SpaceSpec karlin_mcgregor_space(const KarlinMcGregorSpec& spec);
ChainEnsemble build_karlin_mcgregor(const KarlinMcGregorSpec& spec, EnsembleOptions options = {});

/// Exact-discrete space on nodes 0..P-1 with masses and every sampled entry
/// uniform in [0.2, 1.2].
ChainEnsemble build_random(std::uint64_t seed, int nodes, int n, int floors,
                           EnsembleOptions options = {});
/// Nodes sorted in [0, 1], f_i = e^{a_i x}, phi_j = e^{b_j y}, g = e^{c x y} with
/// increasing a, b and c > 0: every determinant in the density is positive.
ChainEnsemble build_random_positive(std::uint64_t seed, int nodes, int n, int floors,
                                    EnsembleOptions options = {});
ChainEnsemble build_random(const RandomSpec& spec, EnsembleOptions options = {});

ChainEnsemble build_model(const ChainModelSpec& spec, EnsembleOptions options = {});

/// The space description a spec builds on (nullopt for random instances).
std::optional<SpaceSpec> model_space(const ChainModelSpec& spec);
/// Copy of spec with its space replaced.
ChainModelSpec with_space(const ChainModelSpec& spec, SpaceSpec space);
/// Number of floors the spec produces.
int model_floors(const ChainModelSpec& spec);

}  // namespace janossy
