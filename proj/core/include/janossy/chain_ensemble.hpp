#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "janossy/measure_space.hpp"
#include "janossy/types.hpp"

namespace janossy {

enum class Precision { automatic, standard, extended };

struct EnsembleOptions {
  /// Construction rejects Gram matrices whose condition number exceeds this.
  double max_condition = 1e12;
  /// Working precision of chain convolutions, Gram matrices and kernel
  /// assembly. Extended uses long double (80-bit on x86); automatic picks it
  /// for spaces with at most kExtendedNodeLimit nodes. Results are stored in double.
  Precision precision = Precision::automatic;
};

inline constexpr std::size_t kExtendedNodeLimit = 256;

using XMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

/// Long double values of f, phi and the links, for ensembles whose data is
/// derived from another ensemble (marginals) and would otherwise be rounded.
struct ExtendedData {
  XMatrix f;
  XMatrix phi;
  std::vector<XMatrix> links;
};

/// Per-floor integration weights. Floor l integrates against mu, against mu
/// restricted to I_l^c, or against mu restricted to I_l, depending on how
/// the object was built. All restricted convolutions are driven by one of these.
class FloorWeights {
 public:
  static FloorWeights full(const DiscretizedSpace& space, int floors);
  /// mu restricted to I_l^c on floor l.
  static FloorWeights complement(const WindowFamily& windows);
  /// mu restricted to I_l on floor l.
  static FloorWeights inside(const WindowFamily& windows);

  /// Copy with floor `floor` restricted to `window` (on top of what is there).
  FloorWeights restricted(int floor, const Window& window) const;

  int floors() const { return static_cast<int>(weights_.size()); }
  const RVector& operator[](int floor) const { return weights_.at(static_cast<std::size_t>(floor)); }

 private:
  explicit FloorWeights(std::vector<RVector> w) : weights_(std::move(w)) {}
  FloorWeights restricted_all(const WindowFamily& windows, bool use_complement) const;

  std::vector<RVector> weights_;
};

/// The multi-class ensemble
///
///   p(x) ~ det f_i(x^(1)_j) * prod_l det g_{l,l+1}(x^(l)_i, x^(l+1)_j) * det phi_j(x^(M)_i)
///
/// sampled on a DiscretizedSpace: n particles on each of M floors. The chain
/// convolutions g_{l,m} for l < m and the Gram matrix A are built eagerly, so a
/// constructed ensemble is immutable and safe to share across threads. Floors
/// and function indices are 0-based. Copies share storage.
class ChainEnsemble {
 public:
  /// f, phi: n node vectors each. links: M - 1 node x node matrices g_{l,l+1}.
  /// Throws InvalidArgument on shape errors and SingularMatrixError when
  /// cond(A) exceeds options.max_condition.
  ChainEnsemble(DiscretizedSpace space, std::vector<CVector> f, std::vector<CVector> phi,
                std::vector<CMatrix> links, EnsembleOptions options = {});

  const DiscretizedSpace& space() const { return d_->space; }
  int particles() const { return d_->n; }
  int floors() const { return d_->floors; }
  Eigen::Index nodes() const { return static_cast<Eigen::Index>(d_->space.size()); }
  const EnsembleOptions& options() const { return d_->options; }
  bool extended_precision() const;

  /// Columns are f_1..f_n (resp. phi_1..phi_n) sampled at the nodes.
  const CMatrix& f_matrix() const { return d_->f; }
  const CMatrix& phi_matrix() const { return d_->phi; }
  CVector f(int j) const { return d_->f.col(j); }
  CVector phi(int j) const { return d_->phi.col(j); }

  /// g_{l,l+1} for l in [0, M-2].
  const CMatrix& link(int l) const { return d_->links.at(static_cast<std::size_t>(l)); }

  /// Cached g_{l,m}; the zero matrix when m <= l.
  const CMatrix& convolution(int l, int m) const;

  const CMatrix& gram() const { return d_->gram; }
  double gram_condition() const { return d_->gram_condition; }

  /// Set for derived ensembles; used by extended-precision arithmetic.
  const std::optional<ExtendedData>& extended_data() const { return d_->extended; }

 private:
  friend ChainEnsemble marginal_ensemble(const ChainEnsemble&, std::span<const int>);
  ChainEnsemble(DiscretizedSpace space, std::vector<CVector> f, std::vector<CVector> phi,
                std::vector<CMatrix> links, EnsembleOptions options,
                std::optional<ExtendedData> extended);

  struct Data {
    explicit Data(DiscretizedSpace s) : space(std::move(s)) {}
    DiscretizedSpace space;
    int n = 0;
    int floors = 0;
    CMatrix f;
    CMatrix phi;
    std::vector<CMatrix> links;
    std::vector<CMatrix> conv;  // floors x floors, row-major
    CMatrix zero;
    CMatrix gram;
    double gram_condition = 0.0;
    EnsembleOptions options;
    std::optional<ExtendedData> extended;
  };
  std::shared_ptr<const Data> d_;
};

enum class GramVariant { full, complement, window };

/// A, A^c or A^I together with the windows it was built for.
struct GramMatrix {
  CMatrix entries;
  GramVariant variant = GramVariant::full;
  std::optional<WindowFamily> windows;

  double condition() const;
};

/// g_{l,m} with floor weights inserted at every intermediate floor
/// l+1..m-1. Zero matrix when m <= l; g_{l,l+1} itself when m = l + 1.
CMatrix chain_convolve(const ChainEnsemble& ensemble, int l, int m, const FloorWeights& weights);
CMatrix chain_convolve(const ChainEnsemble& ensemble, int l, int m);
/// Restricted variant with one window per intermediate floor l+1..m-1;
/// throws InvalidArgument when the count does not match.
CMatrix chain_convolve(const ChainEnsemble& ensemble, int l, int m,
                       std::span<const Window> intermediate);

/// Column j is (f_j * g_{1,m})(y), integrating the first-floor variable and
/// all intermediate floors against `weights`. For m = 0 this is f itself.
CMatrix left_convolutions(const ChainEnsemble& ensemble, int m, const FloorWeights& weights);
/// Column s is (g_{l,M} * phi_s)(x); phi itself for the last floor.
CMatrix right_convolutions(const ChainEnsemble& ensemble, int l, const FloorWeights& weights);

CVector left_convolve(const ChainEnsemble& ensemble, int j, int m);
CVector left_convolve(const ChainEnsemble& ensemble, int j, int m, const FloorWeights& weights);
CVector right_convolve(const ChainEnsemble& ensemble, int s, int l);
CVector right_convolve(const ChainEnsemble& ensemble, int s, int l, const FloorWeights& weights);

/// A_{jk} = pairing of f_j against phi_k through the whole chain with every
/// floor integrated against `weights`.
CMatrix gram_entries(const ChainEnsemble& ensemble, const FloorWeights& weights);

GramMatrix gram_matrix(const ChainEnsemble& ensemble);
GramMatrix gram_matrix(const ChainEnsemble& ensemble, GramVariant variant,
                       const WindowFamily& windows);

/// (n!)^M det A.
Complex partition_function(const ChainEnsemble& ensemble);

/// Joint law of the selected floors (strictly increasing, 0-based) as a new
/// ensemble with f~ = f * g_{1,l_1}, g~ = g_{l_k,l_{k+1}}, phi~ = g_{l_m,M} * phi.
ChainEnsemble marginal_ensemble(const ChainEnsemble& ensemble, std::span<const int> floors);

/// <psi_i, chi_j> = sum_x psi_i(x) chi_j(x) w_x for node-sampled families
/// stored as columns.
CMatrix pairing_matrix(const DiscretizedSpace& space, const CMatrix& psi, const CMatrix& chi);

}  // namespace janossy
