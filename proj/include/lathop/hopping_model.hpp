#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lathop/lattice.hpp"

namespace lathop {

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kAssembledTol = 1e-14;

/// Translation-invariant hopping rates kappa(n) with finite support.
///
/// The zero offset holds the homogeneous on-site rate. Offsets missing from
/// the map have kappa = 0, so an entry whose negation is absent shows up as
/// a parity violation in validate_kernel_symmetry.
class HomogeneousKernel {
 public:
  HomogeneousKernel(int dim, double spacing, std::map<Offset, cplx> amplitudes);

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const std::map<Offset, cplx>& amplitudes() const { return amp_; }
  cplx at(const Offset& n) const;
  cplx onsite() const { return at(Offset{}); }
  // sup-norm radius of the support
  int radius() const;
  /// Nonzero offsets, closed under negation, in ascending order.
  const std::vector<Offset>& hopping_offsets() const { return hops_; }

  HomogeneousKernel scaled(double factor) const;
  HomogeneousKernel with_onsite(cplx value) const;

 private:
  int dim_;
  double spacing_;
  std::map<Offset, cplx> amp_;
  std::vector<Offset> hops_;
};

/// M_ij = sum_n kappa(n) n_i n_j, padded to 3x3.
std::array<std::array<cplx, kMaxDim>, kMaxDim> second_moment(const HomogeneousKernel& k);

struct SymmetryReport {
  double tol = kStructuralTol;
  double parity_residual = 0.0;  // max |kappa(n) - kappa(-n)|
  Offset parity_worst;
  double real_part_residual = 0.0;  // max |Re kappa(n)|
  Offset real_part_worst;
  double offdiag_moment = 0.0;  // max |M_ij|, i != j
  double anisotropy = 0.0;      // max |M_ii - M_jj|
  std::vector<std::string> failures;
  bool pass = true;
};

SymmetryReport validate_kernel_symmetry(const HomogeneousKernel& k,
                                        double tol = kStructuralTol);

/// m = 1 / (a^2 Im M_11). Throws InputError for kernels that fail the
/// symmetry checks or would give m <= 0.
double mass_of_kernel(const HomogeneousKernel& k);

/// kappa(+-e_i) = i/(2 m a^2); optionally kappa(0) = -i d/(m a^2) so that E(0) = 0.
HomogeneousKernel nearest_neighbor_kernel(double mass, double spacing, int dim,
                                          bool renormalize_onsite);

/// Range-2 axis stencil from the fourth-order second difference,
/// (-1, 16, -30, 16, -1)/12, scaled to i/(2 m a^2). The k^4 term of the
/// dispersion cancels and the second moment gives exactly m.
HomogeneousKernel fourth_order_kernel(double mass, double spacing, int dim,
                                      bool renormalize_onsite = true);

/// Z(x, n) on (site index, offset) pairs. Unset entries read as zero.
class InhomogeneityField {
 public:
  using Key = std::pair<std::size_t, Offset>;

  void set(std::size_t site, const Offset& n, cplx z) { values_[{site, n}] = z; }
  cplx get(std::size_t site, const Offset& n) const;
  bool contains(std::size_t site, const Offset& n) const;
  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  const std::map<Key, cplx>& entries() const { return values_; }

  bool operator==(const InhomogeneityField&) const = default;

 private:
  std::map<Key, cplx> values_;
};

/// kappa(x, n) = kappa(n) exp(i a Z(x, n)) for n != 0, plus per-site on-site
/// rates kappa(x, 0).
///
/// Per-site on-site data is stored as Im kappa(x, 0) (the real part is zero
/// whenever probability is conserved) and overrides kernel.onsite() at that
/// site. Z(x, 0) is not represented; all on-site freedom lives in this map.
class HoppingModel {
 public:
  HoppingModel(Lattice lattice, HomogeneousKernel kernel, InhomogeneityField zfield = {},
               std::map<std::size_t, double> onsite_im = {});

  const Lattice& lattice() const { return lattice_; }
  const HomogeneousKernel& kernel() const { return kernel_; }
  const InhomogeneityField& zfield() const { return zfield_; }
  const std::map<std::size_t, double>& onsite_im() const { return onsite_; }

  cplx onsite_at(std::size_t site) const;

  HoppingModel with_zfield(InhomogeneityField z) const;
  HoppingModel with_onsite(std::map<std::size_t, double> onsite_im) const;

 private:
  Lattice lattice_;
  HomogeneousKernel kernel_;
  InhomogeneityField zfield_;
  std::map<std::size_t, double> onsite_;
};

cplx amplitude_at(const HoppingModel& mdl, std::size_t site, const Offset& n);

struct UnitarityReport {
  double max_violation = 0.0;
  std::size_t site = 0;
  Offset offset;
};

/// max over (x, n) of |kappa(x - a n, n) + conj(kappa(x, -n))|, n = 0 included.
UnitarityReport unitarity_report(const HoppingModel& mdl);
inline double validate_unitarity(const HoppingModel& mdl) {
  return unitarity_report(mdl).max_violation;
}

/// Fills Z(x + a n, -n) = -conj(Z(x, n)) from entries on canonical offsets.
InhomogeneityField canonical_completion(const InhomogeneityField& half, const Lattice& lat,
                                        const HomogeneousKernel& k);

}  // namespace lathop
