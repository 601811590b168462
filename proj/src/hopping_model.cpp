#include "lathop/hopping_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lathop {

namespace {

std::string offset_str(const Offset& n, int dim) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << n[i];
  os << ')';
  return os.str();
}

}  // namespace

HomogeneousKernel::HomogeneousKernel(int dim, double spacing, std::map<Offset, cplx> amplitudes)
    : dim_(dim), spacing_(spacing), amp_(std::move(amplitudes)) {
  if (dim < 1 || dim > kMaxDim) throw InputError("kernel dimension must be 1, 2 or 3");
  if (!(spacing > 0.0)) throw InputError("kernel spacing must be positive");
  std::set<Offset> hops;
  for (const auto& [n, v] : amp_) {
    for (int i = dim; i < kMaxDim; ++i)
      if (n[i] != 0) throw InputError("kernel offset has components beyond the lattice dimension");
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InputError("kernel amplitude is not finite");
    if (!n.is_zero()) {
      hops.insert(n);
      hops.insert(-n);
    }
  }
  hops_.assign(hops.begin(), hops.end());
}

cplx HomogeneousKernel::at(const Offset& n) const {
  const auto it = amp_.find(n);
  return it == amp_.end() ? cplx{} : it->second;
}

int HomogeneousKernel::radius() const {
  int r = 0;
  for (const auto& n : hops_) r = std::max(r, n.norm_sup());
  return r;
}

HomogeneousKernel HomogeneousKernel::scaled(double factor) const {
  auto amp = amp_;
  for (auto& [n, v] : amp) v *= factor;
  return {dim_, spacing_, std::move(amp)};
}

HomogeneousKernel HomogeneousKernel::with_onsite(cplx value) const {
  auto amp = amp_;
  amp[Offset{}] = value;
  return {dim_, spacing_, std::move(amp)};
}

std::array<std::array<cplx, kMaxDim>, kMaxDim> second_moment(const HomogeneousKernel& k) {
  std::array<std::array<cplx, kMaxDim>, kMaxDim> m{};
  for (const auto& [n, v] : k.amplitudes())
    for (int i = 0; i < kMaxDim; ++i)
      for (int j = 0; j < kMaxDim; ++j) m[i][j] += v * static_cast<double>(n[i] * n[j]);
  return m;
}

SymmetryReport validate_kernel_symmetry(const HomogeneousKernel& k, double tol) {
  SymmetryReport rep;
  rep.tol = tol;
  const int d = k.dim();
  std::set<Offset> support;
  for (const auto& [n, v] : k.amplitudes()) {
    support.insert(n);
    support.insert(-n);
  }
  for (const auto& n : support) {
    const cplx v = k.at(n);
    const double par = std::abs(v - k.at(-n));
    if (par > rep.parity_residual) {
      rep.parity_residual = par;
      rep.parity_worst = n;
    }
    const double re = std::abs(v.real());
    if (re > rep.real_part_residual) {
      rep.real_part_residual = re;
      rep.real_part_worst = n;
    }
  }
  const auto m = second_moment(k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i != j) rep.offdiag_moment = std::max(rep.offdiag_moment, std::abs(m[i][j]));
      rep.anisotropy = std::max(rep.anisotropy, std::abs(m[i][i] - m[j][j]));
    }
  if (rep.parity_residual > tol)
    rep.failures.push_back("kappa(n) != kappa(-n) at offset " + offset_str(rep.parity_worst, d));
  if (rep.real_part_residual > tol)
    rep.failures.push_back("kappa(n) not purely imaginary at offset " +
                           offset_str(rep.real_part_worst, d));
  if (rep.offdiag_moment > tol) rep.failures.push_back("off-diagonal second moment");
  if (rep.anisotropy > tol) rep.failures.push_back("anisotropic second moment");
  rep.pass = rep.failures.empty();
  return rep;
}

double mass_of_kernel(const HomogeneousKernel& k) {
  double scale = 1.0;
  for (const auto& [n, v] : k.amplitudes()) scale = std::max(scale, std::abs(v));
  const auto rep = validate_kernel_symmetry(k, kStructuralTol * scale);
  if (!rep.pass) throw InputError("kernel fails symmetry validation: " + rep.failures.front());
  const auto m = second_moment(k);
  const double im = m[0][0].imag();
  if (!(im > 0.0)) throw InputError("kernel second moment gives a nonpositive mass");
  return 1.0 / (k.spacing() * k.spacing() * im);
}

HomogeneousKernel nearest_neighbor_kernel(double mass, double spacing, int dim,
                                          bool renormalize_onsite) {
  if (!(mass > 0.0) || !(spacing > 0.0)) throw InputError("mass and spacing must be positive");
  const cplx hop{0.0, 1.0 / (2.0 * mass * spacing * spacing)};
  std::map<Offset, cplx> amp;
  for (int ax = 0; ax < dim; ++ax) {
    amp[Offset::axis(ax, 1)] = hop;
    amp[Offset::axis(ax, -1)] = hop;
  }
  if (renormalize_onsite) amp[Offset{}] = -2.0 * dim * hop;
  return {dim, spacing, std::move(amp)};
}

HomogeneousKernel fourth_order_kernel(double mass, double spacing, int dim,
                                      bool renormalize_onsite) {
  if (!(mass > 0.0) || !(spacing > 0.0)) throw InputError("mass and spacing must be positive");
  const cplx base{0.0, 1.0 / (2.0 * mass * spacing * spacing)};
  const cplx near = base * (16.0 / 12.0);
  const cplx far = base * (-1.0 / 12.0);
  std::map<Offset, cplx> amp;
  for (int ax = 0; ax < dim; ++ax) {
    amp[Offset::axis(ax, 1)] = near;
    amp[Offset::axis(ax, -1)] = near;
    amp[Offset::axis(ax, 2)] = far;
    amp[Offset::axis(ax, -2)] = far;
  }
  if (renormalize_onsite) amp[Offset{}] = base * (-30.0 / 12.0 * dim);
  return {dim, spacing, std::move(amp)};
}

cplx InhomogeneityField::get(std::size_t site, const Offset& n) const {
  const auto it = values_.find({site, n});
  return it == values_.end() ? cplx{} : it->second;
}

bool InhomogeneityField::contains(std::size_t site, const Offset& n) const {
  return values_.contains({site, n});
}

HoppingModel::HoppingModel(Lattice lattice, HomogeneousKernel kernel, InhomogeneityField zfield,
                           std::map<std::size_t, double> onsite_im)
    : lattice_(std::move(lattice)),
      kernel_(std::move(kernel)),
      zfield_(std::move(zfield)),
      onsite_(std::move(onsite_im)) {
  if (kernel_.dim() != lattice_.dim())
    throw InputError("kernel and lattice dimensions differ");
  if (kernel_.spacing() != lattice_.spacing())
    throw InputError("kernel and lattice spacings differ");
  const auto& hops = kernel_.hopping_offsets();
  for (const auto& [key, z] : zfield_.entries()) {
    if (key.first >= lattice_.volume()) throw InputError("Z entry references a site off the lattice");
    if (!std::binary_search(hops.begin(), hops.end(), key.second))
      throw InputError("Z entry on an offset outside the kernel support");
  }
  for (const auto& [site, v] : onsite_)
    if (site >= lattice_.volume()) throw InputError("on-site entry references a site off the lattice");
}

cplx HoppingModel::onsite_at(std::size_t site) const {
  const auto it = onsite_.find(site);
  return it == onsite_.end() ? kernel_.onsite() : cplx{0.0, it->second};
}

HoppingModel HoppingModel::with_zfield(InhomogeneityField z) const {
  return {lattice_, kernel_, std::move(z), onsite_};
}

HoppingModel HoppingModel::with_onsite(std::map<std::size_t, double> onsite_im) const {
  return {lattice_, kernel_, zfield_, std::move(onsite_im)};
}

cplx amplitude_at(const HoppingModel& mdl, std::size_t site, const Offset& n) {
  if (n.is_zero()) return mdl.onsite_at(site);
  const cplx k = mdl.kernel().at(n);
  if (k == cplx{}) return {};
  const cplx z = mdl.zfield().get(site, n);
  if (z == cplx{}) return k;
  return k * std::exp(cplx{0.0, mdl.lattice().spacing()} * z);
}

UnitarityReport unitarity_report(const HoppingModel& mdl) {
  const Lattice& lat = mdl.lattice();
  std::vector<Offset> offsets = mdl.kernel().hopping_offsets();
  offsets.push_back(Offset{});
  UnitarityReport rep;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    for (const auto& n : offsets) {
      const std::size_t back = lat.neighbor(x, -n);
      const double v = std::abs(amplitude_at(mdl, back, n) + std::conj(amplitude_at(mdl, x, -n)));
      if (v > rep.max_violation) {
        rep.max_violation = v;
        rep.site = x;
        rep.offset = n;
      }
    }
  }
  return rep;
}

InhomogeneityField canonical_completion(const InhomogeneityField& half, const Lattice& lat,
                                        const HomogeneousKernel& k) {
  const auto& hops = k.hopping_offsets();
  InhomogeneityField full;
  for (const auto& [key, z] : half.entries()) {
    const auto& [x, n] = key;
    if (!n.is_canonical())
      throw InputError("canonical completion input has a non-canonical offset");
    if (!std::binary_search(hops.begin(), hops.end(), n))
      throw InputError("canonical completion input offset outside the kernel support");
    if (x >= lat.volume()) throw InputError("canonical completion input site off the lattice");
    full.set(x, n, z);
    full.set(lat.neighbor(x, n), -n, -std::conj(z));
  }
  return full;
}

}  // namespace lathop
