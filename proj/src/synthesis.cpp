#include "lathop/synthesis.hpp"

#include <cmath>
#include <sstream>

#include "lathop/potentials.hpp"

namespace lathop {

namespace {

Point site_point(const Lattice& lat, std::size_t x) {
  const Site s = lat.site(x);
  Point p{};
  for (int ax = 0; ax < lat.dim(); ++ax) p[ax] = lat.position(s, ax);
  return p;
}

bool is_axis_range_one(const HomogeneousKernel& k) {
  for (const auto& n : k.hopping_offsets()) {
    int nonzero = 0;
    for (int ax = 0; ax < kMaxDim; ++ax) {
      if (n[ax] == 0) continue;
      if (std::abs(n[ax]) != 1) return false;
      ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  return !k.hopping_offsets().empty();
}

void check_resolution(const Lattice& lat, const std::vector<double>& samples,
                      const std::string& what, std::vector<std::string>* warnings) {
  if (!warnings) return;
  if (variation_wavelength(lat, samples) < 4.0 * lat.spacing())
    warnings->push_back(what + " varies on scales below 4a");
}

}  // namespace

std::vector<double> sample_on_sites(const Lattice& lat, const ScalarFn& f) {
  std::vector<double> out(lat.volume());
  for (std::size_t x = 0; x < lat.volume(); ++x) out[x] = f(site_point(lat, x));
  return out;
}

HoppingModel synthesize_free(double mass, const Lattice& lat, int order) {
  if (order != 2 && order != 4) throw InputError("free synthesis order must be 2 or 4");
  auto kernel = order == 2 ? nearest_neighbor_kernel(mass, lat.spacing(), lat.dim(), true)
                           : fourth_order_kernel(mass, lat.spacing(), lat.dim(), true);
  return {lat, std::move(kernel)};
}

HoppingModel synthesize_gauge(const HoppingModel& free, const VectorFn& a_target,
                              std::vector<std::string>* warnings) {
  const Lattice& lat = free.lattice();
  if (!is_axis_range_one(free.kernel()))
    throw InputError("gauge synthesis requires a nearest-neighbour kernel");
  const double a = lat.spacing();

  std::array<std::vector<double>, kMaxDim> link_a;
  for (auto& v : link_a) v.resize(lat.volume());
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    const Point p = site_point(lat, x);
    for (int ax = 0; ax < lat.dim(); ++ax) {
      Point mid = p;
      mid[ax] += 0.5 * a;
      link_a[ax][x] = a_target(mid)[ax];
    }
  }

  InhomogeneityField half;
  for (int ax = 0; ax < lat.dim(); ++ax) {
    check_resolution(lat, link_a[ax], "A_" + std::to_string(ax) + " target", warnings);
    const Offset e = Offset::axis(ax, 1);
    for (std::size_t x = 0; x < lat.volume(); ++x)
      if (link_a[ax][x] != 0.0) half.set(x, e, cplx{-link_a[ax][x], 0.0});
  }
  return free.with_zfield(canonical_completion(half, lat, free.kernel()));
}

HoppingModel synthesize_scalar(const HoppingModel& mdl, const ScalarFn& u_target,
                               std::vector<std::string>* warnings) {
  const Lattice& lat = mdl.lattice();
  const std::vector<double> target = sample_on_sites(lat, u_target);
  check_resolution(lat, target, "U target", warnings);
  const ScalarField current = extract_U(mdl, warnings);
  std::map<std::size_t, double> onsite;
  for (std::size_t x = 0; x < lat.volume(); ++x)
    onsite[x] = mdl.onsite_at(x).imag() - (target[x] - current.values[x]);
  return mdl.with_onsite(std::move(onsite));
}

}  // namespace lathop
