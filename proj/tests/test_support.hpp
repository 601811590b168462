#pragma once

// Random fixtures shared by the unit and acceptance suites.

#include <cmath>
#include <numbers>
#include <random>

#include "lathop/hopping_model.hpp"
#include "lathop/lattice.hpp"

namespace lathop::testing {

using Rng = std::mt19937_64;

/// kappa(n) = kappa(-n) = i beta_n for every offset with sup-norm <= radius,
/// beta_n uniform in [0.2, 1.2], plus a random imaginary on-site rate.
inline HomogeneousKernel random_kernel(int dim, double a, int radius, Rng& rng) {
  std::uniform_real_distribution<double> beta(0.2, 1.2);
  std::map<Offset, cplx> amp;
  std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    lo[i] = -radius;
    hi[i] = radius;
  }
  for (int x = lo[0]; x <= hi[0]; ++x)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int z = lo[2]; z <= hi[2]; ++z) {
        const Offset n({x, y, z});
        if (!n.is_canonical()) continue;
        const cplx v{0.0, beta(rng)};
        amp[n] = v;
        amp[-n] = v;
      }
  amp[Offset{}] = cplx{0.0, -beta(rng)};
  return {dim, a, std::move(amp)};
}

/// Random Z on canonical offsets: a Re Z in [-pi, pi], a Im Z in [-0.5, 0.5].
inline InhomogeneityField random_half(const Lattice& lat, const HomogeneousKernel& k, Rng& rng) {
  std::uniform_real_distribution<double> re(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> im(-0.5, 0.5);
  InhomogeneityField half;
  const double a = lat.spacing();
  for (std::size_t x = 0; x < lat.volume(); ++x)
    for (const auto& n : k.hopping_offsets())
      if (n.is_canonical()) half.set(x, n, cplx{re(rng) / a, im(rng) / a});
  return half;
}

inline HoppingModel random_model(const Lattice& lat, int radius, Rng& rng) {
  HomogeneousKernel k = random_kernel(lat.dim(), lat.spacing(), radius, rng);
  InhomogeneityField z = canonical_completion(random_half(lat, k, rng), lat, k);
  std::uniform_real_distribution<double> onsite(-1.0, 1.0);
  std::map<std::size_t, double> site_rates;
  for (std::size_t x = 0; x < lat.volume(); x += 2) site_rates[x] = onsite(rng);
  return {lat, std::move(k), std::move(z), std::move(site_rates)};
}

/// Shifts Re Z(x, n) so that |kappa(x, n)| changes by exactly eps in the
/// complex plane, breaking probability conservation on that link only.
inline HoppingModel plant_violation(const HoppingModel& mdl, std::size_t x, const Offset& n,
                                    double eps) {
  const double a = mdl.lattice().spacing();
  const double mod = std::abs(amplitude_at(mdl, x, n));
  const double delta = 2.0 / a * std::asin(eps / (2.0 * mod));
  InhomogeneityField z = mdl.zfield();
  z.set(x, n, z.get(x, n) + delta);
  return mdl.with_zfield(std::move(z));
}

inline WaveField random_state(const Lattice& lat, Rng& rng) {
  std::normal_distribution<double> g;
  WaveField f(lat);
  for (std::size_t i = 0; i < lat.volume(); ++i) f[i] = {g(rng), g(rng)};
  f.normalize();
  return f;
}

}  // namespace lathop::testing
