#include "lathop/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "lathop/potentials.hpp"
#include "lathop/synthesis.hpp"

namespace lathop {

namespace {

constexpr double kPi = std::numbers::pi;

int sites_for(double box, double a) {
  const double n = box / a;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * n) throw InputError("box length is not a multiple of the spacing");
  return static_cast<int>(r);
}

void require_sweep(const std::vector<double>& spacings) {
  if (spacings.size() < 3) throw InputError("a convergence sweep needs at least 3 spacings");
  for (std::size_t i = 0; i < spacings.size(); ++i) {
    if (!(spacings[i] > 0.0)) throw InputError("spacings must be positive");
    if (i > 0 && !(spacings[i] < spacings[i - 1]))
      throw InputError("spacings must be strictly decreasing");
  }
}

// sum of |psi|^2 a^d over sites in the outer 10% of the box along any axis
double seam_mass(const WaveField& psi) {
  const Lattice& lat = psi.lattice();
  double m = 0.0;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    const Site s = lat.site(x);
    bool outer = false;
    for (int ax = 0; ax < lat.dim(); ++ax) {
      const double frac = static_cast<double>(s[ax]) / lat.extent(ax);
      outer = outer || frac < 0.1 || frac >= 0.9;
    }
    if (outer) m += std::norm(psi[x]);
  }
  return m * lat.cell_measure();
}

// wrap to (-pi/a, pi/a]
double wrap_momentum(double k, double a) {
  const double period = 2.0 * kPi / a;
  double w = std::fmod(k + kPi / a, period);
  if (w <= 0.0) w += period;
  return w - kPi / a;
}

double max_sorted_diff(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double d = 0.0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

bool OrderFit::defined() const { return std::isfinite(order); }

OrderFit fit_convergence_order(const std::vector<double>& errors,
                               const std::vector<double>& spacings) {
  require_sweep(spacings);
  if (errors.size() != spacings.size()) throw InputError("errors and spacings differ in length");
  OrderFit fit;
  for (double e : errors) {
    if (!std::isfinite(e) || e < 0.0) throw InputError("convergence errors must be finite and >= 0");
    if (e == 0.0) {
      fit.order = std::numeric_limits<double>::infinity();
      fit.warnings.emplace_back("zero error entry: convergence order undefined");
      return fit;
    }
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    fit.pair_orders.push_back(std::log(errors[i] / errors[i + 1]) /
                              std::log(spacings[i] / spacings[i + 1]));
  fit.order = std::accumulate(fit.pair_orders.begin(), fit.pair_orders.end(), 0.0) /
              static_cast<double>(fit.pair_orders.size());
  return fit;
}

double fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InputError("power-law fit needs >= 2 points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw InputError("power-law fit needs positive data");
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

bool errors_monotone(const std::vector<double>& errors) {
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const bool finest = i + 2 == errors.size();
    const double limit = finest ? 1.05 * errors[i] : errors[i];
    if (finest ? errors[i + 1] > limit : !(errors[i + 1] < limit)) return false;
  }
  return true;
}

void ConvergenceReport::judge(double order_lo, double order_hi) {
  fit = fit_convergence_order(errors, spacings);
  monotone = errors_monotone(errors);
  pass = fit.defined() && fit.order >= order_lo && fit.order <= order_hi && monotone;
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json j;
  j["benchmark"] = benchmark;
  j["params"] = params;
  j["spacings"] = spacings;
  j["errors"] = errors;
  if (fit.defined())
    j["fitted_order"] = fit.order;
  else
    j["fitted_order"] = nullptr;
  j["pair_orders"] = fit.pair_orders;
  j["monotone"] = monotone;
  j["warnings"] = fit.warnings;
  j["details"] = details;
  j["pass"] = pass;
  return j;
}

ConvergenceReport dispersion_convergence(double mass, double k_phys,
                                         const std::vector<double>& spacings, KernelOrder order) {
  require_sweep(spacings);
  if (std::abs(k_phys) * spacings.front() >= kPi)
    throw InputError("wave number beyond the Brillouin zone at the coarsest spacing");
  ConvergenceReport rep;
  rep.benchmark = "dispersion";
  rep.params = {{"mass", mass}, {"k", k_phys}, {"kernel_order", static_cast<int>(order)}};
  rep.spacings = spacings;
  const double exact = k_phys * k_phys / (2.0 * mass);
  for (double a : spacings) {
    const auto kernel = order == KernelOrder::nearest_neighbor
                            ? nearest_neighbor_kernel(mass, a, 1, true)
                            : fourth_order_kernel(mass, a, 1, true);
    const double kv[1] = {k_phys};
    const double e = dispersion_relation(kernel, kv);
    rep.errors.push_back(std::abs(e - exact));
    rep.details.push_back({{"spacing", a}, {"energy", e}, {"continuum", exact}});
  }
  if (order == KernelOrder::nearest_neighbor)
    rep.judge(1.9, 2.1);
  else
    rep.judge(3.8, 4.2);
  return rep;
}

cplx free_gaussian_exact(double x, double t, double mass, double sigma, double k0,
                         double center) {
  const cplx i{0.0, 1.0};
  const cplx spread = 1.0 + i * (t / (2.0 * mass * sigma * sigma));
  const double y = x - center;
  const double drift = y - k0 * t / mass;
  const double norm = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  const cplx expo = -drift * drift / (4.0 * sigma * sigma * spread) + i * k0 * y -
                    i * (k0 * k0 * t / (2.0 * mass)) + i * k0 * center;
  return norm * std::exp(expo) / std::sqrt(spread);
}

ConvergenceReport free_packet_benchmark(const FreePacketParams& p,
                                        const std::vector<double>& spacings) {
  require_sweep(spacings);
  ConvergenceReport rep;
  rep.benchmark = "free_packet";
  rep.params = {{"mass", p.mass}, {"sigma", p.sigma},  {"k0", p.k0},
                {"time", p.time}, {"box", p.box},      {"dt_factor", p.dt_factor}};
  rep.spacings = spacings;
  const double center = 0.5 * p.box - 0.5 * p.k0 * p.time / p.mass;
  for (double a : spacings) {
    const Lattice lat(1, sites_for(p.box, a), a);
    const Generator g = build_generator(synthesize_free(p.mass, lat, 2));
    const double c[1] = {center};
    const double k[1] = {p.k0};
    WaveField psi = gaussian_packet(c, k, p.sigma, lat);
    const auto steps = static_cast<std::size_t>(
        std::max(1.0, std::round(p.time / (p.dt_factor * p.mass * a * a))));
    const double dt = p.time / static_cast<double>(steps);
    double drift = 0.0;
    int max_iters = 0;
    for (std::size_t s = 0; s < steps; ++s) {
      SolveStats st;
      psi = step_crank_nicolson(psi, g, dt, {}, &st);
      max_iters = std::max(max_iters, st.iterations);
      drift = std::max(drift, std::abs(psi.norm() - 1.0));
    }
    const double tail = seam_mass(psi);
    if (tail > 1e-8) throw InputError("free packet reached the periodic seam (tail mass > 1e-8)");

    double err2 = 0.0;
    for (std::size_t x = 0; x < lat.volume(); ++x) {
      const double pos = lat.position(lat.site(x), 0);
      err2 += std::norm(psi[x] - free_gaussian_exact(pos, p.time, p.mass, p.sigma, p.k0, center));
    }
    rep.errors.push_back(std::sqrt(err2 * a));
    const double tau = p.time / (2.0 * p.mass * p.sigma * p.sigma);
    rep.details.push_back({{"spacing", a},
                           {"sites", lat.volume()},
                           {"steps", steps},
                           {"dt", dt},
                           {"norm_drift", drift},
                           {"max_solver_iterations", max_iters},
                           {"tail_mass", tail},
                           {"mean_x", mean_position(psi, 0)},
                           {"mean_x_exact", center + p.k0 * p.time / p.mass},
                           {"var_x", position_variance(psi)},
                           {"var_x_exact", p.sigma * p.sigma * (1.0 + tau * tau)}});
  }
  rep.judge(1.8, 2.2);
  return rep;
}

ConvergenceReport harmonic_benchmark(const HarmonicParams& p, const std::vector<double>& spacings) {
  require_sweep(spacings);
  if (!(p.omega > 0.0)) throw InputError("harmonic benchmark needs omega > 0");
  const double osc = 1.0 / std::sqrt(p.mass * p.omega);
  if (osc < 4.0 * spacings.front())
    throw InputError("oscillator length below four lattice spacings");
  if (p.box_lengths < 8.0) throw InputError("harmonic box must span at least 8 oscillator lengths");
  const double box = p.box_lengths * osc;

  ConvergenceReport rep;
  rep.benchmark = "harmonic";
  rep.params = {{"mass", p.mass}, {"omega", p.omega}, {"box", box}};
  rep.spacings = spacings;
  for (double a : spacings) {
    const Lattice lat(1, sites_for(box, a), a);
    const double xc = 0.5 * box;
    const double k_spring = 0.5 * p.mass * p.omega * p.omega;
    const auto mdl = synthesize_scalar(synthesize_free(p.mass, lat, 2), [&](const Point& x) {
      return k_spring * (x[0] - xc) * (x[0] - xc);
    });
    const auto pairs = eigensolve_dense(build_generator(mdl), 3);
    const double tail = seam_mass(pairs[0].vector);
    if (tail > 1e-8) throw InputError("harmonic ground state touches the box boundary");
    const double e0 = pairs[0].value;
    rep.errors.push_back(std::abs(e0 - 0.5 * p.omega));
    rep.details.push_back({{"spacing", a},
                           {"sites", lat.volume()},
                           {"E0", e0},
                           {"E1", pairs[1].value},
                           {"E2", pairs[2].value},
                           {"gap", pairs[1].value - e0},
                           {"tail_mass", tail}});
  }
  rep.judge(1.8, 2.2);
  const double gap = rep.details.back()["gap"].get<double>();
  const bool gap_ok = std::abs(gap - p.omega) <= 0.01 * p.omega;
  rep.details.back()["gap_within_1pct"] = gap_ok;
  rep.pass = rep.pass && gap_ok;
  return rep;
}

GaugeShiftReport constant_gauge_test(double mass, double a0, const Lattice& lat) {
  const double a = lat.spacing();
  const HoppingModel free = synthesize_free(mass, lat, 2);
  const HoppingModel gauged = synthesize_gauge(free, [&](const Point&) {
    std::array<double, kMaxDim> v{};
    v[0] = a0;
    return v;
  });
  const HoppingModel completed = synthesize_scalar(gauged, [](const Point&) { return 0.0; });

  GaugeShiftReport rep;
  rep.a0 = a0;
  for (std::size_t x = 0; x < lat.volume(); ++x)
    rep.c_a += gauged.onsite_at(x).imag() - completed.onsite_at(x).imag();
  rep.c_a /= static_cast<double>(lat.volume());

  const Generator g = build_generator(completed);
  const std::vector<double> spec = spectrum_dense(g);
  rep.ground_energy = spec.front();
  rep.free_multiset_deviation = max_sorted_diff(spec, spectrum_dense(build_generator(free)));

  // closed-form spectrum over all lattice momenta
  std::vector<double> formula;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    const Site mode = lat.site(x);
    double e = rep.c_a;
    for (int ax = 0; ax < lat.dim(); ++ax) {
      const double k = mode_wavenumber(mode[ax], lat, ax) - (ax == 0 ? a0 : 0.0);
      e += (1.0 - std::cos(a * k)) / (mass * a * a);
    }
    formula.push_back(e);
  }
  rep.formula_deviation = max_sorted_diff(spec, formula);

  const double dk = mode_wavenumber(1, lat, 0);
  double best_dist = std::numeric_limits<double>::infinity();
  rep.min_energy = std::numeric_limits<double>::infinity();
  for (int j = 0; j < lat.extent(0); ++j) {
    const WaveField pw = plane_wave({j, 0, 0}, lat);
    const double e = g.expectation(pw);
    if (e < rep.min_energy) {
      rep.min_energy = e;
      rep.argmin_mode = j;
    }
    const double dist = std::abs(wrap_momentum(mode_wavenumber(j, lat, 0) - a0, a));
    if (dist < best_dist) {
      best_dist = dist;
      rep.nearest_mode = j;
    }
    if (dist <= 2.0 * dk + 1e-12) {
      const double parabola = dist * dist / (2.0 * mass) + rep.c_a;
      rep.parabola_deviation = std::max(rep.parabola_deviation, std::abs(e - parabola));
    }
  }
  return rep;
}

ImaginaryZReport imaginary_z_test(double mass, double s, const Lattice& lat, std::size_t levels) {
  const HoppingModel free = synthesize_free(mass, lat, 2);
  InhomogeneityField half;
  if (s != 0.0)
    for (std::size_t x = 0; x < lat.volume(); ++x)
      for (const auto& n : free.kernel().hopping_offsets())
        if (n.is_canonical()) half.set(x, n, cplx{0.0, s});
  const HoppingModel model = free.with_zfield(canonical_completion(half, lat, free.kernel()));

  ImaginaryZReport rep;
  rep.s = s;
  const Generator g = build_generator(model);
  rep.hermiticity_defect = hermiticity_defect(g);
  rep.min_modulus = 1.0;
  rep.max_modulus = 1.0;
  if (!half.empty()) {
    rep.min_modulus = std::numeric_limits<double>::infinity();
    rep.max_modulus = 0.0;
    for (const auto& [key, z] : model.zfield().entries()) {
      const double mod = std::abs(std::exp(cplx{0.0, lat.spacing()} * z));
      rep.min_modulus = std::min(rep.min_modulus, mod);
      rep.max_modulus = std::max(rep.max_modulus, mod);
    }
  }

  const ScalarField u = extract_U(model);
  std::map<std::size_t, double> onsite;
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    onsite[x] = free.onsite_at(x).imag() - u.values[x];
    rep.u_pred_mean += u.values[x];
  }
  rep.u_pred_mean /= static_cast<double>(lat.volume());
  const HoppingModel reference = free.with_onsite(std::move(onsite));

  const auto full = spectrum_dense(g);
  const auto ref = spectrum_dense(build_generator(reference));
  levels = std::min(levels, full.size());
  for (std::size_t j = 0; j < levels; ++j)
    rep.deviation = std::max(rep.deviation, std::abs(full[j] - ref[j]));
  return rep;
}

ConvergenceReport imaginary_z_convergence(double mass, double s, double box,
                                          const std::vector<double>& spacings, std::size_t levels) {
  require_sweep(spacings);
  ConvergenceReport rep;
  rep.benchmark = "imaginary_z";
  rep.params = {{"mass", mass}, {"s", s}, {"box", box}, {"levels", levels}};
  rep.spacings = spacings;
  for (double a : spacings) {
    const Lattice lat(1, sites_for(box, a), a);
    const auto r = imaginary_z_test(mass, s, lat, levels);
    rep.errors.push_back(r.deviation);
    rep.details.push_back({{"spacing", a},
                           {"sites", lat.volume()},
                           {"hermiticity_defect", r.hermiticity_defect},
                           {"min_modulus", r.min_modulus},
                           {"u_pred_mean", r.u_pred_mean}});
  }
  rep.judge(0.9, std::numeric_limits<double>::infinity());
  return rep;
}

ConvergenceReport vector_roundtrip_convergence(double mass, double amp, double box,
                                               const std::vector<double>& spacings) {
  require_sweep(spacings);
  ConvergenceReport rep;
  rep.benchmark = "vector_roundtrip";
  rep.params = {{"mass", mass}, {"amplitude", amp}, {"box", box}};
  rep.spacings = spacings;
  const auto target = [&](const Point& x) {
    std::array<double, kMaxDim> v{};
    v[0] = amp * std::sin(2.0 * kPi * x[0] / box);
    return v;
  };
  for (double a : spacings) {
    const Lattice lat(1, sites_for(box, a), a);
    const auto mdl = synthesize_gauge(synthesize_free(mass, lat, 2), target);
    const auto field = extract_A(mdl);
    double err = 0.0;
    for (std::size_t x = 0; x < lat.volume(); ++x) {
      const Point p{lat.position(lat.site(x), 0), 0.0, 0.0};
      err = std::max(err, std::abs(field.values[x][0] - target(p)[0]));
    }
    rep.errors.push_back(err);
    rep.details.push_back({{"spacing", a}, {"sites", lat.volume()}});
  }
  rep.judge(1.9, std::numeric_limits<double>::infinity());
  return rep;
}

EulerDriftReport euler_drift_scaling(const Generator& g, const WaveField& psi,
                                     const std::vector<double>& dts) {
  EulerDriftReport rep;
  rep.dts = dts;
  const double n0 = psi.norm();
  for (double dt : dts) {
    check_explicit_stability(g, dt);
    rep.drifts.push_back(std::abs(step_euler(psi, g, dt).norm() - n0));
  }
  rep.exponent = fit_power_law(rep.dts, rep.drifts);
  return rep;
}

}  // namespace lathop
