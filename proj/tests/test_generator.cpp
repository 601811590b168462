#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lathop/experiments.hpp"
#include "lathop/generator.hpp"
#include "lathop/kernels.hpp"
#include "lathop/synthesis.hpp"
#include "test_support.hpp"

using namespace lathop;

namespace {

HoppingModel free_nn(int L, double a, double m = 1.0) {
  return {Lattice(1, L, a), nearest_neighbor_kernel(m, a, 1, true)};
}

HoppingModel diagonal_model(int L, double c) {
  const Lattice lat(1, L, 1.0);
  return {lat, HomogeneousKernel(1, 1.0, {{Offset{}, cplx(0.0, -c)}})};
}

WaveField centered_packet(const Lattice& lat, double sigma, double k0) {
  const double c[] = {lat.box_length(0) / 2.0};
  const double k[] = {k0};
  return gaussian_packet(c, k, sigma, lat);
}

}  // namespace

TEST_CASE("free ring generator entries") {
  const Generator g = build_generator(free_nn(4, 1.0));
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  for (int x = 0; x < 4; ++x) {
    expected(x, x) = 1.0;
    expected(x, (x + 1) % 4) = -0.5;
    expected(x, (x + 3) % 4) = -0.5;
  }
  CHECK((g.dense() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.nnz() == 12);
  CHECK(hermiticity_defect(g) == 0.0);
}

TEST_CASE("pure on-site kernel gives a diagonal generator") {
  const Generator g = build_generator(diagonal_model(6, 0.75));
  CHECK(g.nnz() == 6);
  for (std::size_t x = 0; x < 6; ++x) CHECK(g.entry(x, x) == cplx(0.75));
  for (double e : spectrum_dense(g)) CHECK(e == doctest::Approx(0.75));
}

TEST_CASE("empty kernel gives the zero generator") {
  const Lattice lat(1, 5, 1.0);
  const Generator g = build_generator(HoppingModel(lat, HomogeneousKernel(1, 1.0, {})));
  CHECK(g.nnz() == 0);
  CHECK(hermiticity_defect(g) == 0.0);
  const auto psi = delta_field(lat, Site({2, 0, 0}));
  const auto next = step_crank_nicolson(psi, g, 0.1);
  for (std::size_t x = 0; x < 5; ++x) CHECK(next[x] == psi[x]);
  const auto eul = step_euler(psi, g, 0.1);
  for (std::size_t x = 0; x < 5; ++x) CHECK(eul[x] == psi[x]);
}

TEST_CASE("support wider than half the ring is refused") {
  const Lattice lat(1, 4, 1.0);
  CHECK_THROWS_AS(build_generator(HoppingModel(lat, fourth_order_kernel(1.0, 1.0, 1))),
                  InputError);
  CHECK_NOTHROW(build_generator(HoppingModel(Lattice(1, 5, 1.0), fourth_order_kernel(1.0, 1.0, 1))));
}

TEST_CASE("H acting on a constant field gives the row sums of i kappa") {
  testing::Rng rng(41);
  const Lattice lat(2, {5, 6, 1}, 0.5);
  const auto mdl = testing::random_model(lat, 1, rng);
  const Generator g = build_generator(mdl);
  WaveField one(lat, std::vector<cplx>(lat.volume(), 1.0));
  const auto h1 = g.apply(one);
  for (std::size_t x = 0; x < lat.volume(); ++x) {
    cplx s = cplx(0.0, 1.0) * mdl.onsite_at(x);
    for (const auto& n : mdl.kernel().hopping_offsets())
      s += cplx(0.0, 1.0) * amplitude_at(mdl, x, n);
    CHECK(std::abs(h1[x] - s) <= 1e-13);
  }
}

TEST_CASE("plane waves diagonalize homogeneous generators") {
  for (int L : {5, 8, 17, 32, 64})
    for (int order : {2, 4}) {
      const auto mdl = synthesize_free(1.3, Lattice(1, L, 0.5), order);
      const Generator g = build_generator(mdl);
      for (int mode = 0; mode < L; ++mode) {
        const auto pw = plane_wave({mode, 0, 0}, mdl.lattice());
        const double k[] = {mode_wavenumber(mode, mdl.lattice(), 0)};
        const double e = dispersion_relation(mdl.kernel(), k);
        const auto hp = g.apply(pw);
        double worst = 0.0;
        for (std::size_t x = 0; x < pw.size(); ++x)
          worst = std::max(worst, std::abs(hp[x] - e * pw[x]));
        CHECK(worst <= 1e-12);
      }
    }
}

TEST_CASE("dispersion relation examples") {
  const auto nn = nearest_neighbor_kernel(1.0, 1.0, 1, true);
  const double half_pi[] = {std::numbers::pi / 2.0};
  CHECK(dispersion_relation(nn, half_pi) == doctest::Approx(1.0).epsilon(1e-15));
  const double zero[] = {0.0};
  CHECK(std::abs(dispersion_relation(nn, zero)) <= 1e-15);
  CHECK(std::abs(dispersion_relation(fourth_order_kernel(1.0, 0.3, 1), zero)) <= 1e-13);
  const double ka = 0.1;
  const double kv[] = {ka};
  CHECK(dispersion_relation(nn, kv) / (ka * ka / 2.0) ==
        doctest::Approx(1.0 - ka * ka / 12.0).epsilon(1e-6));
}

TEST_CASE("hermiticity follows from probability conservation") {
  testing::Rng rng(43);
  for (int t = 0; t < 50; ++t) {
    const auto mdl = t % 2 ? testing::random_model(Lattice(1, 16, 0.5), 2, rng)
                           : testing::random_model(Lattice(2, {6, 6, 1}, 0.5), 1, rng);
    CHECK(hermiticity_defect(build_generator(mdl)) <= 1e-13);
  }
}

TEST_CASE("a planted violation shows up as the same hermiticity defect") {
  testing::Rng rng(47);
  const auto mdl = testing::random_model(Lattice(1, 12, 0.5), 1, rng);
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    const auto bad = testing::plant_violation(mdl, 4, Offset::axis(0, 1), eps);
    const double defect = hermiticity_defect(build_generator(bad));
    CHECK(std::abs(defect - eps) <= 1e-14);
    CHECK(std::abs(validate_unitarity(bad) - eps) <= 1e-14);
  }
}

TEST_CASE("Crank-Nicolson multiplies eigenvectors by the Cayley phase") {
  const auto mdl = free_nn(16, 0.5);
  const Generator g = build_generator(mdl);
  const double dt = 0.05;
  for (int mode : {0, 1, 3, 8}) {
    const auto pw = plane_wave({mode, 0, 0}, mdl.lattice());
    const double k[] = {mode_wavenumber(mode, mdl.lattice(), 0)};
    const double e = dispersion_relation(mdl.kernel(), k);
    const cplx phase = (1.0 - cplx(0.0, dt / 2.0) * e) / (1.0 + cplx(0.0, dt / 2.0) * e);
    const auto next = step_crank_nicolson(pw, g, dt);
    for (std::size_t x = 0; x < pw.size(); ++x) CHECK(std::abs(next[x] - phase * pw[x]) <= 1e-12);
  }
}

TEST_CASE("Crank-Nicolson conserves norm and energy") {
  testing::Rng rng(53);
  const auto mdl = testing::random_model(Lattice(1, 48, 0.5), 1, rng);
  const Generator g = build_generator(mdl);
  for (double dt : {1e-3, 1e-2, 1e-1}) {
    const auto psi = testing::random_state(mdl.lattice(), rng);
    SolveStats stats;
    const auto next = step_crank_nicolson(psi, g, dt, {}, &stats);
    CHECK(std::abs(next.norm() - psi.norm()) <= 1e-12);
    CHECK(stats.relative_residual <= 1e-12);
  }
  const auto psi0 = testing::random_state(mdl.lattice(), rng);
  const auto traj = evolve(psi0, g, {0.01, 1000, 100}, Stepper::crank_nicolson);
  for (const auto& row : traj.rows) {
    CHECK(std::abs(row.norm - 1.0) <= 1e-10);
    CHECK(std::abs(row.energy - traj.rows.front().energy) <= 1e-10);
  }
}

TEST_CASE("explicit Euler drifts at second order in dt and tracks CN to O(dt^2)") {
  const auto mdl = free_nn(128, 0.25);
  const Generator g = build_generator(mdl);
  const auto psi = centered_packet(mdl.lattice(), 1.0, 0.5);
  std::vector<double> dts{4e-3, 2e-3, 1e-3}, gaps;
  for (double dt : dts) {
    const auto e = step_euler(psi, g, dt);
    const auto c = step_crank_nicolson(psi, g, dt);
    double s = 0.0;
    for (std::size_t x = 0; x < psi.size(); ++x) s += std::norm(e[x] - c[x]);
    gaps.push_back(std::sqrt(s * 0.25));
  }
  CHECK(fit_power_law(dts, gaps) == doctest::Approx(2.0).epsilon(0.05));
  const auto rep = euler_drift_scaling(g, psi, dts);
  CHECK(rep.exponent == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("explicit stability guard") {
  const Generator g = build_generator(free_nn(16, 0.5));
  const double lim = 0.5 / g.norm_estimate();
  CHECK_NOTHROW(check_explicit_stability(g, 0.99 * lim));
  CHECK_THROWS_AS(check_explicit_stability(g, 1.01 * lim), StabilityError);
  const auto psi = delta_field(g.lattice(), Site{});
  CHECK_THROWS_AS(evolve(psi, g, {2.0 * lim, 3, 1}, Stepper::euler), StabilityError);
}

TEST_CASE("dense eigensolver on the free ring") {
  const auto mdl = free_nn(8, 1.0);
  const Generator g = build_generator(mdl);
  std::vector<double> expected;
  for (int j = 0; j < 8; ++j) expected.push_back(1.0 - std::cos(2.0 * std::numbers::pi * j / 8.0));
  std::sort(expected.begin(), expected.end());
  const auto spec = spectrum_dense(g);
  for (int j = 0; j < 8; ++j) CHECK(std::abs(spec[j] - expected[j]) <= 1e-12);

  const auto pairs = eigensolve_dense(g, 3);
  REQUIRE(pairs.size() == 3);
  for (const auto& p : pairs) {
    CHECK(p.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto hv = g.apply(p.vector);
    for (std::size_t x = 0; x < 8; ++x) CHECK(std::abs(hv[x] - p.value * p.vector[x]) <= 1e-10);
  }
  CHECK_THROWS_AS(eigensolve_dense(build_generator(free_nn(4097, 1.0)), 1), InputError);
}

TEST_CASE("evolve records and passes zero-step runs through") {
  const auto mdl = free_nn(64, 0.5);
  const Generator g = build_generator(mdl);
  const auto psi = centered_packet(mdl.lattice(), 1.5, 0.3);

  const auto none = evolve(psi, g, {0.01, 0, 1}, Stepper::crank_nicolson);
  REQUIRE(none.rows.size() == 1);
  for (std::size_t x = 0; x < psi.size(); ++x) CHECK(none.final_state[x] == psi[x]);
  CHECK(std::abs(none.rows[0].overlap - cplx(1.0)) <= 1e-14);

  const auto traj = evolve(psi, g, {0.01, 10, 4}, Stepper::crank_nicolson);
  REQUIRE(traj.rows.size() == 4);
  CHECK(traj.rows[1].step == 4);
  CHECK(traj.rows[3].step == 10);
  CHECK(traj.rows[3].time == doctest::Approx(0.1));
  CHECK(traj.to_csv().rfind("step,time,norm,energy,mean_x0,var_x,overlap_re,overlap_im\n", 0) == 0);
}

TEST_CASE("evolution is bitwise reproducible across thread counts") {
  testing::Rng rng(59);
  const auto mdl = testing::random_model(Lattice(2, {24, 24, 1}, 0.5), 1, rng);
  const Generator g = build_generator(mdl);
  const auto psi = testing::random_state(mdl.lattice(), rng);
  kernels::set_threads(1);
  const auto ref = evolve(psi, g, {0.02, 20, 5}, Stepper::crank_nicolson);
  for (int t : {2, 4}) {
    kernels::set_threads(t);
    const auto run = evolve(psi, g, {0.02, 20, 5}, Stepper::crank_nicolson);
    CHECK(run.to_csv() == ref.to_csv());
    CHECK(run.final_state.amplitudes() == ref.final_state.amplitudes());
  }
  kernels::set_threads(1);
}
