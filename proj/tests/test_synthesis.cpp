#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lathop/experiments.hpp"
#include "lathop/generator.hpp"
#include "lathop/potentials.hpp"
#include "lathop/synthesis.hpp"

using namespace lathop;

namespace {

const Offset e0 = Offset::axis(0, 1);

VectorFn constant_a(double a0) {
  return [a0](const Point&) { return std::array<double, kMaxDim>{a0, 0.0, 0.0}; };
}

}  // namespace

TEST_CASE("free synthesis example") {
  const auto mdl = synthesize_free(1.0, Lattice(1, 16, 0.2));
  CHECK(std::abs(mdl.kernel().at(e0) - cplx(0.0, 12.5)) <= 1e-12);
  CHECK(std::abs(mdl.kernel().at(-e0) - cplx(0.0, 12.5)) <= 1e-12);
  CHECK(std::abs(mdl.kernel().onsite() - cplx(0.0, -25.0)) <= 1e-12);
  CHECK(mass_of_kernel(mdl.kernel()) == doctest::Approx(1.0).epsilon(1e-12));
  for (double w : extract_W(mdl).values) CHECK(std::abs(w) <= 1e-12);
  for (double u : extract_U(mdl).values) CHECK(std::abs(u) <= 1e-12);
}

TEST_CASE("fourth order free synthesis") {
  const auto mdl = synthesize_free(0.7, Lattice(2, 8, 0.25), 4);
  CHECK(mdl.kernel().radius() == 2);
  CHECK(mass_of_kernel(mdl.kernel()) == doctest::Approx(0.7).epsilon(1e-12));
  for (double u : extract_U(mdl).values) CHECK(std::abs(u) <= 1e-11);
  CHECK_THROWS_AS(synthesize_free(1.0, Lattice(1, 8, 0.25), 3), InputError);
  CHECK_THROWS_AS(synthesize_free(-1.0, Lattice(1, 8, 0.25)), InputError);
}

TEST_CASE("zero vector potential leaves the model unchanged") {
  const auto free = synthesize_free(1.0, Lattice(2, 6, 0.5));
  const auto mdl = synthesize_gauge(free, constant_a(0.0));
  CHECK(mdl.zfield().empty());
  CHECK(mdl.kernel().amplitudes() == free.kernel().amplitudes());
  CHECK(mdl.onsite_im() == free.onsite_im());
}

TEST_CASE("constant vector potential round trips exactly") {
  const double a0 = 0.37;
  const auto free = synthesize_free(1.2, Lattice(2, {8, 6, 1}, 0.25));
  const auto mdl = synthesize_gauge(free, constant_a(a0));
  CHECK(validate_unitarity(mdl) <= 1e-14);
  for (std::size_t x = 0; x < mdl.lattice().volume(); ++x) {
    CHECK(mdl.zfield().get(x, e0) == cplx(-a0, 0.0));
    CHECK(mdl.zfield().get(x, -e0) == cplx(a0, 0.0));
  }
  for (const auto& v : extract_A(mdl).values) {
    CHECK(std::abs(v[0] - a0) <= 1e-12);
    CHECK(std::abs(v[1]) <= 1e-12);
  }
  for (double u : extract_U(mdl).values) CHECK(std::abs(u) <= 1e-12);
}

TEST_CASE("smooth vector potential converges at second order") {
  const auto rep = vector_roundtrip_convergence(1.0, 0.3, 12.8, {0.2, 0.1, 0.05});
  CHECK(rep.fitted_order() >= 1.9);
  CHECK(rep.monotone);
  CHECK(rep.pass);
}

TEST_CASE("gauge synthesis refuses non-axis kernels and warns on unresolved targets") {
  const auto f4 = synthesize_free(1.0, Lattice(1, 16, 0.25), 4);
  CHECK_THROWS_AS(synthesize_gauge(f4, constant_a(0.1)), InputError);

  const auto free = synthesize_free(1.0, Lattice(1, 32, 0.25));
  std::vector<std::string> warn;
  synthesize_gauge(free, [](const Point& p) {
    return std::array<double, kMaxDim>{0.1 * std::cos(2.0 * std::numbers::pi * p[0] / 0.8), 0, 0};
  }, &warn);
  CHECK_FALSE(warn.empty());
  warn.clear();
  synthesize_gauge(free, [](const Point& p) {
    return std::array<double, kMaxDim>{0.1 * std::cos(2.0 * std::numbers::pi * p[0] / 8.0), 0, 0};
  }, &warn);
  CHECK(warn.empty());
}

TEST_CASE("zero scalar target on a free model keeps the on-site rates") {
  const auto free = synthesize_free(1.0, Lattice(1, 16, 0.5));
  const auto mdl = synthesize_scalar(free, [](const Point&) { return 0.0; });
  for (std::size_t x = 0; x < 16; ++x)
    CHECK(std::abs(mdl.onsite_at(x) - free.onsite_at(x)) <= 1e-15);
}

TEST_CASE("constant scalar target shifts the whole spectrum") {
  const double c = 0.35;
  const auto free = synthesize_gauge(synthesize_free(1.0, Lattice(1, 24, 0.5)), constant_a(0.2));
  const auto mdl = synthesize_scalar(free, [c](const Point&) { return c; });
  const auto s0 = spectrum_dense(build_generator(free));
  const auto s1 = spectrum_dense(build_generator(mdl));
  for (std::size_t i = 0; i < s0.size(); ++i) CHECK(std::abs(s1[i] - s0[i] - c) <= 1e-10);
}

TEST_CASE("scalar synthesis hits its target and leaves kernel and Z alone") {
  const double a = 0.25;
  const auto gauge = synthesize_gauge(synthesize_free(1.0, Lattice(2, 8, a)), [](const Point& p) {
    return std::array<double, kMaxDim>{0.2 * std::sin(2.0 * std::numbers::pi * p[1] / 2.0), 0.1, 0.0};
  });
  const ScalarFn target = [](const Point& p) { return 0.5 * std::cos(2.0 * std::numbers::pi * p[0] / 2.0); };
  const auto mdl = synthesize_scalar(gauge, target);
  CHECK(mdl.kernel().amplitudes() == gauge.kernel().amplitudes());
  CHECK(mdl.zfield() == gauge.zfield());
  CHECK(extract_A(mdl).values == extract_A(gauge).values);
  CHECK(mass_of_kernel(mdl.kernel()) == mass_of_kernel(gauge.kernel()));
  CHECK(validate_unitarity(mdl) <= 1e-14);
  const auto u = extract_U(mdl);
  const auto want = sample_on_sites(mdl.lattice(), target);
  for (std::size_t x = 0; x < want.size(); ++x) CHECK(std::abs(u.values[x] - want[x]) <= 1e-10);
}

TEST_CASE("harmonic scalar target gives the oscillator ground state") {
  const double m = 1.0, omega = 1.0, a = 0.125, box = 16.0;
  const int L = static_cast<int>(box / a);
  const auto free = synthesize_free(m, Lattice(1, L, a));
  const auto mdl = synthesize_scalar(free, [&](const Point& p) {
    const double y = p[0] - box / 2.0;
    return 0.5 * m * omega * omega * y * y;
  });
  const auto pairs = eigensolve_dense(build_generator(mdl), 2);
  CHECK(std::abs(pairs[0].value - 0.5 * omega) <= 1e-2);
  CHECK(std::abs(pairs[1].value - pairs[0].value - omega) <= 1e-2);
}

TEST_CASE("synthesis is deterministic") {
  const auto run = [] {
    auto mdl = synthesize_gauge(synthesize_free(1.0, Lattice(1, 32, 0.25)), [](const Point& p) {
      return std::array<double, kMaxDim>{0.3 * std::sin(p[0]), 0, 0};
    });
    return synthesize_scalar(mdl, [](const Point& p) { return std::cos(p[0]); });
  };
  const auto a = run(), b = run();
  CHECK(a.zfield() == b.zfield());
  CHECK(a.onsite_im() == b.onsite_im());
}
