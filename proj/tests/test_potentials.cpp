#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lathop/generator.hpp"
#include "lathop/potentials.hpp"
#include "lathop/synthesis.hpp"
#include "test_support.hpp"

using namespace lathop;

namespace {

const Offset e0 = Offset::axis(0, 1);

HoppingModel with_half(const HoppingModel& base, const InhomogeneityField& half) {
  return base.with_zfield(canonical_completion(half, base.lattice(), base.kernel()));
}

}  // namespace

TEST_CASE("W of the free kernel without on-site rate") {
  for (double a : {1.0, 0.5})
    for (int d : {1, 2}) {
      const Lattice lat(d, 6, a);
      const auto w = extract_W(HoppingModel(lat, nearest_neighbor_kernel(1.0, a, d, false)));
      for (double v : w.values) CHECK(v == doctest::Approx(-d / (a * a)).epsilon(1e-14));
    }
  const auto w0 = extract_W(synthesize_free(2.0, Lattice(3, 4, 0.5)));
  for (double v : w0.values) CHECK(std::abs(v) <= 1e-13);
}

TEST_CASE("W shifts on both ends of a link carrying Im Z") {
  const double a = 0.5, s = 0.4;
  const auto free = synthesize_free(1.0, Lattice(1, 10, a));
  InhomogeneityField half;
  half.set(3, e0, cplx(0.0, s));
  const auto w = extract_W(with_half(free, half));
  const double shift = (cplx(0.0, 0.5) * free.kernel().at(e0) * (std::exp(-2.0 * a * s) - 1.0)).real();
  // i kappa = -|kappa|, so damping the hop raises W
  CHECK(shift > 0.0);
  for (std::size_t x = 0; x < 10; ++x) {
    const double expected = (x == 3 || x == 4) ? shift : 0.0;
    CHECK(std::abs(w.values[x] - expected) <= 1e-13);
  }
}

TEST_CASE("W depends on Im Z only") {
  testing::Rng rng(61);
  const Lattice lat(2, {5, 6, 1}, 0.5);
  const auto mdl = testing::random_model(lat, 1, rng);
  InhomogeneityField half;
  std::uniform_real_distribution<double> re(-3.0, 3.0);
  for (const auto& [key, z] : mdl.zfield().entries())
    if (key.second.is_canonical()) half.set(key.first, key.second, cplx(re(rng), z.imag()));
  const auto other = with_half(mdl, half);
  CHECK(extract_W(other).values == extract_W(mdl).values);
}

TEST_CASE("W refuses models that do not conserve probability") {
  testing::Rng rng(67);
  const auto mdl = testing::random_model(Lattice(1, 8, 0.5), 1, rng);
  CHECK_NOTHROW(extract_W(mdl));
  CHECK_THROWS_AS(extract_W(testing::plant_violation(mdl, 2, e0, 1e-6)), InputError);
}

TEST_CASE("A from constant and zero real parts") {
  const double a = 0.25, c = 0.8;
  const auto free = synthesize_free(1.5, Lattice(1, 16, a));
  for (const auto& v : extract_A(free).values) CHECK(v[0] == 0.0);

  InhomogeneityField half;
  for (std::size_t x = 0; x < 16; ++x) half.set(x, e0, c);
  for (const auto& v : extract_A(with_half(free, half)).values)
    CHECK(v[0] == doctest::Approx(-c).epsilon(1e-14));

  // imaginary parts do not enter A
  InhomogeneityField imag;
  for (std::size_t x = 0; x < 16; ++x) imag.set(x, e0, cplx(0.0, 0.3));
  for (const auto& v : extract_A(with_half(free, imag)).values) CHECK(std::abs(v[0]) <= 1e-15);
}

TEST_CASE("A is linear in Re Z") {
  testing::Rng rng(71);
  const Lattice lat(2, {6, 5, 1}, 0.5);
  const auto k = nearest_neighbor_kernel(1.0, 0.5, 2, true);
  const auto half = testing::random_half(lat, k, rng);
  const HoppingModel base(lat, k);
  for (double alpha : {0.5, -2.0, 3.0}) {
    InhomogeneityField scaled;
    for (const auto& [key, z] : half.entries()) scaled.set(key.first, key.second, alpha * z.real());
    InhomogeneityField plain;
    for (const auto& [key, z] : half.entries()) plain.set(key.first, key.second, z.real());
    const auto a1 = extract_A(with_half(base, scaled));
    const auto a0 = extract_A(with_half(base, plain));
    for (std::size_t x = 0; x < lat.volume(); ++x)
      for (int i = 0; i < 2; ++i)
        CHECK(std::abs(a1.values[x][i] - alpha * a0.values[x][i]) <= 1e-12 * std::abs(alpha) * 10.0);
  }
}

TEST_CASE("U vanishes for free and for pure gauge backgrounds") {
  const auto free = synthesize_free(1.0, Lattice(2, 6, 0.5));
  for (double v : extract_U(free).values) CHECK(std::abs(v) <= 1e-13);

  InhomogeneityField half;
  for (std::size_t x = 0; x < free.lattice().volume(); ++x) {
    half.set(x, Offset::axis(0, 1), 0.7);
    half.set(x, Offset::axis(1, 1), -0.2);
  }
  for (double v : extract_U(with_half(free, half)).values) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("U for a uniform imaginary part") {
  const double a = 0.2, s = 0.5, m = 1.0;
  const auto free = synthesize_free(m, Lattice(1, 20, a));
  InhomogeneityField half;
  for (std::size_t x = 0; x < 20; ++x) half.set(x, e0, cplx(0.0, s));
  const auto u = extract_U(with_half(free, half));
  const double expected = (1.0 - std::exp(-2.0 * a * s)) / (2.0 * m * a * a) + s * s / (2.0 * m);
  for (double v : u.values) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("U gradient term converges to the analytic derivative") {
  const double m = 1.0, amp = 0.3, box = 16.0;
  const double kw = 2.0 * std::numbers::pi / box;
  std::vector<double> errs;
  for (double a : {0.25, 0.125}) {
    const int L = static_cast<int>(std::lround(box / a));
    const auto free = synthesize_free(m, Lattice(1, L, a));
    InhomogeneityField half;
    auto g = [&](double x) { return amp * std::sin(kw * x); };
    auto dg = [&](double x) { return amp * kw * std::cos(kw * x); };
    for (int x = 0; x < L; ++x) half.set(x, e0, cplx(0.0, g(a * x)));
    const auto mdl = with_half(free, half);
    const auto u = extract_U(mdl);
    const auto w = extract_W(mdl);
    const double beta = free.kernel().at(e0).imag();
    double err = 0.0;
    for (int x = 0; x < L; ++x) {
      const double px = a * x, qx = a * (x - 1);
      // -1/2 sum i a^2 kappa(n) (...) with i kappa = -beta
      const double bracket = dg(px) - dg(qx) + g(px) * g(px) + g(qx) * g(qx);
      const double oracle = w.values[x] + 0.5 * a * a * beta * bracket;
      err = std::max(err, std::abs(u.values[x] - oracle));
    }
    errs.push_back(err);
  }
  CHECK(errs[0] <= 1e-3);
  CHECK(errs[1] <= 3e-4);
  // the two channels' difference errors cancel at leading order
  CHECK(errs[0] / errs[1] >= 3.5);
}

TEST_CASE("U warns about unresolved imaginary parts") {
  const auto free = synthesize_free(1.0, Lattice(1, 32, 0.25));
  InhomogeneityField rough, smooth;
  for (std::size_t x = 0; x < 32; ++x) {
    rough.set(x, e0, cplx(0.0, x % 2 ? 0.2 : -0.2));
    smooth.set(x, e0, cplx(0.0, 0.2 * std::sin(2.0 * std::numbers::pi * x / 32.0)));
  }
  std::vector<std::string> warn;
  extract_U(with_half(free, rough), &warn);
  CHECK_FALSE(warn.empty());
  warn.clear();
  extract_U(with_half(free, smooth), &warn);
  CHECK(warn.empty());
}

TEST_CASE("covariant decomposition reproduces the generator") {
  testing::Rng rng(73);
  CHECK(decompose_generator(synthesize_free(1.0, Lattice(1, 8, 0.5))).residual <= 1e-14);
  for (int rep = 0; rep < 5; ++rep) {
    for (int L : {4, 8, 16})
      CHECK(decompose_generator(testing::random_model(Lattice(1, L, 0.5), 1, rng)).residual <= 1e-13);
    CHECK(decompose_generator(testing::random_model(Lattice(1, 16, 0.5), 2, rng)).residual <= 1e-13);
    CHECK(decompose_generator(testing::random_model(Lattice(2, {6, 6, 1}, 0.5), 1, rng)).residual <=
          1e-13);
  }
}

TEST_CASE("decomposition residual exposes a broken link") {
  testing::Rng rng(79);
  const auto mdl = testing::random_model(Lattice(1, 12, 0.5), 1, rng);
  for (double eps : {1e-4, 1e-7}) {
    const double r = decompose_generator(testing::plant_violation(mdl, 6, e0, eps)).residual;
    CHECK(r >= eps / 4.0);
    CHECK(r <= 2.0 * eps);
  }
}

TEST_CASE("variation wavelength of a sinusoid") {
  const Lattice lat(1, 64, 0.25);
  std::vector<double> f(64);
  for (int x = 0; x < 64; ++x) f[x] = std::cos(2.0 * std::numbers::pi * x / 16.0);
  CHECK(variation_wavelength(lat, f) == doctest::Approx(4.0).epsilon(0.02));
  CHECK(std::isinf(variation_wavelength(lat, std::vector<double>(64, 1.0))));
}

TEST_CASE("field CSV headers") {
  const auto free = synthesize_free(1.0, Lattice(2, 4, 0.5));
  CHECK(scalar_field_to_csv(extract_W(free)).rfind("site_index,coord_0,coord_1,value\n", 0) == 0);
  CHECK(vector_field_to_csv(extract_A(free)).rfind("site_index,coord_0,coord_1,value_0,value_1\n", 0) ==
        0);
}
