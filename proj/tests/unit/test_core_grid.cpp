#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace lognls;
using lognls::testing::max_abs_diff;
using lognls::testing::random_band_limited;

namespace {

Field gamma_field(const Grid& g, double shift = 0.0) {
  return Field::sample(g, [&](const auto& x) {
    double r2 = 0;
    for (int j = 0; j < g.dim(); ++j) r2 += (x[j] - shift) * (x[j] - shift);
    return Complex(std::exp(-0.5 * r2), 0);
  });
}

}  // namespace

TEST_CASE("grid rejects bad shapes") {
  CHECK_THROWS_AS(Grid(1, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 96, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(4, 16, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1, 16, 0.0), std::invalid_argument);
  Grid g(2, 16, 8.0);
  CHECK(g.size() == 256);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.coordinate(0) == -4.0);
  CHECK(g.wavenumbers()[8] == doctest::Approx(-std::numbers::pi * 2));
  CHECK(g.admissible_wavenumber(3 * g.wavenumber_quantum()));
  CHECK_FALSE(g.admissible_wavenumber(0.5 * g.wavenumber_quantum()));
}

TEST_CASE("field rejects non-finite samples and size mismatch") {
  Grid g(1, 8, 1.0);
  std::vector<Complex> v(8);
  v[3] = Complex(std::nan(""), 0);
  CHECK_THROWS_AS(Field(g, v), NumericalError);
  CHECK_THROWS_AS(Field(g, std::vector<Complex>(7)), std::invalid_argument);
  CHECK_THROWS_AS(Density(g, std::vector<double>(8, -1.0)), std::invalid_argument);
}

TEST_CASE("gradient of a plane wave") {
  Grid g(1, 64, 10.0);
  const double k = 5 * g.wavenumber_quantum();
  Field f = Field::sample(g, [&](const auto& x) { return std::polar(1.0, k * x[0]); });
  Field expect = Field::sample(g, [&](const auto& x) { return Complex(0, k) * std::polar(1.0, k * x[0]); });
  CHECK(max_abs_diff(gradient_spectral(f)[0], expect) < 1e-12);
}

TEST_CASE("gradient of a constant vanishes") {
  Grid g(2, 16, 3.0);
  Field f = Field::sample(g, [](const auto&) { return Complex(2, -1); });
  for (const auto& c : gradient_spectral(f)) CHECK(l2_norm(c) < 1e-14);
}

TEST_CASE("gradient of a Gaussian matches the analytic derivative") {
  Grid g(1, 256, 32.0);
  Field f = gamma_field(g);
  Field expect = Field::sample(g, [](const auto& x) { return Complex(-x[0] * std::exp(-0.5 * x[0] * x[0]), 0); });
  CHECK(max_abs_diff(gradient_spectral(f)[0], expect) < 1e-10);
}

TEST_CASE("hs_norm of gamma") {
  Grid g(1, 256, 32.0);
  Field f = gamma_field(g);
  // ||gamma||_{H^s}^2 = Gamma(s + 1/2) in one dimension.
  CHECK(hs_norm(f, 0.0) == doctest::Approx(std::sqrt(std::sqrt(std::numbers::pi))).epsilon(1e-13));
  CHECK(hs_norm(f, 0.0) == doctest::Approx(1.33133).epsilon(1e-5));
  CHECK(hs_norm(f, 1.0) == doctest::Approx(std::sqrt(std::sqrt(std::numbers::pi) / 2)).epsilon(1e-13));
  CHECK(hs_norm(f, 1.0) == doctest::Approx(0.94139).epsilon(1e-5));
  const double half = hs_norm(f, 0.5);
  // |k| is not smooth at 0, so the spectral sum converges only as O(dk^2).
  Grid wide(1, 2048, 256.0);
  CHECK(hs_norm(gamma_field(wide), 0.5) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(half < hs_norm(f, 0.0));
  CHECK(half > hs_norm(f, 1.0));
  CHECK_THROWS_AS(hs_norm(f, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(hs_norm(f, 1.5), std::invalid_argument);
}

TEST_CASE("moments of elementary fields") {
  Grid g(1, 256, 32.0);
  const double mass = std::sqrt(std::numbers::pi);
  SUBCASE("real gamma") {
    const auto m = moments(gamma_field(g));
    CHECK(m.mass == doctest::Approx(mass).epsilon(1e-13));
    CHECK(std::abs(m.momentum[0]) < 1e-14);
    CHECK(std::abs(m.center[0]) < 1e-13);
    CHECK(std::abs(m.a_moment) < 1e-14);
    CHECK(m.variance == doctest::Approx(mass / 2).epsilon(1e-13));
  }
  SUBCASE("shifted gamma") {
    const auto m = moments(gamma_field(g, 1.0));
    CHECK(m.center[0] == doctest::Approx(mass).epsilon(1e-12));
  }
  SUBCASE("Galilean phase") {
    const double v0 = 4 * g.wavenumber_quantum();
    Field f = gamma_field(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(1.0, v0 * g.coordinate(i));
    const auto m = moments(f);
    CHECK(m.momentum[0] == doctest::Approx(v0 * mass).epsilon(1e-12));
  }
  SUBCASE("chirp carries A") {
    // f = gamma e^{i c y^2 / 2}: A = -c int y^2 |f|^2.
    const double c = 0.3;
    Field f = gamma_field(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::polar(1.0, 0.5 * c * g.coordinate(i) * g.coordinate(i));
    const auto m = moments(f);
    CHECK(m.a_moment == doctest::Approx(-c * mass / 2).epsilon(1e-11));
  }
}

TEST_CASE("Parseval on random band-limited fields") {
  SplitMix64 rng(7);
  for (int d = 1; d <= 3; ++d) {
    Grid g(d, d == 3 ? 16 : 64, 5.0);
    for (int trial = 0; trial < 5; ++trial) {
      Field f = random_band_limited(g, rng, g.points_per_axis() / 4);
      const double direct = std::sqrt(integrate(modulus_squared(f).values(), g));
      CHECK(hs_norm(f, 0.0) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("second gradient equals the Laplacian") {
  SplitMix64 rng(11);
  for (int d = 1; d <= 3; ++d) {
    Grid g(d, d == 3 ? 16 : 32, 2.0 * d);
    Field f = random_band_limited(g, rng, g.points_per_axis() / 4);
    Field sum(g);
    const auto grad = gradient_spectral(f);
    for (int j = 0; j < d; ++j) sum += gradient_spectral(grad[j])[j];
    const Field lap = laplacian_spectral(f);
    CHECK(max_abs_diff(sum, lap) < 1e-12 * (1 + l2_norm(lap)));
  }
}

TEST_CASE("moments scale quadratically") {
  SplitMix64 rng(3);
  Grid g(2, 32, 6.0);
  Field f = random_band_limited(g, rng, 6);
  const auto a = moments(f);
  const auto b = moments(Complex(2, 0) * f);
  CHECK(b.mass == doctest::Approx(4 * a.mass).epsilon(1e-13));
  CHECK(b.variance == doctest::Approx(4 * a.variance).epsilon(1e-13));
  CHECK(b.a_moment == doctest::Approx(4 * a.a_moment).epsilon(1e-12));
  for (int j = 0; j < 2; ++j) {
    CHECK(b.momentum[j] == doctest::Approx(4 * a.momentum[j]).epsilon(1e-12));
    CHECK(b.center[j] == doctest::Approx(4 * a.center[j]).epsilon(1e-12));
  }
}

TEST_CASE("scaled resampling and translation") {
  Grid src(1, 256, 32.0);
  Grid dst(1, 128, 16.0);
  Field f = gamma_field(src);
  SUBCASE("identity at scale one") {
    CHECK(max_abs_diff(resample_scaled(f, src, 1.0), f) < 1e-13);
  }
  SUBCASE("dilation") {
    const Field r = resample_scaled(f, dst, 1.5);
    Field expect = Field::sample(dst, [](const auto& x) { return Complex(std::exp(-0.5 * 2.25 * x[0] * x[0]), 0); });
    CHECK(max_abs_diff(r, expect) < 1e-12);
  }
  SUBCASE("points outside the source box are zero") {
    const Field r = resample_scaled(f, dst, 3.0);
    CHECK(r[0] == Complex(0, 0));
  }
  SUBCASE("translation") {
    const double shift[] = {0.37};
    CHECK(max_abs_diff(translate_spectral(f, shift), gamma_field(src, 0.37)) < 1e-12);
  }
  SUBCASE("two dimensions") {
    Grid s2(2, 64, 16.0), d2(2, 32, 8.0);
    const Field r = resample_scaled(gamma_field(s2), d2, 0.5);
    Field expect = Field::sample(d2, [](const auto& x) { return Complex(std::exp(-0.125 * (x[0] * x[0] + x[1] * x[1])), 0); });
    CHECK(max_abs_diff(r, expect) < 1e-12);
  }
}

TEST_CASE("refinement keeps the interpolant") {
  SUBCASE("one dimension, Gaussian with a phase ramp") {
    Grid g(1, 128, 24.0);
    auto u = [](const auto& x) { return std::exp(-0.5 * x[0] * x[0]) * std::polar(1.0, 0.8 * x[0]); };
    const Field r = refine(Field::sample(g, u), 512);
    CHECK(r.grid() == Grid(1, 512, 24.0));
    CHECK(max_abs_diff(r, Field::sample(r.grid(), u)) < 1e-13);
  }
  SUBCASE("old nodes survive a Nyquist mode") {
    Grid g(1, 16, 2 * std::numbers::pi);
    const Field f = Field::sample(g, [](const auto& x) { return Complex(std::cos(8 * x[0]) + 0.3 * std::sin(x[0]), 0); });
    const Field r = refine(f, 32);
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(r[2 * i] - f[i]) < 1e-14);
  }
  SUBCASE("two dimensions") {
    Grid g(2, 64, 16.0);
    const Field r = refine(gamma_field(g), 128);
    CHECK(max_abs_diff(r, gamma_field(r.grid())) < 1e-13);
    CHECK(l2_norm(r) == doctest::Approx(l2_norm(gamma_field(g))).epsilon(1e-14));
  }
  CHECK_THROWS_AS(refine(gamma_field(Grid(1, 64, 8.0)), 32), std::invalid_argument);
}

TEST_CASE("boundary and spectral monitors") {
  Grid g(1, 256, 32.0);
  CHECK(boundary_mass_fraction(gamma_field(g)) < 1e-50);
  CHECK(high_frequency_fraction(gamma_field(g)) < 1e-30);
  Field wide = Field::sample(g, [](const auto&) { return Complex(1, 0); });
  CHECK(boundary_mass_fraction(wide) == doctest::Approx(6.0 / 256));
}
