#include <doctest.h>

#include <cmath>
#include <numbers>

#include <lognls/solitons.hpp>

#include "test_support.hpp"

using namespace lognls;
using lognls::testing::max_abs_diff;

TEST_CASE("standing Gausson profile") {
  Grid g(1, 128, 16.0);
  const GaussonSpec s{0.0, -1.0, {}, {}};
  for (double t : {0.0, 0.7, 3.0}) {
    const Field f = gausson(s, t, g);
    const Field exact = Field::sample(g, [](const auto& x) { return Complex(std::exp(0.5 - x[0] * x[0]), 0); });
    CHECK(max_abs_diff(f, exact) < 1e-15);
  }
  // omega != 0 rotates the phase only.
  const GaussonSpec w{0.4, -0.5, {}, {}};
  const Field f0 = gausson(w, 0.0, g), f1 = gausson(w, 2.0, g);
  CHECK(max_abs_diff(f1, std::polar(1.0, 0.8) * f0) < 1e-14);
  CHECK_THROWS_AS(gausson({0.0, 1.0, {}, {}}, 0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(gausson({0.0, -1.0, {0.3}, {}}, 0.0, g), std::invalid_argument);
}

TEST_CASE("Gausson mass closed form and inversion") {
  for (int d : {1, 2, 3}) {
    for (double lambda : {-0.3, -1.0, -2.5}) {
      double prev = 0;
      // Increasing omega increases e^{-omega/lambda}, hence the mass.
      for (double omega : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
        const double m = gausson_mass(omega, lambda, d);
        CHECK(m > prev);
        CHECK(gausson_omega_for_mass(m, lambda, d) == doctest::Approx(omega).epsilon(1e-12).scale(1));
        prev = m;
      }
    }
  }
  // Grid quadrature oracle.
  Grid g(2, 128, 16.0);
  const double lambda = -0.7, omega = 0.3;
  const double quad = std::norm(l2_norm(gausson({omega, lambda, {}, {0.5, -0.25}}, 0.0, g)));
  CHECK(quad == doctest::Approx(gausson_mass(omega, lambda, 2)).epsilon(1e-12));
  // dM/domega = -M / lambda.
  const double h = 1e-4;
  const double dm = gausson_mass(omega + h, lambda, 1) - gausson_mass(omega - h, lambda, 1);
  CHECK(dm / (2 * h) == doctest::Approx(-gausson_mass(omega, lambda, 1) / lambda).epsilon(1e-7));
}

TEST_CASE("moving Gausson equals the boosted standing one") {
  Grid g(1, 256, 24.0);
  const double v = 2 * std::numbers::pi / 24.0 * 3;
  const GaussonSpec standing{0.2, -1.0, {}, {-1.0}};
  const GaussonSpec moving{0.2, -1.0, {v}, {-1.0}};
  const std::vector<double> vel{v};
  const double t = 1.0;
  CHECK(max_abs_diff(gausson(moving, t, g), galilean_transform(gausson(standing, t, g), vel, t)) < 1e-12);
  CHECK(max_abs_diff(gausson(moving, 0.0, g), apply_galilean(gausson(standing, 0.0, g), vel)) < 1e-15);
}

TEST_CASE("modulated distance recovers orbit members") {
  Grid g(1, 256, 20.0);
  const GaussonSpec s{0.0, -1.0, {}, {}};
  const Field u = std::polar(1.0, 0.7) * gausson({0.0, -1.0, {}, {1.2}}, 0.0, g);
  const auto md = modulated_distance(u, s);
  CHECK(md.converged);
  CHECK(md.distance < 1e-8);
  CHECK(md.theta == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(md.shift[0] == doctest::Approx(1.2).epsilon(1e-10));

  Grid g2(2, 64, 16.0);
  const Field u2 = std::polar(1.0, -2.0) * gausson({0.0, -1.0, {}, {-0.37, 2.1}}, 0.0, g2);
  const auto md2 = modulated_distance(u2, s);
  CHECK(md2.distance < 1e-8);
  CHECK(md2.theta == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(md2.shift[0] == doctest::Approx(-0.37).epsilon(1e-10));
  CHECK(md2.shift[1] == doctest::Approx(2.1).epsilon(1e-10));
}

TEST_CASE("modulated distance is bounded by the trivial candidate") {
  Grid g(1, 256, 20.0);
  const GaussonSpec s{0.0, -1.0, {}, {}};
  const Field phi = gausson(s, 0.0, g);
  const Field bump = Field::sample(g, [](const auto& x) {
    return std::exp(Complex(-2 * (x[0] - 0.8) * (x[0] - 0.8), 1.5 * x[0]));
  });
  Field u = phi;
  u += 0.01 * bump;
  const double bump_h1 = std::sqrt(std::pow(l2_norm(bump), 2) + std::pow(hs_norm(bump, 1.0), 2));
  const auto md = modulated_distance(u, s);
  CHECK(md.distance <= 0.01 * bump_h1 * (1 + 1e-6));
  CHECK(md.distance > 0);
}

TEST_CASE("scaling maps Gaussons between orbits") {
  Grid g(1, 256, 20.0);
  const double lambda = -0.8, omega = 0.3;
  const Field phi = gausson({omega, lambda, {}, {}}, 0.0, g);
  for (double k : {0.5, 1.7, 3.0}) {
    const double omega2 = omega - lambda * std::log(k * k);
    const auto md = modulated_distance(apply_scaling(phi, k, 0.0, lambda), {omega2, lambda, {}, {}});
    CHECK(md.distance < 1e-8);
  }
}

TEST_CASE("Gausson stays on its orbit under the solver") {
  Grid g(1, 256, 16.0);
  const GaussonSpec s{0.5, -1.0, {}, {0.3}};
  const NlsProblem p{LogNonlinearity{-1.0, 1e-12}, g, {1e-3, false, 0}};
  const auto res = evolve(p, gausson(s, 0.0, g), 0.0, 1.0);
  CHECK(modulated_distance(res.final_field, s).distance < 1e-6);
  CHECK(l2_distance(res.final_field, gausson(s, 1.0, g)) < 1e-6);
}

TEST_CASE("perturbed Gausson remains orbitally close") {
  Grid g(1, 256, 24.0);
  const GaussonSpec s{0.0, -1.0, {}, {}};
  Field u0 = gausson(s, 0.0, g);
  u0 += 0.02 * Field::sample(g, [](const auto& x) { return Complex(std::exp(-(x[0] - 0.5) * (x[0] - 0.5)), 0); });
  const NlsProblem p{LogNonlinearity{-1.0, 1e-12}, g, {2e-3, false, 0}};
  const auto series = orbital_distance_series(p, u0, s, 50.0, 1.0);
  REQUIRE(series.distance.size() == 51);
  CHECK_FALSE(series.boundary_breach);
  CHECK(series.sup < 5 * series.distance.front());
}

TEST_CASE("breather modulus is periodic") {
  const double lambda = -1.0;
  const auto bp = breather_period(1.0, 0.0, lambda);
  REQUIRE_FALSE(bp.stationary);
  Grid g(1, 256, 16.0);
  GaussianSolution sol({{1.0, 0.0}}, Complex(1.0, 0), lambda, 2 * bp.period + 1);
  const NlsProblem p{LogNonlinearity{lambda, 1e-12}, g, {1e-3, false, 0}};
  // Compare moduli at t = T and 2T with t = 0, and that t = T/2 differs.
  NlsSolver solver(p);
  Field u = sol.field(0.0, g);
  auto advance = [&](double t0, double t1) {
    const int steps = static_cast<int>(std::ceil((t1 - t0) / 1e-3));
    const double dt = (t1 - t0) / steps;
    for (int i = 0; i < steps; ++i) solver.step_in_place(u, t0 + i * dt, dt);
  };
  auto modulus_gap = [&](const Field& a, const Field& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(std::abs(a[i]) - std::abs(b[i])));
    return m;
  };
  const Field u0 = u;
  advance(0.0, 0.5 * bp.period);
  CHECK(modulus_gap(u, u0) > 0.1);
  advance(0.5 * bp.period, bp.period);
  CHECK(modulus_gap(u, u0) < 1e-5);
  advance(bp.period, 2 * bp.period);
  CHECK(modulus_gap(u, u0) < 1e-5);
}

TEST_CASE("multi-Gausson superposition") {
  Grid g(1, 256, 40.0);
  const GaussonSpec a{0.0, -1.0, {}, {-8.0}}, b{0.0, -1.0, {}, {8.0}};
  CHECK(max_abs_diff(multi_gausson({a}, 0.3, g), gausson(a, 0.3, g)) == 0.0);
  CHECK_THROWS_AS(multi_gausson({a, a}, 0.0, g), std::invalid_argument);
  CHECK(max_abs_diff(multi_gausson({a, b}, 0.0, g), gausson(a, 0.0, g) + gausson(b, 0.0, g)) == 0.0);

  Grid wide(1, 512, 60.0);
  SuperpositionSetup st;
  st.lambda = -1.0;
  st.half_separation = 8.0;
  st.t_end = 10.0;
  const auto still = superposition_experiment(st, wide);
  CHECK(still.sup < 1e-3);
  st.velocity = 2 * std::numbers::pi / 60.0 * 5;
  st.t_end = 5.0;
  const auto moving = superposition_experiment(st, wide);
  CHECK_FALSE(moving.boundary_breach);
  CHECK(moving.sup < 1e-2);
}

TEST_CASE("nonlinearity estimate") {
  const auto same = nonlinearity_estimate_check({0.3, 0.4}, {0.3, 0.4});
  CHECK(same.lhs == 0.0);
  CHECK(same.ok);
  const auto unit = nonlinearity_estimate_check(1.0, 0.0);
  CHECK(unit.lhs == 0.0);
  CHECK(unit.rhs == 6.0);
  CHECK(unit.ok);
  CHECK_THROWS_AS(nonlinearity_estimate_check(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(nonlinearity_estimate_check(1.5, 0.5), std::invalid_argument);
  // Asymmetric: swapping arguments changes the right side.
  const auto ab = nonlinearity_estimate_check(0.01, 0.9), ba = nonlinearity_estimate_check(0.9, 0.01);
  CHECK(ab.lhs == doctest::Approx(ba.lhs));
  CHECK(ab.rhs != doctest::Approx(ba.rhs));
  const auto rep = audit_nonlinearity_estimate(300000, 3);
  CHECK(rep.pairs == 300000);
  CHECK(rep.violations == 0);
  CHECK(rep.max_ratio < 1.0);
  CHECK(rep.max_ratio > 0.1);
}

TEST_CASE("uniqueness estimate") {
  const auto same = uniqueness_estimate_check({2.0, -1.0}, {2.0, -1.0});
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  CHECK(same.ok);
  const auto pm = uniqueness_estimate_check(1.0, -1.0);
  CHECK(pm.lhs == 0.0);
  CHECK(pm.rhs == 16.0);
  CHECK(uniqueness_estimate_check(0.0, {0.0, 3.0}).ok);
  const auto rep = audit_uniqueness_estimate(300000, 4);
  CHECK(rep.violations == 0);
  CHECK(rep.max_ratio <= 1.0);
}

TEST_CASE("audits are reproducible from the seed") {
  const auto a = audit_uniqueness_estimate(1000, 9), b = audit_uniqueness_estimate(1000, 9);
  CHECK(a.max_ratio == b.max_ratio);
  CHECK(audit_uniqueness_estimate(1000, 10).max_ratio != a.max_ratio);
}
