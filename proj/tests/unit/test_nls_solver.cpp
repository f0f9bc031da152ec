#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include <lognls/solver.hpp>

#include "test_support.hpp"

using namespace lognls;
using lognls::testing::max_abs_diff;

namespace {

NlsProblem log_problem(const Grid& g, double lambda, double dt, double eps = 1e-12) {
  return {LogNonlinearity{lambda, eps}, g, {dt, false, 0}};
}

Field gausson(const Grid& g, double lambda, double shift = 0) {
  // omega = 0 profile e^{d/2} e^{lambda |x|^2}.
  return Field::sample(g, [&](const auto& x) {
    double r2 = 0;
    for (int j = 0; j < g.dim(); ++j) r2 += (x[j] - shift) * (x[j] - shift);
    return Complex(std::exp(0.5 * g.dim() + lambda * r2), 0);
  });
}

Field run(const NlsProblem& p, const Field& f0, double t_end) {
  return evolve(p, f0, 0.0, t_end).final_field;
}

}  // namespace

TEST_CASE("problem validation") {
  Grid g1(1, 64, 10.0), g3(3, 8, 10.0);
  CHECK_THROWS_AS(NlsProblem({PowerNonlinearity{0.0, 1.0}, g1, {}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(NlsProblem({PowerNonlinearity{2.0, 1.0}, g3, {}}).validate(), std::invalid_argument);
  CHECK_NOTHROW(NlsProblem({PowerNonlinearity{1.5, 1.0}, g3, {}}).validate());
  CHECK_THROWS_AS(log_problem(g1, 1.0, 1e-3, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(log_problem(g1, 1.0, -1e-3).validate(), std::invalid_argument);
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, 1.0, 1.0));
  CHECK_THROWS_AS(NlsProblem({RescaledLogNonlinearity{2.0, 1e-10, tau}, g1, {}}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(NlsProblem({RescaledLogNonlinearity{1.0, 1e-10, nullptr}, g1, {}}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(NlsProblem({LogNonlinearity{1.0}, g1, {1e-3, true, 1e-2}}).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(NlsProblem({RescaledLogNonlinearity{1.0, 1e-10, tau}, g1, {1e-3, true, 1e-2}}).validate());
  NlsSolver s(log_problem(g1, 1.0, 1e-3));
  CHECK_THROWS_AS(s.step_strang(Field(g1), 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("linear step reproduces the free Gaussian") {
  for (int d : {1, 2}) {
    Grid g(d, d == 1 ? 512 : 128, 40.0);
    const Field u0 = Field::sample(g, [&](const auto& x) {
      double r2 = 0;
      for (int j = 0; j < d; ++j) r2 += x[j] * x[j];
      return std::exp(Complex(-0.5 * r2, 0));
    });
    const double t = 1.0;
    const Field u = step_strang(log_problem(g, 0.0, t), u0, 0.0, t);
    const Complex z(1, t);
    const Field exact = Field::sample(g, [&](const auto& x) {
      double r2 = 0;
      for (int j = 0; j < d; ++j) r2 += x[j] * x[j];
      return std::pow(z, -0.5 * d) * std::exp(-0.5 * r2 / z);
    });
    CHECK(max_abs_diff(u, exact) < 1e-10);
  }
}

TEST_CASE("every kind conserves mass") {
  SplitMix64 rng(7);
  Grid g(2, 32, 12.0);
  const Field f0 = lognls::testing::random_band_limited(g, rng, 6);
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, 0.7, 2.0));
  const std::vector<NlsProblem> problems{
      {PowerNonlinearity{1.0, 1.0}, g, {0.01, false, 0}},
      {PowerNonlinearity{0.5, -1.0}, g, {0.01, false, 0}},
      log_problem(g, -1.0, 0.01),
      {RescaledLogNonlinearity{0.7, 1e-10, tau}, g, {0.01, false, 0}},
  };
  const double m0 = std::norm(l2_norm(f0));
  for (const auto& p : problems) {
    NlsSolver s(p);
    Field f = f0;
    for (int i = 0; i < 50; ++i) f = s.step_strang(f, 0.01 * i, 0.01);
    CHECK(std::abs(std::norm(l2_norm(f)) - m0) / m0 < 1e-13);
  }
}

TEST_CASE("nonlinear sub-step preserves the modulus exactly") {
  SplitMix64 rng(11);
  Grid g(1, 64, 10.0);
  const Field f0 = lognls::testing::random_band_limited(g, rng, 10);
  NlsSolver s(log_problem(g, 1.3, 0.1));
  Field f = f0;
  s.nonlinear_flow(f, 0.1);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i]) == doctest::Approx(std::abs(f0[i])).epsilon(1e-15));
}

TEST_CASE("Gausson is stationary under the discrete flow") {
  Grid g(1, 256, 16.0);
  const Field u0 = gausson(g, -1.0);
  const Field u = run(log_problem(g, -1.0, 1e-3, 1e-12), u0, 1.0);
  CHECK(l2_distance(u, u0) < 1e-6);
}

TEST_CASE("zero datum stays zero") {
  Grid g(2, 16, 8.0);
  const auto res = evolve(log_problem(g, 1.0, 0.01), Field(g), 0.0, 0.5);
  for (auto z : res.final_field.values()) CHECK(z == Complex(0));
  CHECK_FALSE(res.boundary_breach);
}

TEST_CASE("tensor data evolve as products") {
  const double lambda = 0.8, t = 0.5;
  Grid g1(1, 64, 16.0), g2(2, 64, 16.0);
  auto p1 = [](double x) { return std::exp(Complex(-0.5 * x * x, 0.3 * x)) * (1.0 + 0.2 * std::cos(x)); };
  auto p2 = [](double x) { return 0.7 * std::exp(Complex(-0.8 * (x - 0.5) * (x - 0.5), 0)); };
  const Field a0 = Field::sample(g1, [&](const auto& x) { return p1(x[0]); });
  const Field b0 = Field::sample(g1, [&](const auto& x) { return p2(x[0]); });
  const Field u0 = Field::sample(g2, [&](const auto& x) { return p1(x[0]) * p2(x[1]); });
  const double eps = 1e-14;
  const Field a = run(log_problem(g1, lambda, 1e-3, eps), a0, t);
  const Field b = run(log_problem(g1, lambda, 1e-3, eps), b0, t);
  const Field u = run(log_problem(g2, lambda, 1e-3, eps), u0, t);
  Field expected(g2);
  for (std::size_t i = 0; i < g2.size(); ++i) {
    const auto idx = g2.unravel(i);
    expected[i] = a[idx[0]] * b[idx[1]];
  }
  CHECK(l2_distance(u, expected) < 1e-6);
}

TEST_CASE("Gaussian datum follows the Gaussian ODE") {
  const double lambda = 1.0;
  GaussianSolution sol({{1.0, 0.0}}, Complex(1.0, 0), lambda, 5.0);
  Grid g(1, 2048, 120.0);
  const Field u0 = sol.field(0.0, g);
  const auto p = log_problem(g, lambda, 1e-3, 1e-12);
  NlsSolver s(p);
  Field u = u0;
  double t = 0;
  for (int k = 1; k <= 5; ++k) {
    for (int i = 0; i < 1000; ++i, t += 1e-3) s.step_in_place(u, t, 1e-3);
    CHECK(l2_distance(u, sol.field(static_cast<double>(k), g)) < 1e-4);
  }
}

TEST_CASE("Galilean boost") {
  Grid g(1, 256, 16.0);
  const Field f = gausson(g, -1.0, 0.5);
  const std::vector<double> zero{0.0};
  CHECK(max_abs_diff(apply_galilean(f, zero), f) == 0.0);
  const std::vector<double> bad{0.1};
  CHECK_THROWS_AS(apply_galilean(f, bad), std::invalid_argument);

  const std::vector<double> v{2 * 2 * std::numbers::pi / 16.0};
  const auto m0 = moments(f), m1 = moments(apply_galilean(f, v));
  CHECK(m1.momentum[0] == doctest::Approx(m0.momentum[0] + m0.mass * v[0]).epsilon(1e-12));
  CHECK(m1.mass == doctest::Approx(m0.mass).epsilon(1e-14));

  const auto p = log_problem(g, -1.0, 1e-3, 1e-12);
  const Field boosted = run(p, apply_galilean(f, v), 1.0);
  const Field transformed = galilean_transform(run(p, f, 1.0), v, 1.0);
  CHECK(l2_distance(boosted, transformed) < 1e-5);
}

TEST_CASE("scaling symmetry") {
  Grid g(1, 256, 24.0);
  const Field f = Field::sample(g, [](const auto& x) { return std::exp(Complex(-0.5 * x[0] * x[0], 0.2 * x[0])); });
  CHECK(max_abs_diff(apply_scaling(f, 2.0, 0.0, 1.0), 2.0 * f) < 1e-15);
  const Complex unit = std::polar(1.0, 0.7);
  const Field rot = apply_scaling(f, unit, 3.0, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(rot[i]) == doctest::Approx(std::abs(f[i])).epsilon(1e-14));
  CHECK_THROWS_AS(apply_scaling(f, 0.0, 1.0, 1.0), std::invalid_argument);

  const Complex k = std::polar(1.5, 0.3);
  const auto p = log_problem(g, 1.0, 1e-3, 1e-12);
  const Field lhs = run(p, k * f, 1.0);
  const Field rhs = apply_scaling(run(p, f, 1.0), k, 1.0, 1.0);
  CHECK(l2_distance(lhs, rhs) < 1e-5);
}

TEST_CASE("rescaled frame maps") {
  const double lambda = 1.0;
  GaussianSolution sol({{1.0, 0.3}}, Complex(1.4, 0.2), lambda, 3.0);
  const auto tau = solve_tau(TauMode::logarithmic, lambda, 3.0);
  const double mass = sol.mass();
  const double gamma_norm = std::pow(std::numbers::pi, 0.25);

  Grid gx(1, 1024, 80.0), gy(1, 256, 20.0);
  const Field u0 = sol.field(0.0, gy);
  const auto v0 = to_rescaled_frame(u0, tau, 0.0, mass, gy);
  CHECK(max_abs_diff(v0.field, Complex(gamma_norm / std::sqrt(mass)) * u0) < 1e-14);

  const double t = 2.0;
  const Field u = sol.field(t, gx);
  const auto v = to_rescaled_frame(u, tau, t, mass, gy);
  CHECK_FALSE(v.aliasing);
  CHECK(l2_norm(v.field) == doctest::Approx(gamma_norm).epsilon(1e-10));
  CHECK(max_abs_diff(v.field, sol.rescaled_field(t, gy, tau)) < 1e-10);
  const auto back = from_rescaled_frame(v.field, tau, t, mass, gx);
  CHECK(l2_distance(back.field, u) < 1e-10);

  // Under-resolved target: the chirp of u lands above 90% of Nyquist.
  Grid coarse(1, 64, 80.0);
  CHECK(from_rescaled_frame(v.field, tau, t, mass, coarse).aliasing);
}

TEST_CASE("rescaled run follows the Gaussian oracle and stays confined") {
  const double lambda = 1.0, t_end = 10.0;
  GaussianSolution sol({{1.0, 0.0}}, Complex(1.0, 0), lambda, t_end);
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, lambda, t_end));
  Grid g(1, 256, 24.0);
  const NlsProblem p{RescaledLogNonlinearity{lambda, 1e-12, tau}, g, {1e-3, true, 1e-2}};
  EvolveOptions o;
  o.record_interval = 1.0;
  o.initial_mass = sol.mass();
  const auto res = evolve(p, sol.rescaled_field(0.0, g, *tau), 0.0, t_end, o);
  CHECK_FALSE(res.boundary_breach);
  CHECK(res.t_final == t_end);
  CHECK(l2_distance(res.final_field, sol.rescaled_field(t_end, g, *tau)) < 1e-5);
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    CHECK(res.records[i].pseudo_energy <= res.records[i - 1].pseudo_energy + 1e-12);
    CHECK(res.records[i].mass == doctest::Approx(res.records[0].mass).epsilon(1e-12));
  }
  CHECK(res.steps < 4000);  // fixed dt would take 10000
}

TEST_CASE("adaptive step stays below the split-step resonance") {
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, 1.0, 1000.0));
  const Grid g(1, 4096, 20.0);
  NlsSolver solver({RescaledLogNonlinearity{1.0, 1e-10, tau}, g, {1e-3, true, 0.05}});
  const double kmax = std::numbers::pi * 4096 / 20.0;
  for (double t : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
    const double dt = solver.step_size(t);
    CHECK(dt <= solver.natural_step(t));
    CHECK(kmax * kmax * tau->inverse_square_integral(t, t + dt) / 2 <= kResonanceFraction * std::numbers::pi);
  }
  CHECK(solver.step_size(0.0) < 1e-3);                     // the cap binds early on a fine grid
  CHECK(solver.step_size(1000.0) == doctest::Approx(0.05));  // and not once tau is large
}

TEST_CASE("refinement tracks the rescaled Gaussian on a growing grid") {
  const double lambda = 1.0, t_end = 10.0;
  GaussianSolution sol({{1.0, 0.0}}, Complex(1.0, 0), lambda, t_end);
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, lambda, t_end));
  const Grid g(1, 64, 24.0);
  const NlsProblem p{RescaledLogNonlinearity{lambda, 1e-12, tau}, g, {1e-3, true, 1e-2}};
  EvolveOptions o;
  o.record_interval = 1.0;
  o.initial_mass = sol.mass();
  o.max_points = 1024;
  const auto res = evolve(p, sol.rescaled_field(0.0, g, *tau), 0.0, t_end, o);
  REQUIRE(res.refinements.size() >= 2);
  std::size_t n = 64;
  double t_prev = 0;
  for (const auto& [t, m] : res.refinements) {
    CHECK(m == 2 * n);
    CHECK(t >= t_prev);
    n = m;
    t_prev = t;
  }
  CHECK(res.final_field.grid().points_per_axis() == n);
  CHECK(n <= 1024);
  const Grid& fg = res.final_field.grid();
  CHECK(l2_distance(res.final_field, sol.rescaled_field(t_end, fg, *tau)) < 1e-5);
  for (const auto& r : res.records) CHECK(r.mass == doctest::Approx(res.records[0].mass).epsilon(1e-12));

  EvolveOptions bad = o;
  bad.max_points = 32;
  CHECK_THROWS_AS(evolve(p, sol.rescaled_field(0.0, g, *tau), 0.0, 1.0, bad), std::invalid_argument);
  const NlsProblem fixed{RescaledLogNonlinearity{lambda, 1e-12, tau}, g, {1e-3, false, 0}};
  CHECK_THROWS_AS(evolve(fixed, sol.rescaled_field(0.0, g, *tau), 0.0, 1.0, o), std::invalid_argument);
}

TEST_CASE("pseudo-energy balance") {
  // d/dt pseudo-energy = -(tau'/tau^3) ||grad v||^2.
  const double lambda = 1.0, t_end = 4.0;
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, lambda, t_end));
  Grid g(1, 256, 24.0);
  const Field v0 = Field::sample(g, [](const auto& y) {
    return std::exp(Complex(-0.5 * (y[0] - 0.7) * (y[0] - 0.7), 0.4 * y[0])) * (1.0 + 0.3 * std::sin(2 * y[0]));
  });
  const NlsProblem p{RescaledLogNonlinearity{lambda, 1e-12, tau}, g, {1e-3, false, 0}};
  EvolveOptions o;
  o.record_interval = 0.01;
  const auto res = evolve(p, v0, 0.0, t_end, o);
  double dissipated = 0;
  auto rate = [&](const DiagnosticsRecord& r) {
    const double T = tau->tau(r.t);
    return tau->tau_dot(r.t) / (T * T * T) * r.hs_one * r.hs_one;
  };
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    const auto &a = res.records[i - 1], &b = res.records[i];
    dissipated += 0.5 * (b.t - a.t) * (rate(a) + rate(b));
    CHECK(b.pseudo_energy <= a.pseudo_energy + 1e-12);
  }
  const double change = res.records.back().pseudo_energy - res.records.front().pseudo_energy;
  CHECK(change < 0);
  CHECK(std::abs(change + dissipated) < 1e-4 * dissipated);
}

TEST_CASE("center of mass law on a rescaled run") {
  const double lambda = 1.0, t_end = 5.0;
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, lambda, t_end));
  Grid g(1, 256, 24.0);
  const Field v0 = Field::sample(g, [](const auto& y) {
    return std::exp(Complex(-0.6 * (y[0] + 0.8) * (y[0] + 0.8), 0.9 * y[0]));
  });
  auto deviation = [&](double dt) {
    const NlsProblem p{RescaledLogNonlinearity{lambda, 1e-12, tau}, g, {dt, false, 0}};
    EvolveOptions o;
    o.record_interval = 0.25;
    const auto res = evolve(p, v0, 0.0, t_end, o);
    const auto rep = center_of_mass_check(res.records, *tau, lambda);
    CHECK(rep.samples == res.records.size());
    return rep.max_deviation;
  };
  // The law is exact for the flow; the splitting leaves an O(dt^2) residue.
  const double d1 = deviation(2e-3), d2 = deviation(1e-3);
  CHECK(d2 < 1e-6);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("energy conservation and second-order convergence") {
  const double lambda = -1.0, t_end = 10.0;
  Grid g(1, 256, 16.0);
  GaussianSolution sol({{1.0, 0.0}}, Complex(1.0, 0), lambda, t_end);
  const Field u0 = sol.field(0.0, g);
  auto drift = [&](double dt) {
    EvolveOptions o;
    o.record_interval = 0.5;
    const auto res = evolve(log_problem(g, lambda, dt, 1e-10), u0, 0.0, t_end, o);
    double m = 0;
    for (const auto& r : res.records) m = std::max(m, std::abs(r.energy - res.records[0].energy));
    return m;
  };
  const double d1 = drift(1e-3), d2 = drift(2e-3);
  CHECK(d1 < 1e-6);
  CHECK(d2 / d1 == doctest::Approx(4.0).epsilon(0.15));

  // Richardson: successive halvings shrink the error by 4.
  const auto p = [&](double dt) { return log_problem(g, 1.0, dt, 1e-12); };
  const Field f0 = Field::sample(g, [](const auto& x) { return std::exp(Complex(-0.5 * x[0] * x[0], 0)); });
  std::vector<Field> sols;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) sols.push_back(run(p(dt), f0, 1.0));
  const double e1 = l2_distance(sols[0], sols[1]);
  const double e2 = l2_distance(sols[1], sols[2]);
  const double e3 = l2_distance(sols[2], sols[3]);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("boundary monitor flags box outgrowth") {
  Grid g(1, 128, 12.0);
  const Field u0 = Field::sample(g, [](const auto& x) { return std::exp(Complex(-0.5 * x[0] * x[0], 0)); });
  EvolveOptions o;
  o.stop_on_breach = true;
  const auto res = evolve(log_problem(g, 0.0, 1e-2), u0, 0.0, 10.0, o);
  CHECK(res.boundary_breach);
  CHECK(res.t_final < 10.0);
  CHECK(res.breach_time > 0.5);
  CHECK(res.max_boundary_fraction > 1e-8);
}

TEST_CASE("records land on requested times") {
  Grid g(1, 64, 12.0);
  const Field u0 = gausson(g, -1.0);
  EvolveOptions o;
  o.record_interval = 0.25;
  o.record_times = {0.1, 0.33};
  o.snapshot_interval = 0.5;
  const auto res = evolve(log_problem(g, -1.0, 0.1), u0, 0.0, 1.0, o);
  std::vector<double> ts;
  for (const auto& r : res.records) ts.push_back(r.t);
  const std::vector<double> want{0.0, 0.1, 0.25, 0.33, 0.5, 0.75, 1.0};
  REQUIRE(ts.size() == want.size());
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ts[i] == doctest::Approx(want[i]).epsilon(1e-14));
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[2].first == 1.0);
}

TEST_CASE("snapshot round trip") {
  SplitMix64 rng(5);
  Grid g(2, 16, 6.0);
  const Field f = lognls::testing::random_band_limited(g, rng, 4);
  const auto dir = std::filesystem::temp_directory_path() / "lognls_snapshot_test";
  std::filesystem::create_directories(dir);
  const std::string stem = (dir / "snap").string();
  write_snapshot(stem, f, 1.25, {{"lambda", "-1"}});
  const auto s = read_snapshot(stem);
  CHECK(s.t == 1.25);
  CHECK(s.field.grid() == g);
  CHECK(s.metadata.at("lambda") == "-1");
  CHECK(max_abs_diff(s.field, f) < 1e-6 * std::max(1.0, l2_norm(f)));
  CHECK(std::filesystem::file_size(stem + ".bin") == g.size() * 8);
  std::filesystem::remove_all(dir);
}
