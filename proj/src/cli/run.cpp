#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>

#include "lognls/diagnostics.hpp"
#include "lognls/fluids.hpp"
#include "lognls/gaussian.hpp"
#include "lognls/rng.hpp"
#include "lognls/scenario.hpp"
#include "lognls/solitons.hpp"
#include "lognls/solver.hpp"

namespace lognls {

namespace {

namespace fs = std::filesystem;

struct Context {
  const Scenario& s;
  RunReport& report;

  void check(const std::string& name, double value, double tolerance) {
    report.checks.push_back({name, value, tolerance, value <= tolerance});
  }
  void result(const std::string& key, double v) { report.results[key] = format_real(v); }
  void result(const std::string& key, const std::string& v) { report.results[key] = v; }

  std::ofstream open_csv(const std::string& file) const {
    std::ofstream out(s.output_dir / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (s.output_dir / file).string());
    return out;
  }
};

// Multiples of `interval` in (0, t_end], plus t_end.
std::vector<double> uniform_times(double t_end, double interval) {
  std::vector<double> ts{0.0};
  for (std::size_t i = 1;; ++i) {
    const double t = static_cast<double>(i) * interval;
    if (t >= t_end * (1 - 1e-12)) break;
    ts.push_back(t);
  }
  ts.push_back(t_end);
  return ts;
}

double interval_or(const Scenario& s, double divisions) {
  const double v = s.real("record_interval");
  if (v < 0) throw std::invalid_argument("record_interval must be nonnegative");
  return v > 0 ? v : s.real("t_end") / divisions;
}

Grid grid_of(const Scenario& s) {
  const long long d = s.integer("dim"), n = s.integer("n");
  if (d < 1 || d > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (n < 4) throw std::invalid_argument("n must be at least 4");
  return Grid(static_cast<int>(d), static_cast<std::size_t>(n), s.real("L"));
}

// Smooth seeded perturbation: a few low Fourier modes per axis under a
// Gaussian envelope.
Field noise_field(const Grid& g, double amplitude, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int d = g.dim();
  std::vector<std::array<Complex, 4>> c(d);
  for (auto& axis : c)
    for (auto& z : axis) z = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  const double q = g.wavenumber_quantum();
  return Field::sample(g, [&](const auto& x) {
    Complex sum = 0;
    double r2 = 0;
    for (int j = 0; j < d; ++j) {
      r2 += x[j] * x[j];
      for (int m = 0; m < 4; ++m) sum += c[j][m] * std::polar(1.0, (m + 1) * q * x[j]);
    }
    return amplitude * std::exp(-0.25 * r2) * sum;
  });
}

Field gaussian_datum(const Scenario& s, const Grid& g, std::uint64_t seed) {
  const int d = g.dim();
  const Complex a(s.real("alpha0"), s.real("beta0"));
  if (!(a.real() > 0)) throw std::invalid_argument("alpha0 must be positive");
  const double c = s.params.contains("center") ? s.real("center") : 0.0;
  Field u = Field::sample(g, [&](const auto& x) {
    double r2 = 0;
    for (int j = 0; j < d; ++j) r2 += (x[j] - c) * (x[j] - c);
    return s.real("amplitude") * std::exp(-0.5 * a * r2);
  });
  const double ba = s.real("bump_amplitude");
  if (ba != 0) {
    const double bc = s.real("bump_center"), w = s.real("bump_width");
    if (!(w > 0)) throw std::invalid_argument("bump_width must be positive");
    u = u + Field::sample(g, [&](const auto& x) {
          double r2 = 0;
          for (int j = 0; j < d; ++j) r2 += (x[j] - bc) * (x[j] - bc);
          return Complex(ba * std::exp(-r2 / (w * w)), 0);
        });
  }
  if (s.real("noise") != 0) u = u + noise_field(g, s.real("noise"), seed);
  return u;
}

void write_series_csv(Context& ctx, const std::string& file, const char* column,
                      const DistanceSeries& series) {
  auto out = ctx.open_csv(file);
  out << "t," << column << '\n';
  for (std::size_t i = 0; i < series.t.size(); ++i)
    out << format_real(series.t[i]) << ',' << format_real(series.distance[i]) << '\n';
}

double max_mass_drift(const std::vector<DiagnosticsRecord>& records) {
  double m = 0;
  for (const auto& r : records) m = std::max(m, std::abs(r.mass - records.front().mass) / records.front().mass);
  return m;
}

void write_snapshots(Context& ctx, const EvolveResult& res) {
  if (res.snapshots.empty()) return;
  fs::create_directories(ctx.s.output_dir / "snapshots");
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "snap_%04zu", i);
    write_snapshot((ctx.s.output_dir / "snapshots" / stem).string(), res.snapshots[i].second,
                   res.snapshots[i].first, {{"scenario", ctx.s.name}, {"kind", std::string(kind_name(ctx.s.kind))}});
  }
  ctx.result("snapshots", static_cast<double>(res.snapshots.size()));
}

void boundary_checks(Context& ctx, const EvolveResult& res) {
  ctx.result("boundary_breach", res.boundary_breach ? "true" : "false");
  if (res.boundary_breach) ctx.result("breach_time", res.breach_time);
  ctx.check("boundary_mass", res.max_boundary_fraction, ctx.s.real("breach_threshold"));
}

void run_tau(Context& ctx) {
  const Scenario& s = ctx.s;
  const std::string& mode_name = s.text("mode");
  TauMode mode;
  double parameter;
  if (mode_name == "logarithmic") {
    mode = TauMode::logarithmic;
    parameter = s.real("lambda");
  } else if (mode_name == "polytropic") {
    mode = TauMode::polytropic;
    parameter = s.real("alpha");
  } else {
    throw std::invalid_argument("mode must be logarithmic or polytropic");
  }
  const double t_end = s.real("t_end");
  const long long samples = s.integer("samples");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  const TauScaler tau = solve_tau(mode, parameter, t_end);
  std::vector<double> ts{0.0};
  const bool log_spacing = s.text("spacing") == "log";
  if (!log_spacing && s.text("spacing") != "linear") throw std::invalid_argument("spacing must be log or linear");
  // Log spacing runs geometrically from t_min up to t_end.
  const double t_min = std::min(1e-2, t_end / static_cast<double>(samples));
  for (long long i = 0; i < samples; ++i) {
    const double f = samples == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
    ts.push_back(log_spacing ? t_min * std::pow(t_end / t_min, f)
                             : t_end * static_cast<double>(i + 1) / static_cast<double>(samples));
  }
  ts.back() = t_end;
  auto out = ctx.open_csv("tau.csv");
  out << "t,tau,taudot,first_integral_residual\n";
  for (double t : ts)
    out << format_real(t) << ',' << format_real(tau.tau(t)) << ',' << format_real(tau.tau_dot(t)) << ','
        << format_real(tau.first_integral_residual(t)) << '\n';
  ctx.result("tau_end", tau.tau(t_end));
  ctx.result("taudot_end", tau.tau_dot(t_end));
  ctx.check("first_integral_residual", tau.max_first_integral_residual(t_end), s.real("residual_tol"));
}

void run_gaussian(Context& ctx) {
  const Scenario& s = ctx.s;
  const double lambda = s.real("lambda"), t_end = s.real("t_end");
  const auto w = evolve_width(s.real("alpha0"), s.real("beta0"), lambda, t_end);
  auto out = ctx.open_csv("gaussian.csv");
  out << "t,r,rdot,energy_residual,re_b,im_b\n";
  for (double t : uniform_times(t_end, interval_or(s, 200))) {
    const Complex b = amplitude_b(w, Complex(s.real("amplitude"), 0), lambda, t);
    out << format_real(t) << ',' << format_real(w.r(t)) << ',' << format_real(w.rdot(t)) << ','
        << format_real(w.energy_residual(t)) << ',' << format_real(b.real()) << ',' << format_real(b.imag()) << '\n';
  }
  ctx.check("energy_residual", w.max_energy_residual(), s.real("residual_tol"));
  if (lambda < 0) {
    const auto p = breather_period(s.real("alpha0"), s.real("beta0"), lambda);
    ctx.result("stationary", p.stationary ? "true" : "false");
    if (!p.stationary) {
      ctx.result("period_quadrature", p.period);
      const double measured = w.measured_period();
      if (measured > 0) {
        ctx.result("period_measured", measured);
        ctx.check("period_agreement", std::abs(measured - p.period) / p.period, s.real("period_tol"));
      }
    }
  }
}

void run_evolve(Context& ctx) {
  const Scenario& s = ctx.s;
  const Grid g = grid_of(s);
  const int d = g.dim();
  const double lambda = s.real("lambda"), t_end = s.real("t_end");
  Nonlinearity kind;
  const bool log_kind = s.text("nonlinearity") == "log";
  if (log_kind) kind = LogNonlinearity{lambda, s.real("regularization")};
  else if (s.text("nonlinearity") == "power") kind = PowerNonlinearity{s.real("sigma"), lambda};
  else throw std::invalid_argument("nonlinearity must be log or power");
  const NlsProblem problem{kind, g, {s.real("dt"), false, 0}};

  SplitMix64 seeds(s.seed);
  const std::vector<double> v(d, s.real("velocity")), c(d, s.real("center"));
  Field u0 = [&] {
    if (s.text("datum") == "gausson") {
      if (!log_kind) throw std::invalid_argument("a Gausson datum needs the log nonlinearity");
      Field u = gausson({s.real("omega"), lambda, v, c}, 0.0, g);
      if (s.real("noise") != 0) u = u + noise_field(g, s.real("noise"), seeds.next());
      return u;
    }
    if (s.text("datum") != "gaussian") throw std::invalid_argument("datum must be gaussian or gausson");
    Field u = gaussian_datum(s, g, seeds.next());
    return s.real("velocity") != 0 ? apply_galilean(u, v) : u;
  }();

  EvolveOptions opt;
  opt.record_interval = interval_or(s, 100);
  opt.snapshot_interval = s.real("snapshot_interval");
  opt.stop_on_breach = true;
  opt.breach_threshold = s.real("breach_threshold");
  const auto res = evolve(problem, u0, 0.0, t_end, opt);

  auto out = ctx.open_csv("diagnostics.csv");
  write_csv(out, res.records, d);
  write_snapshots(ctx, res);
  ctx.result("steps", static_cast<double>(res.steps));
  ctx.result("t_final", res.t_final);
  boundary_checks(ctx, res);
  ctx.check("mass_drift", max_mass_drift(res.records), s.real("mass_tol"));
  if (log_kind) {
    double drift = 0;
    for (const auto& r : res.records) drift = std::max(drift, std::abs(r.energy - res.records.front().energy));
    ctx.result("energy_drift", drift);
  }
  const bool exact_gaussian = log_kind && s.text("datum") == "gaussian" && s.real("velocity") == 0 &&
                              s.real("center") == 0 && s.real("bump_amplitude") == 0 && s.real("noise") == 0;
  if (exact_gaussian && !res.boundary_breach) {
    const GaussianSolution sol(std::vector<GaussianAxis>(d, {s.real("alpha0"), s.real("beta0")}),
                               Complex(s.real("amplitude"), 0), lambda, t_end);
    const double err = l2_distance(res.final_field, sol.field(res.t_final, g));
    ctx.result("oracle_l2_error", err);
    if (s.real("oracle_tol") > 0) ctx.check("oracle_l2_error", err, s.real("oracle_tol"));
  }
}

void run_rescaled(Context& ctx) {
  const Scenario& s = ctx.s;
  const Grid g = grid_of(s);
  const int d = g.dim();
  const double lambda = s.real("lambda"), t_end = s.real("t_end");
  if (!(lambda > 0)) throw std::invalid_argument("the rescaled frame needs lambda > 0");
  auto tau = std::make_shared<const TauScaler>(solve_tau(TauMode::logarithmic, lambda, t_end));
  const bool adaptive = s.flag("adaptive");
  const NlsProblem problem{RescaledLogNonlinearity{lambda, s.real("regularization"), tau}, g,
                           {s.real("dt"), adaptive, adaptive ? s.real("dt_max") : 0.0}};
  SplitMix64 seeds(s.seed);
  const Field u0 = gaussian_datum(s, g, seeds.next());
  const double m0 = l2_norm(u0) * l2_norm(u0);
  const Field v0 = to_rescaled_frame(u0, *tau, 0.0, m0, g).field;

  EvolveOptions opt;
  opt.record_interval = interval_or(s, 100);
  opt.snapshot_interval = s.real("snapshot_interval");
  opt.initial_mass = m0;
  if (s.integer("max_points") < 0) throw std::invalid_argument("max_points must be nonnegative");
  opt.max_points = static_cast<std::size_t>(s.integer("max_points"));
  opt.stop_on_breach = true;
  opt.breach_threshold = s.real("breach_threshold");
  const auto res = evolve(problem, v0, 0.0, t_end, opt);

  auto out = ctx.open_csv("diagnostics.csv");
  write_csv(out, res.records, d);
  write_snapshots(ctx, res);
  ctx.result("steps", static_cast<double>(res.steps));
  ctx.result("t_final", res.t_final);
  ctx.result("initial_mass", m0);
  ctx.result("final_points", static_cast<double>(res.final_field.grid().points_per_axis()));
  for (const auto& [t, n] : res.refinements)
    ctx.result("refined_to_" + std::to_string(n), t);
  boundary_checks(ctx, res);
  ctx.check("mass_drift", max_mass_drift(res.records), s.real("mass_tol"));
  double increase = 0;
  for (std::size_t i = 1; i < res.records.size(); ++i)
    increase = std::max(increase, res.records[i].pseudo_energy - res.records[i - 1].pseudo_energy);
  ctx.check("pseudo_energy_increase", increase, 1e-10 * (1 + std::abs(res.records.front().pseudo_energy)));
  const auto com = center_of_mass_check(res.records, *tau, lambda);
  ctx.check("center_of_mass", com.max_scaled_deviation, s.real("com_tol"));
  const double gap0 = std::abs(res.records.front().variance - 0.5 * d * res.records.front().mass);
  const double gap1 = std::abs(res.records.back().variance - 0.5 * d * res.records.back().mass);
  ctx.result("variance_gap_initial", gap0);
  ctx.result("variance_gap_final", gap1);
}

void run_solitons(Context& ctx) {
  const Scenario& s = ctx.s;
  const Grid g = grid_of(s);
  const int d = g.dim();
  const double lambda = s.real("lambda"), t_end = s.real("t_end"), interval = interval_or(s, 50);
  DistanceSeries series;
  if (s.text("experiment") == "stationarity") {
    if (s.real("velocity") != 0) throw std::invalid_argument("the stationarity orbit has no boost");
    const GaussonSpec spec{s.real("omega"), lambda, {}, {}};
    Field u0 = gausson(spec, 0.0, g);
    if (const double p = s.real("perturbation"); p != 0) {
      const double amp = p * gausson_amplitude(spec.omega, lambda, d);
      u0 = u0 + Field::sample(g, [&](const auto& x) {
             double r2 = 0;
             for (int j = 0; j < d; ++j) r2 += (x[j] - 1) * (x[j] - 1);
             return Complex(amp * std::exp(-r2), 0);
           });
    }
    const NlsProblem problem{LogNonlinearity{lambda, s.real("regularization")}, g, {s.real("dt"), false, 0}};
    series = orbital_distance_series(problem, u0, spec, t_end, interval);
    write_series_csv(ctx, "solitons.csv", "distance", series);
  } else if (s.text("experiment") == "superposition") {
    const SuperpositionSetup setup{lambda, s.real("half_separation"), s.real("velocity"), t_end,
                                   s.real("dt"), interval, s.real("regularization")};
    series = superposition_experiment(setup, g);
    write_series_csv(ctx, "solitons.csv", "deviation", series);
  } else {
    throw std::invalid_argument("experiment must be stationarity or superposition");
  }
  ctx.result("sup", series.sup);
  ctx.result("boundary_breach", series.boundary_breach ? "true" : "false");
  ctx.check("boundary", series.boundary_breach ? 1.0 : 0.0, 0.0);
  if (s.real("tol") > 0) ctx.check("sup_distance", series.sup, s.real("tol"));
}

void run_fluids(Context& ctx) {
  const Scenario& s = ctx.s;
  const std::vector<double> beta0 = s.list("beta0");
  std::vector<double> omega0 = s.list("omega0");
  if (omega0.size() == 1 && beta0.size() > 1) omega0.assign(beta0.size(), omega0[0]);
  const int d = static_cast<int>(beta0.size());
  const double t_end = s.real("t_end");
  const FluidGaussianParams params{s.real("mass"), s.real("capillarity"), s.real("viscosity"), 1.0};
  const auto traj = fluid_gaussian_ode(beta0, omega0, params, t_end);
  const TauScaler tau = solve_tau(TauMode::logarithmic, 1.0, t_end);
  const long long n = s.integer("n");
  if (n < 4) throw std::invalid_argument("n must be at least 4");
  const Grid grid(d, static_cast<std::size_t>(n), s.real("L"));
  const auto times = uniform_times(t_end, interval_or(s, 100));
  const auto series = fluid_series(traj, tau, grid, times);

  auto out = ctx.open_csv("fluids.csv");
  write_fluid_csv_header(out, d);
  for (const auto& r : series) write_fluid_csv_row(out, r);

  const auto rep = rigidity_checks(series, d, grid, traj, tau);
  ctx.result("dissipation_integral", rep.dissipation_integral);
  ctx.result("sup_energy", rep.sup_energy);
  ctx.result("max_energy_plus_dissipation", rep.max_energy_plus_dissipation);
  ctx.result("second_moment_monotone", rep.second_moment_monotone ? "true" : "false");
  ctx.result("monotone_from", rep.monotone_from);
  ctx.result("initial_second_moment_gap", rep.initial_second_moment_gap);
  ctx.result("final_density_gap", rep.final_density_gap);
  ctx.check("first_moment", rep.max_first_moment, 1e-12);
  ctx.check("final_second_moment_gap", rep.final_second_moment_gap,
            std::max(rep.initial_second_moment_gap, 1e-12));

  // Pointwise residual at t_end on a physical box holding ~12 standard
  // deviations of the widest axis and resolving the narrowest one.
  if (d <= 2) {
    double bmax = 0, bmin = 1e300;
    for (int j = 0; j < d; ++j) {
      bmax = std::max(bmax, traj.beta(t_end, j));
      bmin = std::min(bmin, traj.beta(t_end, j));
    }
    const double L = 24 * std::sqrt(bmax);
    std::size_t np = 64;
    while (L / static_cast<double>(np) > std::sqrt(bmin) / 4) np *= 2;
    if (np <= (d == 1 ? 1u << 16 : 1024u)) {
      const auto r = fluid_pde_residual(traj, t_end, Grid(d, np, L));
      ctx.check("pde_residual", std::max(r.continuity, r.momentum), s.real("residual_tol"));
    } else {
      ctx.result("pde_residual", "skipped: widths too anisotropic");
    }
  }
}

void run_verify(Context& ctx) {
  const Scenario& s = ctx.s;
  const long long pairs = s.integer("pairs"), fields = s.integer("gn_fields");
  if (pairs < 1 || fields < 0) throw std::invalid_argument("pairs must be positive and gn_fields nonnegative");
  SplitMix64 rng(s.seed);
  const auto nl = audit_nonlinearity_estimate(static_cast<std::size_t>(pairs), rng.next());
  const auto un = audit_uniqueness_estimate(static_cast<std::size_t>(pairs), rng.next());

  const auto gn = gn_dual_audit(static_cast<std::size_t>(fields), rng.next());

  auto out = ctx.open_csv("verify.csv");
  out << "suite,cases,violations,max_ratio\n";
  out << "nonlinearity_estimate," << nl.pairs << ',' << nl.violations << ',' << format_real(nl.max_ratio) << '\n';
  out << "uniqueness_estimate," << un.pairs << ',' << un.violations << ',' << format_real(un.max_ratio) << '\n';
  out << "dual_gagliardo_nirenberg," << gn.fields << ',' << gn.violations << ',' << format_real(gn.max_ratio) << '\n';
  ctx.check("nonlinearity_estimate_violations", static_cast<double>(nl.violations), 0);
  ctx.check("uniqueness_estimate_violations", static_cast<double>(un.violations), 0);
  ctx.check("dual_gagliardo_nirenberg_violations", static_cast<double>(gn.violations), 0);
}

void write_summary(const Scenario& s, const RunReport& r) {
  std::ofstream out(s.output_dir / "summary.txt", std::ios::binary);
  out << "name = " << s.name << '\n';
  out << "kind = " << kind_name(s.kind) << '\n';
  out << "seed = " << s.seed << '\n';
  for (const auto& [key, value] : s.params)
    if (key != "kind" && key != "name" && key != "seed") out << "param." << key << " = " << format_param(value) << '\n';
  const char* status = r.exit_status == 0 ? "pass" : r.exit_status == 1 ? "fail" : "error";
  out << "status = " << status << '\n';
  out << "exit_status = " << r.exit_status << '\n';
  for (const auto& c : r.checks) {
    out << "check." << c.name << " = " << (c.pass ? "pass" : "fail") << '\n';
    out << "check." << c.name << ".value = " << format_real(c.value) << '\n';
    out << "check." << c.name << ".tolerance = " << format_real(c.tolerance) << '\n';
  }
  for (const auto& [key, value] : r.results) out << "result." << key << " = " << value << '\n';
  if (!r.error.empty()) out << "error = " << r.error << '\n';
  out << "wall_time_s = " << format_real(r.wall_seconds) << '\n';
}

}  // namespace

RunReport run_scenario(const Scenario& s) {
  RunReport report;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(s.output_dir);
  } catch (const std::exception& e) {
    report.exit_status = 2;
    report.error = e.what();
    return report;
  }
  Context ctx{s, report};
  try {
    switch (s.kind) {
      case ScenarioKind::tau: run_tau(ctx); break;
      case ScenarioKind::gaussian: run_gaussian(ctx); break;
      case ScenarioKind::evolve: run_evolve(ctx); break;
      case ScenarioKind::rescaled: run_rescaled(ctx); break;
      case ScenarioKind::solitons: run_solitons(ctx); break;
      case ScenarioKind::fluids: run_fluids(ctx); break;
      case ScenarioKind::verify: run_verify(ctx); break;
    }
    report.exit_status = std::all_of(report.checks.begin(), report.checks.end(), [](const CheckResult& c) { return c.pass; }) ? 0 : 1;
  } catch (const std::exception& e) {
    report.exit_status = 2;
    report.error = e.what();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_summary(s, report);
  return report;
}

Scenario verify_scenario(std::uint64_t seed, const fs::path& out_base) {
  Scenario s = parse_config("kind = verify\n", out_base);
  s.seed = seed;
  return s;
}

}  // namespace lognls
