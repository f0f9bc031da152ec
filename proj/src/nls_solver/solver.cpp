#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "lognls/solver.hpp"

namespace lognls {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void NlsProblem::validate() const {
  const TimeStepping& s = stepping;
  if (!(s.dt > 0)) throw std::invalid_argument("dt must be positive");
  std::visit(overloaded{
                 [&](const PowerNonlinearity& p) {
                   const int d = grid.dim();
                   if (!(p.sigma > 0)) throw std::invalid_argument("sigma must be positive");
                   if (d >= 3 && !(p.sigma < 2.0 / (d - 2)))
                     throw std::invalid_argument("sigma must be energy-subcritical, sigma < 2/(d-2)");
                   if (s.adaptive) throw std::invalid_argument("adaptive stepping needs the rescaled kind");
                 },
                 [&](const LogNonlinearity& p) {
                   if (!(p.regularization > 0)) throw std::invalid_argument("regularization must be positive");
                   if (s.adaptive) throw std::invalid_argument("adaptive stepping needs the rescaled kind");
                 },
                 [&](const RescaledLogNonlinearity& p) {
                   if (!(p.regularization > 0)) throw std::invalid_argument("regularization must be positive");
                   if (!(p.lambda > 0)) throw std::invalid_argument("rescaled frame needs lambda > 0");
                   if (!p.scaler) throw std::invalid_argument("rescaled frame needs a tau scaler");
                   if (p.scaler->mode() != TauMode::logarithmic || p.scaler->parameter() != p.lambda)
                     throw std::invalid_argument("tau scaler must be logarithmic with the same lambda");
                   if (s.adaptive && !(s.dt_max >= s.dt))
                     throw std::invalid_argument("adaptive stepping needs dt_max >= dt");
                 },
             },
             kind);
}

double NlsProblem::lambda() const {
  return std::visit([](const auto& k) { return k.lambda; }, kind);
}

const TauScaler* NlsProblem::scaler() const {
  if (const auto* r = std::get_if<RescaledLogNonlinearity>(&kind)) return r->scaler.get();
  return nullptr;
}

NlsSolver::NlsSolver(NlsProblem problem) : problem_(std::move(problem)), ws_(problem_.grid) {
  problem_.validate();
  if (problem_.rescaled()) {
    const double eps = std::get<RescaledLogNonlinearity>(problem_.kind).regularization;
    r2_.resize(problem_.grid.size());
    floor_.resize(problem_.grid.size());
    for (std::size_t i = 0; i < r2_.size(); ++i) {
      r2_[i] = problem_.grid.radius_squared(i);
      floor_[i] = eps * std::exp(-r2_[i]);
    }
  }
}

double NlsSolver::step_size(double t) const {
  const TimeStepping& s = problem_.stepping;
  if (!s.adaptive) return s.dt;
  return std::min(natural_step(t), resonance_step(problem_.grid.points_per_axis(), t));
}

double NlsSolver::natural_step(double t) const {
  const TimeStepping& s = problem_.stepping;
  return std::min(s.dt_max, s.dt * std::pow(problem_.scaler()->tau(t), 2.0 / 3.0));
}

double NlsSolver::resonance_step(std::size_t points_per_axis, double t) const {
  // Split-step resonance: a mode whose kinetic phase per step reaches pi is
  // amplified by the nonlinear step. tau is increasing, so dt / tau(t)^2
  // bounds the integrated coefficient over the step.
  const Grid& g = problem_.grid;
  const double tau = problem_.scaler()->tau(t);
  const double kmax = std::numbers::pi * static_cast<double>(points_per_axis) / g.box_length();
  return kResonanceFraction * 2 * std::numbers::pi * tau * tau / (g.dim() * kmax * kmax);
}

void NlsSolver::kinetic_flow(Field& f, double t0, double t1) {
  const Grid& g = problem_.grid;
  // Integrated kinetic coefficient c: multiplier exp(-i |k|^2 c / 2).
  const double c = problem_.rescaled() ? problem_.scaler()->inverse_square_integral(t0, t1) : t1 - t0;
  if (c != cached_half_) {
    const auto& k = g.wavenumbers();
    const std::size_t n = g.points_per_axis();
    std::vector<Complex> axis(n);
    for (std::size_t i = 0; i < n; ++i) axis[i] = std::polar(1.0, -0.5 * c * k[i] * k[i]);
    cached_propagator_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto idx = g.unravel(i);
      Complex w = axis[idx[0]];
      for (int j = 1; j < g.dim(); ++j) w *= axis[idx[j]];
      cached_propagator_[i] = w;
    }
    cached_half_ = c;
  }
  ws_.forward(f.values());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= cached_propagator_[i];
  ws_.inverse(f.values());
}

void NlsSolver::nonlinear_flow(Field& f, double dt) const {
  std::visit(overloaded{
                 [&](const PowerNonlinearity& p) {
                   for (auto& z : f.values())
                     z *= std::polar(1.0, -dt * p.lambda * std::pow(std::norm(z), p.sigma));
                 },
                 [&](const LogNonlinearity& p) {
                   for (auto& z : f.values())
                     z *= std::polar(1.0, -dt * p.lambda * std::log(p.regularization + std::norm(z)));
                 },
                 [&](const RescaledLogNonlinearity& p) {
                   // ln(eps + |v/gamma|^2) = ln(eps gamma^2 + |v|^2) + |y|^2: the potential
                   // tends to ln eps in the far field instead of growing like |y|^2.
                   const double far = std::log(p.regularization);
                   auto v = f.values();
                   for (std::size_t i = 0; i < v.size(); ++i) {
                     const double s = floor_[i] + std::norm(v[i]);
                     v[i] *= std::polar(1.0, -dt * p.lambda * (s > 0 ? std::log(s) + r2_[i] : far));
                   }
                 },
             },
             problem_.kind);
}

void NlsSolver::step_in_place(Field& f, double t, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(f.grid() == problem_.grid)) throw std::invalid_argument("field grid differs from problem grid");
  const double mid = t + 0.5 * dt;
  kinetic_flow(f, t, mid);
  nonlinear_flow(f, dt);
  kinetic_flow(f, mid, t + dt);
}

Field NlsSolver::step_strang(const Field& f, double t, double dt) {
  Field out = f;
  step_in_place(out, t, dt);
  if (!out.all_finite())
    throw NumericalError("split step produced non-finite values at t = " + std::to_string(t));
  return out;
}

Field step_strang(const NlsProblem& problem, const Field& f, double t, double dt) {
  NlsSolver solver(problem);
  return solver.step_strang(f, t, dt);
}

namespace {

struct Event {
  double t;
  bool record;
  bool snapshot;
};

std::vector<Event> schedule(double t0, double t_end, const EvolveOptions& o) {
  std::vector<Event> ev;
  const double span = t_end - t0;
  auto add_grid = [&](double interval, bool rec) {
    if (!(interval > 0)) return;
    const auto n = static_cast<long long>(std::floor(span / interval + 1e-9));
    for (long long i = 1; i <= n; ++i) ev.push_back({t0 + i * interval, rec, !rec});
  };
  add_grid(o.record_interval, true);
  add_grid(o.snapshot_interval, false);
  for (double t : o.record_times)
    if (t > t0 && t <= t_end) ev.push_back({t, true, false});
  ev.push_back({t_end, true, o.snapshot_interval > 0});
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  // Merge coincident events.
  std::vector<Event> merged;
  for (const auto& e : ev) {
    if (!merged.empty() && std::abs(merged.back().t - e.t) <= 1e-12 * std::max(1.0, std::abs(e.t))) {
      merged.back().record = merged.back().record || e.record;
      merged.back().snapshot = merged.back().snapshot || e.snapshot;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

}  // namespace

EvolveResult evolve(const NlsProblem& problem, const Field& f0, double t0, double t_end,
                    const EvolveOptions& options) {
  if (!(t_end >= t0)) throw std::invalid_argument("t_end precedes t0");
  std::optional<NlsSolver> solver(std::in_place, problem);
  if (!(f0.grid() == problem.grid)) throw std::invalid_argument("initial field grid differs from problem grid");
  if (problem.rescaled() && problem.scaler()->t_end() < t_end)
    throw std::invalid_argument("tau trajectory does not cover t_end");

  if (options.max_points != 0) {
    if (!problem.rescaled() || !problem.stepping.adaptive)
      throw std::invalid_argument("refinement needs adaptive rescaled stepping");
    if (options.max_points < problem.grid.points_per_axis())
      throw std::invalid_argument("max_points below the initial points per axis");
  }
  EvolveResult res{{}, {}, f0, t0, 0, false, kNaN, 0.0, {}};
  Field& f = res.final_field;
  const double lambda = problem.lambda();
  // Without the physical mass the rescaled run cannot reconstruct physical
  // energies; the reference mass ||gamma||^2 stands in and those fields are NaN.
  const bool known_mass = !std::isnan(options.initial_mass);
  const double mass0 =
      known_mass ? options.initial_mass : std::pow(std::numbers::pi, 0.5 * problem.grid.dim());
  auto make_record = [&](double t) {
    if (!problem.rescaled()) return physical_record(f, t, lambda, solver->workspace());
    auto r = rescaled_record(f, t, lambda, *problem.scaler(), mass0, solver->workspace());
    if (!known_mass) r.energy = r.physical_h1 = kNaN;
    return r;
  };
  auto check_boundary = [&](double t) {
    const double frac = boundary_mass_fraction(f, options.boundary_cells);
    res.max_boundary_fraction = std::max(res.max_boundary_fraction, frac);
    if (frac > options.breach_threshold && !res.boundary_breach) {
      res.boundary_breach = true;
      res.breach_time = t;
    }
  };
  auto maybe_refine = [&](double t) {
    const std::size_t n = f.grid().points_per_axis();
    if (2 * n > options.max_points) return;
    if (solver->resonance_step(2 * n, t) < solver->natural_step(t)) return;
    f = refine(f, 2 * n);
    NlsProblem p = solver->problem();
    p.grid = f.grid();
    solver.emplace(std::move(p));
    res.refinements.emplace_back(t, 2 * n);
  };
  auto emit = [&](double t) {
    res.records.push_back(make_record(t));
    if (options.observer) options.observer(res.records.back());
  };

  emit(t0);
  check_boundary(t0);
  if (options.snapshot_interval > 0) res.snapshots.emplace_back(t0, f);

  double t = t0;
  for (const Event& ev : schedule(t0, t_end, options)) {
    while (t < ev.t) {
      double dt = solver->step_size(t);
      bool land = false;
      if (t + dt >= ev.t - 1e-9 * dt) {
        dt = ev.t - t;
        land = true;
      }
      solver->step_in_place(f, t, dt);
      t = land ? ev.t : t + dt;
      ++res.steps;
      if (!f.all_finite())
        throw NumericalError("evolution produced non-finite values at t = " + std::to_string(t));
      if (res.steps % 16 == 0) check_boundary(t);
      maybe_refine(t);
      if (res.boundary_breach && options.stop_on_breach) break;
    }
    if (res.boundary_breach && options.stop_on_breach) break;
    check_boundary(t);
    if (ev.record) emit(t);
    if (ev.snapshot) res.snapshots.emplace_back(t, f);
  }
  res.t_final = t;
  return res;
}

}  // namespace lognls
