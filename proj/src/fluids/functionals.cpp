#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lognls/diagnostics.hpp"
#include "lognls/fluids.hpp"

namespace lognls {

namespace {

constexpr double kVacuumFloor = 1e-14;

std::vector<double> sqrt_of(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(v[i]);
  return out;
}

double integral_of(const std::vector<double>& v, const Grid& g) { return integrate(v, g); }

void require_vector_field(const VectorField& v, const Grid& g) {
  if (static_cast<int>(v.size()) != g.dim()) throw std::invalid_argument("vector field dimension differs from grid");
  for (const auto& c : v)
    if (c.size() != g.size()) throw std::invalid_argument("vector field size differs from grid");
}

// R d_k U_j = d_k (R U_j) - U_j d_k R, which stays periodic when U is affine.
std::vector<std::vector<std::vector<double>>> weighted_gradient(const std::vector<double>& R,
                                                                const std::vector<std::vector<double>>& dR,
                                                                const VectorField& U, SpectralWorkspace& ws) {
  const int d = static_cast<int>(U.size());
  std::vector<std::vector<std::vector<double>>> G(d, std::vector<std::vector<double>>(d));
  for (int j = 0; j < d; ++j) {
    std::vector<double> ru(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) ru[i] = R[i] * U[j][i];
    for (int k = 0; k < d; ++k) {
      auto dk = derivative_real(ru, k, ws);
      for (std::size_t i = 0; i < R.size(); ++i) dk[i] -= U[j][i] * dR[k][i];
      G[k][j] = std::move(dk);  // G[k][j] = R d_k U_j
    }
  }
  return G;
}

void check_scaler(const TauScaler& scaler) {
  if (scaler.mode() != TauMode::logarithmic || scaler.parameter() != 1.0)
    throw std::invalid_argument("fluid rescaling needs the logarithmic tau with parameter 1");
}

}  // namespace

FluidState madelung(const Field& u) {
  const Grid& g = u.grid();
  SpectralWorkspace ws(g);
  const auto grad = gradient_spectral(u, ws);
  VectorField j(g.dim(), std::vector<double>(g.size()));
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t i = 0; i < g.size(); ++i) j[a][i] = std::imag(std::conj(u[i]) * grad[a][i]);
  return {modulus_squared(u), std::move(j), 0, 0, 1};
}

PowerCorrespondence power_correspondence(double gamma) {
  if (!(gamma > 1)) throw std::invalid_argument("power correspondence needs gamma > 1");
  return {gamma / (gamma - 1), 0.5 * (gamma - 1)};
}

double gamma_from_sigma(double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be positive");
  return 2 * sigma + 1;
}

VectorField velocity(const FluidState& s, double floor) {
  const Grid& g = s.rho.grid();
  require_vector_field(s.momentum, g);
  const double cut = floor * s.rho.max();
  VectorField u(g.dim(), std::vector<double>(g.size(), 0.0));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (s.rho[i] > cut)
      for (int a = 0; a < g.dim(); ++a) u[a][i] = s.momentum[a][i] / s.rho[i];
  return u;
}

FluidResidual fluid_pde_residual(const FluidState& s, std::span<const double> rho_t, const VectorField& j_t) {
  const Grid& g = s.rho.grid();
  const int d = g.dim();
  require_vector_field(s.momentum, g);
  require_vector_field(j_t, g);
  if (rho_t.size() != g.size()) throw std::invalid_argument("rho_t size differs from grid");
  SpectralWorkspace ws(g);
  const std::vector<double> rho(s.rho.values().begin(), s.rho.values().end());
  const auto u = velocity(s);
  FluidResidual out{0, 0, 0};

  std::vector<double> cont(rho_t.begin(), rho_t.end());
  for (int a = 0; a < d; ++a) {
    const auto dj = derivative_real(s.momentum[a], a, ws);
    for (std::size_t i = 0; i < g.size(); ++i) cont[i] += dj[i];
  }
  for (double c : cont) out.continuity = std::max(out.continuity, std::abs(c));

  std::vector<std::vector<double>> drho(d), dsq(d);
  const auto sq = sqrt_of(rho);
  for (int k = 0; k < d; ++k) {
    drho[k] = derivative_real(rho, k, ws);
    dsq[k] = derivative_real(sq, k, ws);
  }
  std::vector<double> lap(g.size(), 0.0);
  for (int k = 0; k < d; ++k) {
    const auto dd = derivative_real(drho[k], k, ws);
    for (std::size_t i = 0; i < g.size(); ++i) lap[i] += dd[i];
  }
  std::vector<double> pressure(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) pressure[i] = s.gamma == 1 ? rho[i] : std::pow(rho[i], s.gamma);
  const auto G = weighted_gradient(rho, drho, u, ws);
  const double e2 = s.capillarity * s.capillarity;

  for (int a = 0; a < d; ++a) {
    std::vector<double> transport(g.size(), 0.0), bohm(g.size(), 0.0), visc(g.size(), 0.0);
    for (int k = 0; k < d; ++k) {
      std::vector<double> flux(g.size()), tensor(g.size()), strain(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        flux[i] = s.momentum[a][i] * u[k][i];
        tensor[i] = dsq[a][i] * dsq[k][i];
        strain[i] = 0.5 * (G[k][a][i] + G[a][k][i]);  // rho (D u)_{ak}
      }
      const auto df = derivative_real(flux, k, ws);
      const auto dt = derivative_real(tensor, k, ws);
      const auto ds = derivative_real(strain, k, ws);
      for (std::size_t i = 0; i < g.size(); ++i) {
        transport[i] += df[i];
        bohm[i] -= 2 * dt[i];
        visc[i] += ds[i];
      }
    }
    // rho grad(Delta sqrt(rho) / sqrt(rho)) = (1/2) grad Delta rho - 2 div(grad sqrt(rho) (x) grad sqrt(rho)).
    const auto dlap = derivative_real(lap, a, ws);
    const auto dp = derivative_real(pressure, a, ws);
    for (std::size_t i = 0; i < g.size(); ++i) {
      bohm[i] = 0.5 * e2 * (bohm[i] + 0.5 * dlap[i]);
      visc[i] *= s.viscosity;
      const double r = j_t[a][i] + transport[i] + dp[i] - bohm[i] - visc[i];
      out.momentum = std::max(out.momentum, std::abs(r));
      out.scale = std::max({out.scale, std::abs(j_t[a][i]), std::abs(transport[i]), std::abs(dp[i]),
                            std::abs(bohm[i]), std::abs(visc[i])});
    }
  }
  return out;
}

FluidResidual fluid_pde_residual(const FluidGaussianTrajectory& traj, double t, const Grid& grid) {
  const auto [rho_t, j_t] = traj.time_derivative(t, grid);
  return fluid_pde_residual(traj.state(t, grid), rho_t, j_t);
}

PhysicalFluidEnergy physical_fluid_energy(const FluidState& s) {
  const Grid& g = s.rho.grid();
  const int d = g.dim();
  SpectralWorkspace ws(g);
  const std::vector<double> rho(s.rho.values().begin(), s.rho.values().end());
  const auto u = velocity(s);
  const double cut = kVacuumFloor * s.rho.max();
  std::vector<double> kinetic(g.size(), 0.0), capillary(g.size(), 0.0), internal(g.size()), strain(g.size(), 0.0);
  const auto sq = sqrt_of(rho);
  std::vector<std::vector<double>> drho(d);
  for (int k = 0; k < d; ++k) {
    drho[k] = derivative_real(rho, k, ws);
    const auto ds = derivative_real(sq, k, ws);
    for (std::size_t i = 0; i < g.size(); ++i) capillary[i] += ds[i] * ds[i];
  }
  const auto G = weighted_gradient(rho, drho, u, ws);
  for (std::size_t i = 0; i < g.size(); ++i) {
    internal[i] = s.gamma == 1 ? xlogx(rho[i]) : std::pow(rho[i], s.gamma) / (s.gamma - 1);
    if (rho[i] <= cut) continue;
    for (int a = 0; a < d; ++a) {
      kinetic[i] += s.momentum[a][i] * u[a][i];
      for (int k = 0; k < d; ++k) {
        const double e = 0.5 * (G[k][a][i] + G[a][k][i]);
        strain[i] += e * e / rho[i];
      }
    }
  }
  const double e2 = s.capillarity * s.capillarity;
  return {0.5 * integral_of(kinetic, g) + 0.5 * e2 * integral_of(capillary, g) + integral_of(internal, g),
          s.viscosity * integral_of(strain, g)};
}

namespace {

FluidFrameMap map_frame(const FluidState& s, const TauScaler& scaler, double t, double mass_ref,
                        const Grid& target, bool forward) {
  check_scaler(scaler);
  const Grid& g = s.rho.grid();
  const int d = g.dim();
  if (target.dim() != d) throw std::invalid_argument("grid dimensions differ");
  require_vector_field(s.momentum, g);
  if (!(mass_ref > 0)) throw std::invalid_argument("reference mass must be positive");
  if (!(t >= 0 && t <= scaler.t_end())) throw std::out_of_range("time outside tau trajectory");
  const double tau = scaler.tau(t), tdot = scaler.tau_dot(t);
  const double c = std::pow(std::numbers::pi, 0.5 * d) / mass_ref;
  const double scale = forward ? tau : 1 / tau;

  auto resample = [&](std::span<const double> v, bool& alias) {
    Field f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = v[i];
    Field r = resample_scaled(f, target, scale);
    alias = alias || high_frequency_fraction(r, 0.9) > 1e-10;
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i].real();
    return out;
  };
  bool alias = false;
  auto rho = resample(s.rho.values(), alias);
  VectorField j(d);
  for (int a = 0; a < d; ++a) j[a] = resample(s.momentum[a], alias);

  // Forward: R = c tau^d rho(tau y), RU = c tau^d (tau J(tau y) - tau' tau y rho(tau y)).
  // Inverse: rho = R(x/tau) / (c tau^d), J = (RU(x/tau) / tau + (tau'/tau) x R(x/tau)) / (c tau^d).
  const double amp = forward ? c * std::pow(tau, d) : 1 / (c * std::pow(tau, d));
  const double jmul = forward ? tau : 1 / tau;
  const double chirp = forward ? -tdot * tau : tdot / tau;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto y = target.point(i);
    for (int a = 0; a < d; ++a) j[a][i] = amp * (jmul * j[a][i] + chirp * y[a] * rho[i]);
    // Interpolation ringing may dip below zero by rounding; densities stay nonnegative.
    rho[i] = std::max(0.0, amp * rho[i]);
  }
  return {{Density(target, std::move(rho)), std::move(j), s.capillarity, s.viscosity, s.gamma}, alias};
}

}  // namespace

FluidFrameMap rescale_fluid(const FluidState& s, const TauScaler& scaler, double t, double mass_ref,
                            const Grid& y_grid) {
  return map_frame(s, scaler, t, mass_ref, y_grid, true);
}

FluidFrameMap unrescale_fluid(const FluidState& s, const TauScaler& scaler, double t, double mass_ref,
                              const Grid& x_grid) {
  return map_frame(s, scaler, t, mass_ref, x_grid, false);
}

FluidEnergies fluid_energies(const Density& Rd, const VectorField& U, const TauScaler& scaler, double t,
                             double capillarity, double viscosity) {
  check_scaler(scaler);
  const Grid& g = Rd.grid();
  const int d = g.dim();
  require_vector_field(U, g);
  if (!(capillarity >= 0 && viscosity >= 0)) throw std::invalid_argument("eps and nu must be nonnegative");
  SpectralWorkspace ws(g);
  const std::vector<double> R(Rd.values().begin(), Rd.values().end());
  const double cut = kVacuumFloor * Rd.max();
  const double tau = scaler.tau(t), tdot = scaler.tau_dot(t), nu = viscosity;
  const double e2 = capillarity * capillarity;

  std::vector<std::vector<double>> dR(d), dsq(d);
  const auto sq = sqrt_of(R);
  for (int k = 0; k < d; ++k) {
    dR[k] = derivative_real(R, k, ws);
    dsq[k] = derivative_real(sq, k, ws);
  }
  std::vector<std::vector<std::vector<double>>> hess(d, std::vector<std::vector<double>>(d));
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) hess[j][k] = derivative_real(dR[j], k, ws);
  const auto G = weighted_gradient(R, dR, U, ws);

  std::vector<double> kin(g.size(), 0.0), cap(g.size(), 0.0), ent(g.size()), sym(g.size(), 0.0),
      skw(g.size(), 0.0), lh(g.size(), 0.0), div(g.size(), 0.0), eff(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto y = g.point(i);
    double r2 = 0;
    for (int a = 0; a < d; ++a) {
      r2 += y[a] * y[a];
      cap[i] += dsq[a][i] * dsq[a][i];
      div[i] += G[a][a][i];
    }
    ent[i] = R[i] * r2 + xlogx(R[i]);
    if (R[i] <= cut) continue;
    for (int a = 0; a < d; ++a) {
      kin[i] += R[i] * U[a][i] * U[a][i];
      const double e = R[i] * U[a][i] + nu * dR[a][i];
      eff[i] += e * e / R[i];
      for (int b = 0; b < d; ++b) {
        const double s = 0.5 * (G[b][a][i] + G[a][b][i]);
        const double w = 0.5 * (G[b][a][i] - G[a][b][i]);
        sym[i] += s * s / R[i];
        skw[i] += w * w / R[i];
        const double h = (a <= b ? hess[a][b][i] : hess[b][a][i]) - dR[a][i] * dR[b][i] / R[i];
        lh[i] += h * h / R[i];
      }
    }
  }
  FluidEnergies f;
  f.mass = integrate(R, g);
  f.kinetic = integrate(kin, g);
  f.capillary = integrate(cap, g);
  f.entropy = integrate(ent, g);
  f.symmetric = integrate(sym, g);
  f.skew = integrate(skw, g);
  f.log_hessian = integrate(lh, g);
  f.divergence = integrate(div, g);
  f.effective = integrate(eff, g);

  const double t2 = tau * tau, t3 = t2 * tau, t4 = t2 * t2;
  f.energy = f.kinetic / (2 * t2) + e2 * f.capillary / (2 * t2) + f.entropy;
  f.dissipation = tdot / t3 * (f.kinetic + e2 * f.capillary) + nu / t4 * f.symmetric;
  f.bd_entropy = (f.effective + e2 * f.capillary) / (2 * t2) + f.entropy;
  f.bd_dissipation = tdot / t3 * (f.kinetic + e2 * f.capillary) + nu / t4 * f.skew +
                     nu * e2 / (4 * t4) * f.log_hessian + 4 * nu / t2 * f.capillary;
  f.divergence_source = nu * tdot / t3 * f.divergence;
  f.bd_source = nu * 2 * d / t2 * f.mass + f.divergence_source;
  return f;
}

Density rescaled_density(const FluidGaussianTrajectory& traj, double t, const TauScaler& scaler,
                         const Grid& grid) {
  check_scaler(scaler);
  const int d = traj.dim();
  if (grid.dim() != d) throw std::invalid_argument("grid dimension differs from ansatz");
  const double tau = scaler.tau(t);
  std::vector<double> b(d);
  double norm = std::pow(std::numbers::pi, 0.5 * d);
  for (int a = 0; a < d; ++a) {
    b[a] = traj.beta(t, a) / (tau * tau);
    norm /= std::sqrt(2 * std::numbers::pi * b[a]);
  }
  return Density::sample(grid, [&](const auto& y) {
    double e = 0;
    for (int a = 0; a < d; ++a) e -= y[a] * y[a] / (2 * b[a]);
    return norm * std::exp(e);
  });
}

VectorField rescaled_velocity(const FluidGaussianTrajectory& traj, double t, const TauScaler& scaler,
                              const Grid& grid) {
  check_scaler(scaler);
  const int d = traj.dim();
  const double tau = scaler.tau(t), tdot = scaler.tau_dot(t);
  VectorField U(d, std::vector<double>(grid.size()));
  for (int a = 0; a < d; ++a) {
    const double slope = tau * (traj.omega(t, a) * tau - tdot);
    for (std::size_t i = 0; i < grid.size(); ++i) U[a][i] = slope * grid.point(i)[a];
  }
  return U;
}

std::vector<FluidRecord> fluid_series(const FluidGaussianTrajectory& traj, const TauScaler& scaler,
                                      const Grid& grid, std::span<const double> times) {
  const int d = traj.dim();
  const auto& p = traj.params();
  std::vector<FluidRecord> out;
  for (double t : times) {
    FluidRecord r;
    r.t = t;
    for (int a = 0; a < d; ++a) {
      r.beta.push_back(traj.beta(t, a));
      r.omega.push_back(traj.omega(t, a));
    }
    const Density R = rescaled_density(traj, t, scaler, grid);
    r.energies = fluid_energies(R, rescaled_velocity(traj, t, scaler, grid), scaler, t, p.capillarity, p.viscosity);
    std::vector<double> m1(grid.size()), m2(grid.size(), 0.0);
    for (int a = 0; a < d; ++a) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double y = grid.point(i)[a];
        m1[i] = y * R[i];
        m2[i] += y * y * R[i];
      }
      r.moment1.push_back(integrate(m1, grid) / r.energies.mass);
    }
    r.moment2 = integrate(m2, grid) / r.energies.mass;
    out.push_back(std::move(r));
  }
  return out;
}

RigidityReport rigidity_checks(std::span<const FluidRecord> series, int dim, const Grid& grid,
                               const FluidGaussianTrajectory& traj, const TauScaler& scaler) {
  if (series.empty()) throw std::invalid_argument("empty fluid series");
  RigidityReport rep;
  const double target = 0.5 * dim;
  rep.second_moment_monotone = true;
  rep.sup_energy = rep.max_energy_plus_dissipation = -std::numeric_limits<double>::infinity();
  rep.initial_second_moment_gap = std::abs(series.front().moment2 - target);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series[i];
    if (i > 0) {
      const auto& q = series[i - 1];
      rep.dissipation_integral += 0.5 * (r.t - q.t) * (r.energies.dissipation + q.energies.dissipation);
      if (std::abs(r.moment2 - target) > std::abs(q.moment2 - target)) rep.second_moment_monotone = false;
    }
    rep.sup_energy = std::max(rep.sup_energy, r.energies.energy);
    rep.max_energy_plus_dissipation =
        std::max(rep.max_energy_plus_dissipation, r.energies.energy + rep.dissipation_integral);
    for (double m : r.moment1) rep.max_first_moment = std::max(rep.max_first_moment, std::abs(m));
  }
  rep.final_second_moment_gap = std::abs(series.back().moment2 - target);
  std::size_t k = series.size() - 1;
  while (k > 0 && std::abs(series[k - 1].moment2 - target) >= std::abs(series[k].moment2 - target)) --k;
  rep.monotone_from = series[k].t;
  const Density R = rescaled_density(traj, series.back().t, scaler, grid);
  const Density gamma = normalized_gamma(grid);
  const double mass = R.integral();
  for (std::size_t i = 0; i < grid.size(); ++i)
    rep.final_density_gap = std::max(rep.final_density_gap, std::abs(R[i] / mass - gamma[i]));
  return rep;
}

void write_fluid_csv_header(std::ostream& out, int dim) {
  auto axis_cols = [&](const char* name) {
    if (dim == 1) {
      out << ',' << name;
      return;
    }
    for (int a = 1; a <= dim; ++a) out << ',' << name << '_' << a;
  };
  out << 't';
  axis_cols("beta");
  axis_cols("omega");
  out << ",E,D,EBD,DBD";
  axis_cols("moment1");
  out << ",moment2\n";
}

void write_fluid_csv_row(std::ostream& out, const FluidRecord& r) {
  out << format_real(r.t);
  for (double b : r.beta) out << ',' << format_real(b);
  for (double w : r.omega) out << ',' << format_real(w);
  out << ',' << format_real(r.energies.energy) << ',' << format_real(r.energies.dissipation) << ','
      << format_real(r.energies.bd_entropy) << ',' << format_real(r.energies.bd_dissipation);
  for (double m : r.moment1) out << ',' << format_real(m);
  out << ',' << format_real(r.moment2) << '\n';
}

double continuity_residual_l1(const Field& before, const Field& mid, const Field& after, double h) {
  if (!(h > 0)) throw std::invalid_argument("h must be positive");
  const Grid& g = mid.grid();
  const FluidState s = madelung(mid);
  SpectralWorkspace ws(g);
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = (std::norm(after[i]) - std::norm(before[i])) / (2 * h);
  for (int a = 0; a < g.dim(); ++a) {
    const auto dj = derivative_real(s.momentum[a], a, ws);
    for (std::size_t i = 0; i < g.size(); ++i) r[i] += dj[i];
  }
  for (double& x : r) x = std::abs(x);
  return integrate(r, g);
}

}  // namespace lognls
