#include <cmath>
#include <cstdio>
#include <numbers>

#include "lognls/diagnostics.hpp"

namespace lognls {

double xlogx(double x) { return x > std::numeric_limits<double>::min() ? x * std::log(x) : 0.0; }

namespace {

double entropy_integral(const Field& f) {
  long double s = 0;
  for (const auto& z : f.values()) s += xlogx(std::norm(z));
  return static_cast<double>(s) * f.grid().cell_volume();
}

}  // namespace

PseudoEnergy pseudo_energy(const Field& v, const TauScaler& scaler, double t, double lambda) {
  SpectralWorkspace ws(v.grid());
  return pseudo_energy(v, scaler, t, lambda, ws);
}

PseudoEnergy pseudo_energy(const Field& v, const TauScaler& scaler, double t, double lambda,
                           SpectralWorkspace& ws) {
  const double tau = scaler.tau(t);
  const double h1 = hs_norm(v, 1.0, ws);
  const double kin = h1 * h1 / (2 * tau * tau);
  const Grid& g = v.grid();
  long double ent = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rho = std::norm(v[i]);
    ent += xlogx(rho) + g.radius_squared(i) * rho;
  }
  const double e = static_cast<double>(ent) * g.cell_volume();
  return {kin + lambda * e, kin, e};
}

double log_energy(const Field& u, double lambda) {
  const double h1 = hs_norm(u, 1.0);
  return 0.5 * h1 * h1 + lambda * entropy_integral(u);
}

DiagnosticsRecord physical_record(const Field& u, double t, double lambda, SpectralWorkspace& ws) {
  const auto m = moments(u, ws);
  DiagnosticsRecord r;
  r.t = t;
  r.mass = m.mass;
  r.momentum = m.momentum;
  r.center = m.center;
  r.variance = m.variance;
  r.a_moment = m.a_moment;
  r.hs_half = hs_norm(u, 0.5, ws);
  r.hs_one = hs_norm(u, 1.0, ws);
  r.kinetic = 0.5 * r.hs_one * r.hs_one;
  r.entropy = entropy_integral(u);
  r.energy = r.kinetic + lambda * r.entropy;
  r.physical_h1 = r.hs_one;
  return r;
}

Density normalized_gamma(const Grid& grid) {
  const double norm = std::pow(std::numbers::pi, -0.5 * grid.dim());
  return Density::sample(grid, [&](const auto& y) {
    return norm * std::exp(-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]));
  });
}

double l1_distance(const Density& a, const Density& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("densities live on different grids");
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return static_cast<double>(s) * a.grid().cell_volume();
}

double mass_ratio(double initial_mass, int dim) {
  if (!(initial_mass > 0)) throw std::invalid_argument("initial mass must be positive");
  return std::sqrt(initial_mass / std::pow(std::numbers::pi, 0.5 * dim));
}

DiagnosticsRecord rescaled_record(const Field& v, double t, double lambda, const TauScaler& scaler,
                                  double initial_mass, SpectralWorkspace& ws) {
  const auto m = moments(v, ws);
  const int d = v.grid().dim();
  DiagnosticsRecord r;
  r.t = t;
  r.mass = m.mass;
  r.momentum = m.momentum;
  r.center = m.center;
  r.variance = m.variance;
  r.a_moment = m.a_moment;
  r.hs_half = hs_norm(v, 0.5, ws);
  r.hs_one = hs_norm(v, 1.0, ws);
  const auto pe = pseudo_energy(v, scaler, t, lambda, ws);
  r.pseudo_energy = pe.total;
  r.pseudo_kinetic = pe.kinetic;
  r.pseudo_entropy = pe.entropy;
  r.kinetic = pe.kinetic;
  r.entropy = entropy_integral(v);

  // u = m tau^{-d/2} v(x/tau) e^{i tau'|x|^2/(2 tau) + i theta}.
  const double tau = scaler.tau(t), tdot = scaler.tau_dot(t);
  const double mr = mass_ratio(initial_mass, d);
  const double m2 = mr * mr;
  const double grad2 = r.hs_one * r.hs_one / (tau * tau) + tdot * tdot * m.variance -
                       2 * (tdot / tau) * m.a_moment;
  r.physical_h1 = std::sqrt(std::max(0.0, m2 * grad2));
  r.energy = m2 * (0.5 * grad2 + lambda * r.entropy +
                   lambda * (std::log(m2) - d * std::log(tau)) * m.mass);

  if (m.mass > 0) {
    const Density rho = modulus_squared(v).scaled(1.0 / m.mass);
    const Density gam = normalized_gamma(v.grid());
    r.l1_to_gamma = l1_distance(rho, gam);
    if (d == 1) r.w1_to_gamma = w1_distance_1d(rho, gam);
  }
  return r;
}

CenterOfMassReport center_of_mass_check(std::span<const DiagnosticsRecord> series,
                                        const TauScaler& scaler, double) {
  CenterOfMassReport rep;
  if (series.empty()) return rep;
  // tau I2 is affine in t with slope tau' I2 + I1 / tau.
  const auto& first = series.front();
  const double tau0 = scaler.tau(first.t), tdot0 = scaler.tau_dot(first.t);
  for (const auto& r : series) {
    const double tau = scaler.tau(r.t);
    for (std::size_t j = 0; j < r.center.size(); ++j) {
      const double slope = tdot0 * first.center[j] + first.momentum[j] / tau0;
      const double predicted = tau0 * first.center[j] + slope * (r.t - first.t);
      const double dev = std::abs(tau * r.center[j] - predicted);
      rep.max_deviation = std::max(rep.max_deviation, dev);
      rep.max_scaled_deviation = std::max(rep.max_scaled_deviation, dev / (1 + r.t));
    }
    ++rep.samples;
  }
  return rep;
}

double apv_supremum(std::span<const DiagnosticsRecord> series) {
  double s = 0;
  for (const auto& r : series) {
    const double kin = std::isnan(r.pseudo_kinetic) ? r.kinetic : r.pseudo_kinetic;
    s = std::max(s, r.mass + r.variance + std::abs(r.entropy) + kin);
  }
  return s;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv_header(std::ostream& out, int dim) {
  out << "t,M";
  for (int j = 1; j <= dim; ++j) out << ",I1_" << j;
  for (int j = 1; j <= dim; ++j) out << ",I2_" << j;
  out << ",V,A,Ekin,Sent,PseudoE,E,Hs05,Hs1,L1dist,W1dist\n";
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  out << format_real(r.t) << ',' << format_real(r.mass);
  for (double x : r.momentum) out << ',' << format_real(x);
  for (double x : r.center) out << ',' << format_real(x);
  for (double x : {r.variance, r.a_moment, r.kinetic, r.entropy, r.pseudo_energy, r.energy,
                   r.hs_half, r.hs_one, r.l1_to_gamma, r.w1_to_gamma})
    out << ',' << format_real(x);
  out << '\n';
}

void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> series, int dim) {
  write_csv_header(out, dim);
  for (const auto& r : series) write_csv_row(out, r);
}

}  // namespace lognls
