#include <algorithm>
#include <cmath>
#include <numbers>

#include "lognls/diagnostics.hpp"
#include "lognls/rng.hpp"

namespace lognls {

BoundCheck ck_bound_check(const Density& rho, const Density& g) {
  if (!(rho.grid() == g.grid())) throw std::invalid_argument("densities live on different grids");
  const double mr = rho.integral(), mg = g.integral();
  if (std::abs(mr - mg) > 1e-8 * std::max({mr, mg, 1e-300}))
    throw std::invalid_argument("Csiszar-Kullback check needs equal masses");
  const double l1 = l1_distance(rho, g);
  long double rel = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i];
    if (r <= std::numeric_limits<double>::min()) continue;
    if (g[i] <= 0) {
      rel = std::numeric_limits<long double>::infinity();
      break;
    }
    rel += r * (std::log(r) - std::log(g[i]));
  }
  const double lhs = l1 * l1;
  const double rhs = 2 * mr * static_cast<double>(rel) * rho.grid().cell_volume();
  return {lhs, rhs, lhs <= rhs * (1 + 1e-9) || lhs == 0.0};
}

double w1_distance_1d(const Density& rho, const Density& g) {
  if (rho.grid().dim() != 1) throw std::invalid_argument("W1 distance is implemented for d = 1 only");
  if (!(rho.grid() == g.grid())) throw std::invalid_argument("densities live on different grids");
  const double mr = rho.integral(), mg = g.integral();
  if (!(mr > 0 && mg > 0)) throw std::invalid_argument("W1 needs positive masses");
  const double h = rho.grid().spacing();
  // Trapezoidal cumulative sums so F is sampled at the grid points.
  long double fr = 0, fg = 0, w = 0;
  double pr = 0, pg = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i] / mr, q = g[i] / mg;
    fr += 0.5 * h * (pr + r);
    fg += 0.5 * h * (pg + q);
    pr = r;
    pg = q;
    w += std::abs(fr - fg);
  }
  return static_cast<double>(w) * h;
}

FokkerPlanckTrajectory fokker_planck_reference(const Density& rho0, double s_end, double ds) {
  if (!(ds > 0) || ds > 1e-3) throw std::invalid_argument("Fokker-Planck step must lie in (0, 1e-3]");
  if (!(s_end >= 0)) throw std::invalid_argument("s_end must be nonnegative");
  const Grid& g = rho0.grid();
  const int d = g.dim();
  SpectralWorkspace ws(g);
  const auto& k2 = ws.k_squared();
  const double mass0 = rho0.integral();
  const Density target = normalized_gamma(g).scaled(mass0);

  std::vector<double> rho(rho0.values().begin(), rho0.values().end());
  std::vector<Complex> hat(g.size()), flux(g.size());
  FokkerPlanckTrajectory out;
  out.min_value = *std::min_element(rho.begin(), rho.end());

  auto record = [&](double s) {
    long double dist = 0, mass = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      dist += std::abs(rho[i] - target[i]);
      mass += rho[i];
    }
    out.s.push_back(s);
    out.l1_distance.push_back(static_cast<double>(dist) * g.cell_volume());
    out.mass.push_back(static_cast<double>(mass) * g.cell_volume());
  };
  record(0.0);

  const auto steps = static_cast<std::size_t>(std::ceil(s_end / ds - 1e-9));
  double s = 0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double h = std::min(ds, s_end - s);
    std::copy(rho.begin(), rho.end(), hat.begin());
    ws.forward(hat);
    for (int j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < rho.size(); ++i) flux[i] = 2 * g.point(i)[j] * rho[i];
      ws.forward(flux);
      const auto& kj = ws.k_axis(j);
      for (std::size_t i = 0; i < rho.size(); ++i) hat[i] += h * Complex(0, kj[i]) * flux[i];
    }
    for (std::size_t i = 0; i < rho.size(); ++i) hat[i] /= 1 + h * k2[i];
    ws.inverse(hat);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = hat[i].real();
    s = n + 1 == steps ? s_end : s + h;
    out.min_value = std::min(out.min_value, *std::min_element(rho.begin(), rho.end()));
    record(s);
  }
  out.negative_overshoot = out.min_value < -1e-10;
  out.final_values = std::move(rho);
  return out;
}

double fit_decay_rate(const FokkerPlanckTrajectory& traj, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < traj.s.size(); ++i) {
    const double dist = traj.l1_distance[i];
    if (dist < lo || dist > hi) continue;
    const double x = traj.s[i], y = std::log(dist);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("decay fit window holds fewer than two samples");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

GrowthBand growth_fit(std::span<const std::pair<double, double>> series, double s) {
  if (series.empty()) throw std::invalid_argument("growth fit needs samples");
  double tmin = series.front().first, tmax = tmin;
  for (const auto& [t, v] : series) {
    if (!(t > 1)) throw std::invalid_argument("growth fit needs t > 1");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (tmax < 100 * tmin) throw std::invalid_argument("growth fit needs t_max / t_min >= 100");
  GrowthBand band{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& [t, v] : series) {
    const double ratio = v / std::pow(std::log(t), 0.5 * s);
    band.c_low = std::min(band.c_low, ratio);
    band.c_high = std::max(band.c_high, ratio);
  }
  return band;
}

BoundCheck gn_dual_check(const Field& f, double eta, double alpha) {
  const Grid& g = f.grid();
  const int d = g.dim();
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  if (!(eta > 0 && eta < 4 * alpha / (d + 2 * alpha)))
    throw std::invalid_argument("eta must lie in (0, 4 alpha / (d + 2 alpha))");
  long double lhs = 0, l2 = 0, w2 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a2 = std::norm(f[i]);
    lhs += std::pow(a2, 0.5 * (2 - eta));
    l2 += a2;
    w2 += std::pow(g.radius_squared(i), alpha) * a2;
  }
  const double dv = g.cell_volume();
  const double norm = std::sqrt(static_cast<double>(l2) * dv);
  const double wnorm = std::sqrt(static_cast<double>(w2) * dv);
  const double p = 2 / eta;
  const double beta = alpha * (2 - eta);
  const double omega = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1);
  const double R = std::pow(wnorm / norm, 1 / alpha);
  const double inner = std::pow(omega * std::pow(R, d), 0.5 * eta) * std::pow(norm, 2 - eta);
  const double outer = std::pow(d * omega * std::pow(R, d - p * beta) / (p * beta - d), 0.5 * eta) *
                       std::pow(wnorm, 2 - eta);
  const double l = static_cast<double>(lhs) * dv;
  const double r = inner + outer;
  return {l, r, l <= r};
}

DualBoundAudit gn_dual_audit(std::size_t fields, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Grid g(1, 256, 40.0);
  const double q = g.wavenumber_quantum();
  DualBoundAudit rep;
  rep.fields = fields;
  for (std::size_t i = 0; i < fields; ++i) {
    std::array<Complex, 33> c;
    for (int m = 0; m < 33; ++m) c[m] = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / (1.0 + std::abs(m - 16));
    const double eta = rng.uniform(0.05, 1.3);
    const Field f = Field::sample(g, [&](const auto& x) {
      Complex sum = 0;
      for (int m = 0; m < 33; ++m) sum += c[m] * std::polar(1.0, (m - 16) * q * x[0]);
      return sum;
    });
    const auto chk = gn_dual_check(f, eta, 1.0);
    if (!chk.ok) ++rep.violations;
    if (chk.rhs > 0) rep.max_ratio = std::max(rep.max_ratio, chk.lhs / chk.rhs);
  }
  return rep;
}

}  // namespace lognls
