#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "lognls/gaussian.hpp"

namespace lognls {

WidthTrajectory::WidthTrajectory(double alpha0, double beta0, double lambda,
                                 DenseTrajectory<4> traj)
    : alpha0_(alpha0), beta0_(beta0), lambda_(lambda), traj_(std::move(traj)) {}

Complex WidthTrajectory::a(double t) const {
  const auto y = traj_.at(t);
  return {alpha0_ / (y[0] * y[0]), -y[1] / y[0]};
}

Complex WidthTrajectory::accumulated_a(double t) const {
  const auto y = traj_.at(t);
  return {y[2], -std::log(y[0])};
}

namespace {

double energy_residual_of(double r, double rdot, double a0, double b0, double lambda) {
  return rdot * rdot - (b0 * b0 + a0 * a0 - a0 * a0 / (r * r) + 4 * lambda * a0 * std::log(r));
}

}  // namespace

double WidthTrajectory::energy_residual(double t) const {
  const auto y = traj_.at(t);
  return energy_residual_of(y[0], y[1], alpha0_, beta0_, lambda_);
}

double WidthTrajectory::max_energy_residual() const {
  double m = 0;
  for (const auto& n : traj_.nodes())
    m = std::max(m, std::abs(energy_residual_of(n.y[0], n.y[1], alpha0_, beta0_, lambda_)));
  return m;
}

double WidthTrajectory::measured_period() const {
  const auto turns = turning_times();
  if (turns.size() < 3) return 0.0;
  const std::size_t last = (turns.size() - 1) / 2 * 2;
  return (turns[last] - turns[0]) / static_cast<double>(last / 2);
}

WidthTrajectory evolve_width(double alpha0, double beta0, double lambda, double t_end, double tol) {
  if (!(alpha0 > 0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const double a0 = alpha0;
  auto rhs = [a0, lambda](const std::array<double, 4>& y, double) {
    const double r = y[0];
    return std::array<double, 4>{y[1], a0 * a0 / (r * r * r) + 2 * lambda * a0 / r, a0 / (r * r),
                                 std::log(r)};
  };
  auto guard = [](const std::array<double, 4>& y, double t) {
    if (!(y[0] >= 1e-8))
      throw NumericalError("Gaussian width collapsed below 1e-8 at t = " + std::to_string(t));
  };
  // Local tolerance is tightened so the accumulated energy residual stays
  // within a small multiple of the requested tol.
  const double local = std::max(tol / 100, 1e-15);
  auto traj = integrate_dense<4>(rhs, {1.0, -beta0, 0.0, 0.0}, 0.0, t_end, local, local, guard);
  return WidthTrajectory(alpha0, beta0, lambda, std::move(traj));
}

Complex amplitude_b(const WidthTrajectory& w, Complex b0, double lambda, double t) {
  const auto y = w.dense().at(t);
  const double lnb = std::log(std::norm(b0));
  // -(i/2) A with A = re - i ln r contributes -(1/2) ln r to the modulus.
  const Complex expo(-0.5 * std::log(y[0]), -lambda * t * lnb - 0.5 * y[2] + lambda * y[3]);
  return b0 * std::exp(expo);
}

std::vector<std::pair<double, Complex>> amplitude_b(const WidthTrajectory& w, Complex b0,
                                                    double lambda) {
  std::vector<std::pair<double, Complex>> out;
  for (const auto& n : w.dense().nodes()) out.emplace_back(n.t, amplitude_b(w, b0, lambda, n.t));
  return out;
}

double potential_u(double r, double alpha0, double beta0, double lambda) {
  if (!(r > 0)) throw std::invalid_argument("r must be positive");
  if (!(lambda < 0)) throw std::invalid_argument("potential requires lambda < 0");
  return -0.5 * beta0 * beta0 - 0.5 * alpha0 * alpha0 * (1 - 1 / (r * r)) -
         2 * lambda * alpha0 * std::log(r);
}

PotentialMinimum potential_minimum(double alpha0, double beta0, double lambda) {
  if (!(lambda < 0)) throw std::invalid_argument("potential requires lambda < 0");
  if (!(alpha0 > 0)) throw std::invalid_argument("alpha0 must be positive");
  const double x = 2 * std::abs(lambda) / alpha0;
  return {std::sqrt(alpha0 / (2 * std::abs(lambda))),
          -0.5 * beta0 * beta0 + 0.5 * alpha0 * alpha0 * (x - 1 - x * std::log(x))};
}

BreatherPeriod breather_period(double alpha0, double beta0, double lambda) {
  const auto [rmin, umin] = potential_minimum(alpha0, beta0, lambda);
  const double scale = alpha0 * alpha0 + beta0 * beta0;
  BreatherPeriod out;
  // Trajectories have energy 0: rdot^2 / 2 + U(r) = 0.
  if (umin >= -1e-14 * scale) {
    out.stationary = true;
    out.r_low = out.r_high = rmin;
    return out;
  }
  auto U = [&](double r) { return potential_u(r, alpha0, beta0, lambda); };
  auto solve = [&](double lo, double hi) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        U, lo, hi, boost::math::tools::eps_tolerance<double>(53), iters);
    return 0.5 * (r.first + r.second);
  };
  double lo = rmin;
  while (U(lo) < 0) lo *= 0.5;
  double hi = rmin;
  while (U(hi) < 0) hi *= 2;
  const double r1 = solve(lo, rmin);
  const double r2 = solve(rmin, hi);
  const double span = r2 - r1;
  const double a2 = alpha0 * alpha0;
  const double la = 4 * lambda * alpha0;

  // r = r1 + span sin^2(theta). On each half -2U is factored about the nearer
  // root so the integrand stays smooth and cancellation-free.
  auto log_ratio = [](double d) { return d == 0 ? 1.0 : std::log1p(d) / d; };
  auto lower = [&](double th) {
    const double s = std::sin(th);
    const double r = r1 + span * s * s;
    const double g = a2 * (r + r1) / (r * r * r1 * r1) + la * log_ratio((r - r1) / r1) / r1;
    return 2 * std::sqrt(span) * std::cos(th) / std::sqrt(g);
  };
  auto upper = [&](double th) {
    const double c = std::cos(th);
    const double r = r2 - span * c * c;
    const double g = -a2 * (r + r2) / (r * r * r2 * r2) - la * log_ratio(-(r2 - r) / r2) / r2;
    return 2 * std::sqrt(span) * std::sin(th) / std::sqrt(g);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double q = std::numbers::pi / 4;
  const double half = GK::integrate(lower, 0.0, q, 15, 1e-15) + GK::integrate(upper, q, 2 * q, 15, 1e-15);
  out.period = 2 * half;
  out.r_low = r1;
  out.r_high = r2;
  return out;
}

}  // namespace lognls
