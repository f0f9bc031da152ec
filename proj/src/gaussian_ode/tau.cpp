#include <cmath>
#include <limits>

#include "lognls/gaussian.hpp"

namespace lognls {

TauScaler::TauScaler(TauMode mode, double parameter, DenseTrajectory<4> traj)
    : mode_(mode), parameter_(parameter), traj_(std::move(traj)) {}

double TauScaler::inverse_square_integral(double t0, double t1) const {
  return traj_.at(t1)[2] - traj_.at(t0)[2];
}

double TauScaler::gauge_phase(double t, int dim, double mass_ratio) const {
  if (mode_ != TauMode::logarithmic) throw std::logic_error("gauge phase needs logarithmic mode");
  const double lambda = parameter_;
  return lambda * dim * log_tau_integral(t) - 2 * lambda * t * std::log(mass_ratio);
}

double TauScaler::slow_time(double t) const {
  if (mode_ != TauMode::logarithmic) throw std::logic_error("slow time needs logarithmic mode");
  const double v = tau_dot(t);
  return v > 0 ? 0.5 * std::log(v) : -std::numeric_limits<double>::infinity();
}

namespace {

double residual(TauMode mode, double p, double tau, double tau_dot) {
  if (mode == TauMode::logarithmic) return tau_dot * tau_dot - 4 * p * std::log(tau);
  return tau_dot * tau_dot - (1 - std::pow(tau, -p));
}

}  // namespace

double TauScaler::first_integral_residual(double t) const {
  const auto y = traj_.at(t);
  return residual(mode_, parameter_, y[0], y[1]);
}

double TauScaler::max_first_integral_residual(double t_max) const {
  double m = 0;
  for (const auto& n : traj_.nodes()) {
    if (n.t > t_max) break;
    m = std::max(m, std::abs(residual(mode_, parameter_, n.y[0], n.y[1])));
  }
  return m;
}

std::vector<double> TauScaler::node_times() const {
  std::vector<double> out;
  for (const auto& n : traj_.nodes()) out.push_back(n.t);
  return out;
}

TauScaler solve_tau(TauMode mode, double parameter, double t_end, double tol) {
  if (!(parameter > 0))
    throw std::invalid_argument(mode == TauMode::logarithmic ? "tau: lambda must be positive"
                                                             : "tau: alpha must be positive");
  if (!(t_end >= 0)) throw std::invalid_argument("tau: t_end must be nonnegative");
  const double p = parameter;
  auto rhs = [mode, p](const std::array<double, 4>& y, double) {
    const double tau = y[0];
    const double acc = mode == TauMode::logarithmic ? 2 * p / tau : 0.5 * p * std::pow(tau, -1 - p);
    return std::array<double, 4>{y[1], acc, 1 / (tau * tau), std::log(tau)};
  };
  auto guard = [](const std::array<double, 4>& y, double t) {
    if (!(y[0] >= 1.0 - 1e-12) || !std::isfinite(y[0]))
      throw NumericalError("tau left [1, inf) at t = " + std::to_string(t));
  };
  return TauScaler(mode, parameter,
                   integrate_dense<4>(rhs, {1.0, 0.0, 0.0, 0.0}, 0.0, t_end, tol, tol, guard));
}

}  // namespace lognls
