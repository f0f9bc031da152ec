#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lognls/fluids.hpp"

namespace lognls {

namespace {

using State = std::array<double, FluidGaussianTrajectory::kState>;

double pressure_integral_of(const State& y, int d, const FluidGaussianParams& p) {
  if (p.gamma == 1) return p.mass;
  // int rho^gamma over the product Gaussian.
  double v = std::pow(p.mass, p.gamma) * std::pow(p.gamma, -0.5 * d);
  for (int j = 0; j < d; ++j) v *= std::pow(2 * std::numbers::pi * y[j], 0.5 * (1 - p.gamma));
  return v;
}

State rhs_of(const State& y, int d, const FluidGaussianParams& p) {
  State dy{};
  const double pi_int = pressure_integral_of(y, d, p);
  const double e2 = p.capillarity * p.capillarity;
  for (int j = 0; j < d; ++j) {
    const double b = y[j], w = y[3 + j];
    dy[j] = 2 * w * b;
    dy[3 + j] = -w * w + pi_int / (p.mass * b) + e2 / (4 * b * b) - p.viscosity * w / b;
  }
  return dy;
}

}  // namespace

FluidGaussianTrajectory::FluidGaussianTrajectory(int dim, FluidGaussianParams params,
                                                 DenseTrajectory<kState> traj)
    : dim_(dim), params_(params), traj_(std::move(traj)) {}

std::array<double, FluidGaussianTrajectory::kState> FluidGaussianTrajectory::rate(double t) const {
  return rhs_of(traj_.at(t), dim_, params_);
}

double FluidGaussianTrajectory::pressure_integral(double t) const {
  return pressure_integral_of(traj_.at(t), dim_, params_);
}

double FluidGaussianTrajectory::energy(double t) const {
  const auto y = traj_.at(t);
  const double m = params_.mass, e2 = params_.capillarity * params_.capillarity;
  double kinetic = 0, capillary = 0, log_det = 0;
  for (int j = 0; j < dim_; ++j) {
    kinetic += y[3 + j] * y[3 + j] * y[j];
    capillary += 1 / (4 * y[j]);
    log_det += std::log(2 * std::numbers::pi * y[j]);
  }
  const double internal = params_.gamma == 1 ? m * (std::log(m) - 0.5 * log_det - 0.5 * dim_)
                                             : pressure_integral_of(y, dim_, params_) / (params_.gamma - 1);
  return 0.5 * m * kinetic + 0.5 * e2 * m * capillary + internal;
}

double FluidGaussianTrajectory::dissipation(double t) const {
  const auto y = traj_.at(t);
  double s = 0;
  for (int j = 0; j < dim_; ++j) s += y[3 + j] * y[3 + j];
  return params_.viscosity * params_.mass * s;
}

FluidState FluidGaussianTrajectory::state(double t, const Grid& grid) const {
  if (grid.dim() != dim_) throw std::invalid_argument("grid dimension differs from ansatz");
  const auto y = traj_.at(t);
  std::vector<double> rho(grid.size());
  VectorField j(dim_, std::vector<double>(grid.size()));
  double norm = params_.mass;
  for (int a = 0; a < dim_; ++a) norm /= std::sqrt(2 * std::numbers::pi * y[a]);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    double e = 0;
    for (int a = 0; a < dim_; ++a) e -= x[a] * x[a] / (2 * y[a]);
    rho[i] = norm * std::exp(e);
    for (int a = 0; a < dim_; ++a) j[a][i] = rho[i] * y[3 + a] * x[a];
  }
  return {Density(grid, std::move(rho)), std::move(j), params_.capillarity, params_.viscosity, params_.gamma};
}

VectorField FluidGaussianTrajectory::velocity_field(double t, const Grid& grid) const {
  const auto y = traj_.at(t);
  VectorField u(dim_, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    for (int a = 0; a < dim_; ++a) u[a][i] = y[3 + a] * x[a];
  }
  return u;
}

std::pair<std::vector<double>, VectorField> FluidGaussianTrajectory::time_derivative(double t, const Grid& grid) const {
  const auto y = traj_.at(t);
  const auto dy = rhs_of(y, dim_, params_);
  const FluidState s = state(t, grid);
  std::vector<double> rho_t(grid.size());
  VectorField j_t(dim_, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    double log_rate = 0;
    for (int a = 0; a < dim_; ++a) log_rate += dy[a] * (x[a] * x[a] / (2 * y[a] * y[a]) - 1 / (2 * y[a]));
    const double r = s.rho[i];
    rho_t[i] = r * log_rate;
    for (int a = 0; a < dim_; ++a) j_t[a][i] = (rho_t[i] * y[3 + a] + r * dy[3 + a]) * x[a];
  }
  return {std::move(rho_t), std::move(j_t)};
}

FluidGaussianTrajectory fluid_gaussian_ode(std::span<const double> beta0, std::span<const double> omega0,
                                           const FluidGaussianParams& params, double t_end, double tol) {
  const int d = static_cast<int>(beta0.size());
  if (d < 1 || d > 3 || omega0.size() != beta0.size())
    throw std::invalid_argument("need 1 to 3 axes with matching beta and omega");
  if (!(params.mass > 0)) throw std::invalid_argument("mass must be positive");
  if (!(params.capillarity >= 0 && params.viscosity >= 0)) throw std::invalid_argument("eps and nu must be nonnegative");
  if (!(params.gamma >= 1)) throw std::invalid_argument("pressure exponent must be >= 1");
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  State y0{};
  for (int j = 0; j < 3; ++j) y0[j] = 1;
  for (int j = 0; j < d; ++j) {
    if (!(beta0[j] > 0)) throw std::invalid_argument("beta0 must be positive");
    y0[j] = beta0[j];
    y0[3 + j] = omega0[j];
  }
  auto rhs = [d, params](const State& y, double) { return rhs_of(y, d, params); };
  auto guard = [d](const State& y, double t) {
    for (int j = 0; j < d; ++j)
      if (!(y[j] >= 1e-10)) throw NumericalError("fluid ansatz variance collapsed at t = " + std::to_string(t));
  };
  auto traj = integrate_dense<FluidGaussianTrajectory::kState>(rhs, y0, 0.0, t_end, tol, tol, guard);
  return FluidGaussianTrajectory(d, params, std::move(traj));
}

}  // namespace lognls
