#include <cmath>
#include <numbers>

#include "lognls/gaussian.hpp"

namespace lognls {

GaussianSolution::GaussianSolution(std::vector<GaussianAxis> axes, Complex b0, double lambda,
                                   double t_end, double tol)
    : axes_(std::move(axes)), b0_(b0), lambda_(lambda) {
  if (axes_.empty() || axes_.size() > 3) throw std::invalid_argument("Gaussian needs 1 to 3 axes");
  if (b0 == Complex(0, 0)) throw std::invalid_argument("Gaussian amplitude must be nonzero");
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    std::shared_ptr<const WidthTrajectory> w;
    for (std::size_t i = 0; i < j; ++i)
      if (axes_[i].alpha0 == axes_[j].alpha0 && axes_[i].beta0 == axes_[j].beta0) w = widths_[i];
    if (!w)
      w = std::make_shared<const WidthTrajectory>(
          evolve_width(axes_[j].alpha0, axes_[j].beta0, lambda, t_end, tol));
    widths_.push_back(std::move(w));
  }
}

double GaussianSolution::t_end() const {
  double t = widths_[0]->t_end();
  for (const auto& w : widths_) t = std::min(t, w->t_end());
  return t;
}

Complex GaussianSolution::amplitude(double t) const {
  // Per-axis factors multiply; the ln|b0|^2 phase is counted once.
  Complex expo(0, -lambda_ * t * std::log(std::norm(b0_)));
  for (const auto& w : widths_) {
    const auto y = w->dense().at(t);
    expo += Complex(-0.5 * std::log(y[0]), -0.5 * y[2] + lambda_ * y[3]);
  }
  return b0_ * std::exp(expo);
}

GaussianState GaussianSolution::state(double t) const {
  GaussianState s{{}, amplitude(t), lambda_, {}};
  for (const auto& w : widths_) {
    s.a.push_back(w->a(t));
    s.accumulated_a.push_back(w->accumulated_a(t));
  }
  return s;
}

double GaussianSolution::mass() const {
  double m = std::norm(b0_);
  for (const auto& ax : axes_) m *= std::sqrt(std::numbers::pi / ax.alpha0);
  return m;
}

double GaussianSolution::h1_seminorm(double t) const {
  const auto s = state(t);
  const double sqpi = std::sqrt(std::numbers::pi);
  double total = 0;
  for (int j = 0; j < dim(); ++j) {
    const double alpha = s.a[j].real();
    double term = std::norm(s.a[j]) * sqpi / (2 * std::pow(alpha, 1.5));
    for (int i = 0; i < dim(); ++i)
      if (i != j) term *= std::sqrt(std::numbers::pi / s.a[i].real());
    total += term;
  }
  return std::sqrt(std::norm(s.b) * total);
}

Field GaussianSolution::field(double t, const Grid& grid) const {
  if (grid.dim() != dim()) throw std::invalid_argument("grid dimension differs from Gaussian");
  if (!(t >= 0 && t <= t_end())) throw std::out_of_range("time outside Gaussian trajectory");
  const auto s = state(t);
  return Field::sample(grid, [&](const auto& x) {
    Complex e = 0;
    for (int j = 0; j < dim(); ++j) e -= 0.5 * s.a[j] * x[j] * x[j];
    return s.b * std::exp(e);
  });
}

Field GaussianSolution::rescaled_field(double t, const Grid& grid, const TauScaler& scaler) const {
  if (grid.dim() != dim()) throw std::invalid_argument("grid dimension differs from Gaussian");
  if (!(t >= 0 && t <= t_end())) throw std::out_of_range("time outside Gaussian trajectory");
  const int d = dim();
  const double m = std::sqrt(mass() / std::pow(std::numbers::pi, 0.5 * d));
  const double tau = scaler.tau(t), tdot = scaler.tau_dot(t);

  // Quadratic coefficient a tau^2 - i tau' tau, formed per axis from r, rdot
  // so that the chirp difference rdot/r - tau'/tau is taken before scaling.
  std::vector<Complex> q(d);
  Complex expo(std::log(std::abs(b0_)) + 0.5 * d * std::log(tau) - std::log(m),
               std::arg(b0_) - lambda_ * t * std::log(std::norm(b0_)) -
                   scaler.gauge_phase(t, d, m));
  for (int j = 0; j < d; ++j) {
    const auto y = widths_[j]->dense().at(t);
    const double r = y[0], rdot = y[1];
    q[j] = Complex(axes_[j].alpha0 * tau * tau / (r * r), -tau * tau * (rdot / r - tdot / tau));
    expo += Complex(-0.5 * std::log(r), -0.5 * y[2] + lambda_ * y[3]);
  }
  return Field::sample(grid, [&](const auto& x) {
    Complex e = expo;
    for (int j = 0; j < d; ++j) e -= 0.5 * q[j] * x[j] * x[j];
    return std::exp(e);
  });
}

Field gaussian_field(const GaussianSolution& sol, double t, const Grid& grid) {
  return sol.field(t, grid);
}

}  // namespace lognls
