#include <cmath>
#include <stdexcept>

#include "lognls/solver.hpp"

namespace lognls {

namespace {

void require_velocity(const Grid& g, std::span<const double> v) {
  if (static_cast<int>(v.size()) != g.dim()) throw std::invalid_argument("velocity dimension differs from grid");
  for (double c : v)
    if (!g.admissible_wavenumber(c))
      throw std::invalid_argument("velocity components must be multiples of 2 pi / L");
}

}  // namespace

Field apply_galilean(const Field& f, std::span<const double> velocity) {
  const Grid& g = f.grid();
  require_velocity(g, velocity);
  Field out = f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    double phase = 0;
    for (int j = 0; j < g.dim(); ++j) phase += velocity[j] * x[j];
    out[i] *= std::polar(1.0, phase);
  }
  return out;
}

Field galilean_transform(const Field& u, std::span<const double> velocity, double t) {
  const Grid& g = u.grid();
  require_velocity(g, velocity);
  std::vector<double> shift(velocity.begin(), velocity.end());
  double v2 = 0;
  for (double& s : shift) {
    v2 += s * s;
    s *= t;
  }
  Field out = apply_galilean(translate_spectral(u, shift), velocity);
  out *= std::polar(1.0, -0.5 * v2 * t);
  return out;
}

Field apply_scaling(const Field& f, Complex k, double t, double lambda) {
  if (k == Complex(0)) throw std::invalid_argument("scaling constant must be nonzero");
  Field out = f;
  out *= k * std::polar(1.0, -t * lambda * std::log(std::norm(k)));
  return out;
}

namespace {

// Multiplies f by c exp(i chirp |x|^2 / 2).
void apply_chirp(Field& f, double c, double chirp, double phase) {
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    f[i] *= c * std::polar(1.0, 0.5 * chirp * g.radius_squared(i) + phase);
}

FrameMap finish(Field f) {
  const double hf = high_frequency_fraction(f, 0.9);
  return {std::move(f), hf, hf > 1e-10};
}

void check_frame(const Field& f, const TauScaler& scaler, double t, double initial_mass,
                 const Grid& target) {
  if (f.grid().dim() != target.dim()) throw std::invalid_argument("grid dimensions differ");
  if (!(initial_mass > 0)) throw std::invalid_argument("initial mass must be positive");
  if (!(t >= 0 && t <= scaler.t_end())) throw std::out_of_range("time outside tau trajectory");
}

}  // namespace

FrameMap to_rescaled_frame(const Field& u, const TauScaler& scaler, double t, double initial_mass,
                           const Grid& y_grid) {
  check_frame(u, scaler, t, initial_mass, y_grid);
  const int d = y_grid.dim();
  const double m = mass_ratio(initial_mass, d);
  const double tau = scaler.tau(t);
  Field v = resample_scaled(u, y_grid, tau);
  apply_chirp(v, std::pow(tau, 0.5 * d) / m, -scaler.tau_dot(t) * tau, -scaler.gauge_phase(t, d, m));
  return finish(std::move(v));
}

FrameMap from_rescaled_frame(const Field& v, const TauScaler& scaler, double t, double initial_mass,
                             const Grid& x_grid) {
  check_frame(v, scaler, t, initial_mass, x_grid);
  const int d = x_grid.dim();
  const double m = mass_ratio(initial_mass, d);
  const double tau = scaler.tau(t);
  Field u = resample_scaled(v, x_grid, 1.0 / tau);
  apply_chirp(u, m * std::pow(tau, -0.5 * d), scaler.tau_dot(t) / tau, scaler.gauge_phase(t, d, m));
  return finish(std::move(u));
}

}  // namespace lognls
