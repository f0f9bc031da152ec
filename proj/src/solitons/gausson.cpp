#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lognls/solitons.hpp"

namespace lognls {

namespace {

void require_lambda(double lambda) {
  if (!(lambda < 0)) throw std::invalid_argument("Gaussons need lambda < 0");
}

std::vector<double> component_vector(const std::vector<double>& v, int dim, const char* what) {
  if (v.empty()) return std::vector<double>(dim, 0.0);
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument(std::string(what) + " dimension differs from grid");
  return v;
}

}  // namespace

double gausson_amplitude(double omega, double lambda, int dim) {
  require_lambda(lambda);
  return std::exp(0.5 * dim - omega / (2 * lambda));
}

double gausson_mass(double omega, double lambda, int dim) {
  require_lambda(lambda);
  return std::exp(dim - omega / lambda) * std::pow(std::numbers::pi / (2 * std::abs(lambda)), 0.5 * dim);
}

double gausson_omega_for_mass(double mass, double lambda, int dim) {
  require_lambda(lambda);
  if (!(mass > 0)) throw std::invalid_argument("mass must be positive");
  // ln M = d - omega/lambda + (d/2) ln(pi / (2|lambda|)) is affine in omega.
  return lambda * (dim + 0.5 * dim * std::log(std::numbers::pi / (2 * std::abs(lambda))) - std::log(mass));
}

Field gausson(const GaussonSpec& spec, double t, const Grid& grid) {
  const int d = grid.dim();
  const auto v = component_vector(spec.velocity, d, "velocity");
  const auto y0 = component_vector(spec.center, d, "center");
  for (double c : v)
    if (!grid.admissible_wavenumber(c))
      throw std::invalid_argument("velocity components must be multiples of 2 pi / L");
  const double amp = gausson_amplitude(spec.omega, spec.lambda, d);
  double v2 = 0;
  for (double c : v) v2 += c * c;
  const double time_phase = spec.omega * t - 0.5 * v2 * t;
  return Field::sample(grid, [&](const auto& x) {
    double r2 = 0, phase = time_phase;
    for (int j = 0; j < d; ++j) {
      const double s = x[j] - y0[j] - v[j] * t;
      r2 += s * s;
      phase += v[j] * x[j];
    }
    return std::polar(amp * std::exp(spec.lambda * r2), phase);
  });
}

Field multi_gausson(const std::vector<GaussonSpec>& specs, double t, const Grid& grid) {
  if (specs.empty()) throw std::invalid_argument("no Gaussons given");
  const int d = grid.dim();
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j)
      if (component_vector(specs[i].center, d, "center") == component_vector(specs[j].center, d, "center") &&
          component_vector(specs[i].velocity, d, "velocity") ==
              component_vector(specs[j].velocity, d, "velocity"))
        throw std::invalid_argument("Gaussons must differ in center or velocity");
  Field sum = gausson(specs[0], t, grid);
  for (std::size_t i = 1; i < specs.size(); ++i) sum += gausson(specs[i], t, grid);
  return sum;
}

}  // namespace lognls
