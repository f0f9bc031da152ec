#pragma once

#include <cstdint>
#include <vector>

#include "lognls/grid.hpp"
#include "lognls/solver.hpp"

namespace lognls {

// e^{i omega t} e^{d/2 - omega/(2 lambda)} e^{lambda |x - y0|^2}, boosted by
// `velocity`. Empty velocity/center vectors mean zero.
struct GaussonSpec {
  double omega = 0;
  double lambda = -1;
  std::vector<double> velocity;
  std::vector<double> center;
};

// Peak value e^{d/2 - omega/(2 lambda)} of the profile.
double gausson_amplitude(double omega, double lambda, int dim);
// ||phi_omega||^2 = e^{d - omega/lambda} (pi / (2|lambda|))^{d/2}.
double gausson_mass(double omega, double lambda, int dim);
// The unique omega with gausson_mass(omega) = mass.
double gausson_omega_for_mass(double mass, double lambda, int dim);

// Exact Gausson at time t; the boost follows the Galilean law, so each
// velocity component must be a multiple of 2 pi / L.
Field gausson(const GaussonSpec& spec, double t, const Grid& grid);

struct ModulatedDistance {
  double distance;               // min over theta, y of ||u - e^{i theta} phi(. - y)||_{H^1}
  double theta;
  std::vector<double> shift;
  bool converged;                // false: the refinement did not settle; best found returned
};
// Distance to the orbit of the standing profile phi_omega under phase
// rotations and translations, in the H^1 norm int (1 + |k|^2) |f^|^2.
ModulatedDistance modulated_distance(const Field& u, const GaussonSpec& spec);

// Sum of Gaussons; rejects two specs sharing both center and velocity.
Field multi_gausson(const std::vector<GaussonSpec>& specs, double t, const Grid& grid);

struct EstimateCheck {
  double lhs;
  double rhs;
  bool ok;
};
// |F(z) - F(z')| <= |z - z'| (6 - ln|z|^2), F(z) = z ln|z|^2, for
// 0 < |z| <= 1 and |z'| <= 1.
EstimateCheck nonlinearity_estimate_check(Complex z, Complex zp);
// |Im((F(z2) - F(z1)) conj(z2 - z1))| <= 4 |z2 - z1|^2 for all z1, z2.
EstimateCheck uniqueness_estimate_check(Complex z1, Complex z2);

struct AuditReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // max lhs / rhs over pairs with rhs > 0
};
// Random pairs from `seed`: half drawn independently, half as near-diagonal
// pairs z' = z + small perturbation, where the bounds are tightest.
AuditReport audit_nonlinearity_estimate(std::size_t pairs, std::uint64_t seed);
AuditReport audit_uniqueness_estimate(std::size_t pairs, std::uint64_t seed);

struct DistanceSeries {
  std::vector<double> t;
  std::vector<double> distance;
  double sup = 0;
  bool boundary_breach = false;
};

// Two Gaussons centered at -R and +R with velocities -v and +v. Deviation of
// the run from the sum of the exact individual Gaussons (the frozen sum when
// v = 0), sampled every record_interval.
struct SuperpositionSetup {
  double lambda = -1;
  double half_separation = 8;
  double velocity = 0;
  double t_end = 10;
  double dt = 1e-3;
  double record_interval = 0.5;
  double regularization = 1e-12;
};
DistanceSeries superposition_experiment(const SuperpositionSetup& setup, const Grid& grid);

// Modulated distance of a logarithmic-kind run to the orbit of `spec`,
// sampled every `interval`.
DistanceSeries orbital_distance_series(const NlsProblem& problem, const Field& u0,
                                       const GaussonSpec& spec, double t_end, double interval);

}  // namespace lognls
