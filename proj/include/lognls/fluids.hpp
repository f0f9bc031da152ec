#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "lognls/gaussian.hpp"
#include "lognls/grid.hpp"
#include "lognls/ode.hpp"

namespace lognls {

// One real sample array per axis.
using VectorField = std::vector<std::vector<double>>;

// Density and momentum J = rho u. J vanishes wherever rho does.
struct FluidState {
  Density rho;
  VectorField momentum;
  double capillarity = 0;  // epsilon of the Korteweg term
  double viscosity = 0;    // nu of the quantum Navier-Stokes term
  double gamma = 1;        // pressure exponent, P = rho^gamma
};

// rho = |u|^2, J = Im(conj(u) grad u), spectrally.
FluidState madelung(const Field& u);

// Power nonlinearity matching the polytropic pressure rho^gamma under the
// Madelung transform: lambda = gamma / (gamma - 1), sigma = (gamma - 1) / 2.
struct PowerCorrespondence {
  double lambda;
  double sigma;
};
PowerCorrespondence power_correspondence(double gamma);
// Inverse map; requires sigma > 0.
double gamma_from_sigma(double sigma);

// u = J / rho where rho exceeds `floor` times its maximum, 0 elsewhere.
VectorField velocity(const FluidState& s, double floor = 1e-14);

// Gaussian ansatz rho = m prod_j (2 pi beta_j)^{-1/2} e^{-x_j^2 / (2 beta_j)},
// u_j = omega_j x_j. Per axis
//   beta_j' = 2 omega_j beta_j,
//   omega_j' = -omega_j^2 + Pi / (m beta_j) + eps^2 / (4 beta_j^2) - nu omega_j / beta_j,
// with Pi = int P(rho). For P = rho, Pi = m and the ansatz solves the PDE
// exactly; for P = rho^gamma the pressure force is not affine and the
// pressure term is its projection onto affine velocity fields (virial
// closure), which keeps the energy identity exact.
struct FluidGaussianParams {
  double mass = 1;
  double capillarity = 0;
  double viscosity = 0;
  double gamma = 1;  // 1: isothermal
};

class FluidGaussianTrajectory {
 public:
  static constexpr std::size_t kState = 6;  // beta_1..3, omega_1..3

  FluidGaussianTrajectory(int dim, FluidGaussianParams params, DenseTrajectory<kState> traj);

  int dim() const { return dim_; }
  const FluidGaussianParams& params() const { return params_; }
  double t_end() const { return traj_.t_end(); }
  double beta(double t, int axis) const { return traj_.at(t)[axis]; }
  double omega(double t, int axis) const { return traj_.at(t)[3 + axis]; }

  // d/dt (beta, omega) at time t, from the ODE right-hand side.
  std::array<double, kState> rate(double t) const;

  // Closed forms over the ansatz.
  double pressure_integral(double t) const;  // int P(rho)
  double energy(double t) const;             // kinetic + capillary + internal
  double dissipation(double t) const;        // nu int rho |D u|^2

  FluidState state(double t, const Grid& grid) const;
  VectorField velocity_field(double t, const Grid& grid) const;
  // Samples of rho_t and J_t, by the chain rule through (beta, omega)'.
  std::pair<std::vector<double>, VectorField> time_derivative(double t, const Grid& grid) const;

  const DenseTrajectory<kState>& dense() const { return traj_; }

 private:
  int dim_;
  FluidGaussianParams params_;
  DenseTrajectory<kState> traj_;
};

// Throws NumericalError if some beta falls below 1e-10.
FluidGaussianTrajectory fluid_gaussian_ode(std::span<const double> beta0,
                                           std::span<const double> omega0,
                                           const FluidGaussianParams& params, double t_end,
                                           double tol = 1e-12);

// Pointwise residuals of
//   rho_t + div J = 0,
//   J_t + div(J u) + grad P = (eps^2/2) rho grad(Delta sqrt(rho) / sqrt(rho)) + nu div(rho D u),
// given rho, J, their time derivatives and P, by spectral differentiation.
struct FluidResidual {
  double continuity;  // max over the grid
  double momentum;    // max over the grid and components
  double scale;       // max magnitude of the individual momentum terms
};
FluidResidual fluid_pde_residual(const FluidState& s, std::span<const double> rho_t, const VectorField& j_t);
FluidResidual fluid_pde_residual(const FluidGaussianTrajectory& traj, double t, const Grid& grid);

// E = (1/2) int rho |u|^2 + (eps^2/2) int |grad sqrt(rho)|^2 + int rho ln rho
// (or int rho^gamma / (gamma - 1)), and the rate nu int rho |D u|^2.
struct PhysicalFluidEnergy {
  double energy;
  double dissipation;
};
PhysicalFluidEnergy physical_fluid_energy(const FluidState& s);

// (rho, J) to (R, RU) and back:
//   rho(x) = R(x/tau) / tau^d * ||rho0||_1 / ||Gamma||_1,
//   u(x) = U(x/tau) / tau + (tau'/tau) x.
// The tau scaler must be logarithmic with parameter 1 (pressure rho).
struct FluidFrameMap {
  FluidState state;
  bool aliasing = false;
};
FluidFrameMap rescale_fluid(const FluidState& s, const TauScaler& scaler, double t, double mass_ref,
                            const Grid& y_grid);
FluidFrameMap unrescale_fluid(const FluidState& s, const TauScaler& scaler, double t,
                              double mass_ref, const Grid& x_grid);

// Pseudo-energy, its dissipation, BD entropy and BD dissipation of (R, U)
// together with the integrals they are built from. Log-derivative integrands
// vanish where R < 1e-14 max R.
struct FluidEnergies {
  double energy = 0;          // pseudo-energy
  double dissipation = 0;
  double bd_entropy = 0;
  double bd_dissipation = 0;
  double mass = 0;            // int R
  double kinetic = 0;         // int R |U|^2
  double capillary = 0;       // int |grad sqrt R|^2
  double entropy = 0;         // int R |y|^2 + R ln R
  double symmetric = 0;       // int R |D U|^2
  double skew = 0;            // int R |A U|^2
  double log_hessian = 0;     // int R |grad^2 log R|^2
  double divergence = 0;      // int R div U
  double effective = 0;       // int R |U + nu grad log R|^2
  // Right sides of the balances:
  //   d/dt energy = -dissipation - divergence_source,
  //   d/dt bd_entropy = -bd_dissipation + bd_source.
  double divergence_source = 0;  // nu tau' / tau^3 int R div U
  double bd_source = 0;          // nu 2d / tau^2 int R + nu tau'/tau^3 int R div U
};
// The capillary-viscous term of the BD dissipation is nu eps^2 / (4 tau^4)
// int R |grad^2 log R|^2; with that weight the BD balance closes exactly for
// the Korteweg term (eps^2/2) rho grad(Delta sqrt(rho)/sqrt(rho)).
FluidEnergies fluid_energies(const Density& R, const VectorField& U, const TauScaler& scaler, double t,
                             double capillarity, double viscosity);

// Gaussian ansatz in the rescaled frame: R with variance beta_j / tau^2 per
// axis and mass ||Gamma||_1 = pi^{d/2}; U_j = tau (omega_j tau - tau') y_j.
Density rescaled_density(const FluidGaussianTrajectory& traj, double t, const TauScaler& scaler,
                         const Grid& grid);
VectorField rescaled_velocity(const FluidGaussianTrajectory& traj, double t, const TauScaler& scaler,
                              const Grid& grid);

struct FluidRecord {
  double t = 0;
  std::vector<double> beta;
  std::vector<double> omega;
  FluidEnergies energies;
  std::vector<double> moment1;  // int y R / int R
  double moment2 = 0;           // int |y|^2 R / int R
};
std::vector<FluidRecord> fluid_series(const FluidGaussianTrajectory& traj, const TauScaler& scaler,
                                      const Grid& grid, std::span<const double> times);

// Hypotheses and conclusions of the long-time rigidity statement evaluated
// along a series: running integral of the dissipation, supremum of the
// pseudo-energy, first and second moments of R / int R against 0 and d/2.
struct RigidityReport {
  double dissipation_integral = 0;
  double sup_energy = 0;
  double max_energy_plus_dissipation = 0;  // max_t energy(t) + int_0^t dissipation
  double max_first_moment = 0;
  double initial_second_moment_gap = 0;
  double final_second_moment_gap = 0;
  bool second_moment_monotone = false;  // |moment2 - d/2| nonincreasing over the whole series
  // Earliest sample time after which |moment2 - d/2| is nonincreasing. Generic
  // data overshoot d/2 once before the slow approach, so this is positive.
  double monotone_from = 0;
  double final_density_gap = 0;         // max |R/int R - Gamma/int Gamma| at the last sample
};
RigidityReport rigidity_checks(std::span<const FluidRecord> series, int dim, const Grid& grid,
                               const FluidGaussianTrajectory& traj, const TauScaler& scaler);

// Columns t, beta, omega, E, D, EBD, DBD, moment1, moment2; in d > 1 the
// per-axis columns are suffixed _1.._d. E is the pseudo-energy.
void write_fluid_csv_header(std::ostream& out, int dim);
void write_fluid_csv_row(std::ostream& out, const FluidRecord& r);

// L1 norm of rho_t + div J for a Schrodinger run, with rho_t by the central
// difference (|u_after|^2 - |u_before|^2) / (2h) and J from u_mid.
double continuity_residual_l1(const Field& before, const Field& mid, const Field& after, double h);

}  // namespace lognls
