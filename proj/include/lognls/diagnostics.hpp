#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lognls/gaussian.hpp"
#include "lognls/grid.hpp"

namespace lognls {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One time sample of a run. In the physical frame the pseudo-energy fields
// and distances to Gamma are NaN; in the rescaled frame `kinetic` is the
// pseudo-kinetic part ||grad v||^2 / (2 tau^2) and `energy` is the physical
// energy reconstructed through the change of variables.
struct DiagnosticsRecord {
  double t = 0;
  double mass = 0;
  std::vector<double> momentum;
  std::vector<double> center;
  double variance = 0;
  double a_moment = 0;
  double kinetic = 0;
  double entropy = 0;  // int |f|^2 ln |f|^2
  double pseudo_energy = kNaN;
  double pseudo_kinetic = kNaN;
  double pseudo_entropy = kNaN;
  double energy = kNaN;
  double hs_half = 0;
  double hs_one = 0;
  double l1_to_gamma = kNaN;
  double w1_to_gamma = kNaN;
  // Physical ||grad u||, also reconstructed in the rescaled frame.
  double physical_h1 = kNaN;
};

// x ln x with the continuous extension 0 at x = 0.
double xlogx(double x);

struct PseudoEnergy {
  double total;
  double kinetic;
  double entropy;
};
// E_kin = ||grad v||^2 / (2 tau^2), E_ent = int |v|^2 ln|v|^2 + |y|^2 |v|^2,
// total = E_kin + lambda E_ent.
PseudoEnergy pseudo_energy(const Field& v, const TauScaler& scaler, double t, double lambda);
PseudoEnergy pseudo_energy(const Field& v, const TauScaler& scaler, double t, double lambda,
                           SpectralWorkspace& ws);

// E = ||grad u||^2 / 2 + lambda int |u|^2 ln |u|^2.
double log_energy(const Field& u, double lambda);

DiagnosticsRecord physical_record(const Field& u, double t, double lambda,
                                  SpectralWorkspace& ws);
// `initial_mass` is ||u0||^2 of the physical datum.
DiagnosticsRecord rescaled_record(const Field& v, double t, double lambda,
                                  const TauScaler& scaler, double initial_mass,
                                  SpectralWorkspace& ws);

// m = ||u0|| / ||gamma|| with ||gamma||^2 = pi^{d/2}.
double mass_ratio(double initial_mass, int dim);

// Normalized Gamma = e^{-|y|^2} / pi^{d/2} on a grid.
Density normalized_gamma(const Grid& grid);
double l1_distance(const Density& a, const Density& b);

struct CenterOfMassReport {
  double max_deviation = 0;         // max_t |tau I2 - I2(0) - I1(0) t|
  double max_scaled_deviation = 0;  // same divided by (1 + t)
  std::size_t samples = 0;
};
// Checks tau(t) I2(t) = I2(0) + I1(0) t componentwise.
CenterOfMassReport center_of_mass_check(std::span<const DiagnosticsRecord> series,
                                        const TauScaler& scaler, double lambda);

struct BoundCheck {
  double lhs;
  double rhs;
  bool ok;
};
// Csiszar-Kullback: ||rho - g||_1^2 <= 2 ||rho||_1 int rho ln(rho/g).
BoundCheck ck_bound_check(const Density& rho, const Density& g);

// int |F_rho - F_g| in one dimension, both normalized to unit mass.
double w1_distance_1d(const Density& rho, const Density& g);

struct FokkerPlanckTrajectory {
  std::vector<double> s;
  std::vector<double> l1_distance;  // to the equal-mass equilibrium
  std::vector<double> mass;
  std::vector<double> final_values;
  double min_value = 0;
  bool negative_overshoot = false;  // some sample below -1e-10
};
// IMEX Euler for d_s rho = Delta rho + div(2 y rho): diffusion implicit
// through its Fourier symbol, drift explicit.
FokkerPlanckTrajectory fokker_planck_reference(const Density& rho0, double s_end, double ds);

// Least-squares decay exponent of the L1 distance over samples whose
// distance lies in [lo, hi].
double fit_decay_rate(const FokkerPlanckTrajectory& traj, double lo = 1e-8, double hi = 1e-2);

struct GrowthBand {
  double c_low;
  double c_high;
};
// Band of ||u(t)||_{H^s} / (ln t)^{s/2} over (t, norm) samples; requires
// t_max / t_min >= 100 and t > 1.
GrowthBand growth_fit(std::span<const std::pair<double, double>> series, double s);

// Both sides of the weighted Gagliardo-Nirenberg bound
//   int |u|^{2-eta} <= (w_d R^d)^{eta/2} ||u||^{2-eta}
//                     + (d w_d R^{d-p'b} / (p'b - d))^{eta/2} || |x|^alpha u ||^{2-eta}
// with p' = 2/eta, b = alpha (2 - eta) and R^alpha = || |x|^alpha u || / ||u||.
BoundCheck gn_dual_check(const Field& f, double eta, double alpha);

struct DualBoundAudit {
  std::size_t fields = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // max lhs / rhs
};
// gn_dual_check with alpha = 1 on random band-limited fields of a 1D box
// (256 points, L = 40, modes |m| <= 16 with 1/(1 + |m|) decay) and random
// eta in [0.05, 1.3].
DualBoundAudit gn_dual_audit(std::size_t fields, std::uint64_t seed);

// Supremum over the series of M + V + |int |v|^2 ln|v|^2| + E_kin.
double apv_supremum(std::span<const DiagnosticsRecord> series);

// Header and rows in the fixed column order
// t, M, I1_1..I1_d, I2_1..I2_d, V, A, Ekin, Sent, PseudoE, E, Hs05, Hs1, L1dist, W1dist.
void write_csv_header(std::ostream& out, int dim);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);
void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> series, int dim);
// "%.17g" formatting shared by every CSV writer.
std::string format_real(double x);

}  // namespace lognls
