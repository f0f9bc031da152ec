#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "lognls/grid.hpp"
#include "lognls/ode.hpp"

namespace lognls {

// Width dynamics of one Gaussian axis, a(t) = alpha0/r^2 - i rdot/r, from
//   r'' = alpha0^2/r^3 + 2 lambda alpha0/r,  r(0) = 1,  r'(0) = -beta0.
// The state also carries int_0^t alpha0/r^2 and int_0^t ln r, so that
// A(t) = int_0^t a = re_integral - i ln r is exact along the trajectory.
class WidthTrajectory {
 public:
  WidthTrajectory(double alpha0, double beta0, double lambda, DenseTrajectory<4> traj);

  double alpha0() const { return alpha0_; }
  double beta0() const { return beta0_; }
  double lambda() const { return lambda_; }
  double t_end() const { return traj_.t_end(); }

  double r(double t) const { return traj_.at(t)[0]; }
  double rdot(double t) const { return traj_.at(t)[1]; }
  Complex a(double t) const;
  Complex accumulated_a(double t) const;
  double log_r_integral(double t) const { return traj_.at(t)[3]; }

  // rdot^2 - (beta0^2 + alpha0^2 - alpha0^2/r^2 + 4 lambda alpha0 ln r).
  double energy_residual(double t) const;
  double max_energy_residual() const;
  // Zero crossings of rdot in (0, t_end].
  std::vector<double> turning_times() const { return traj_.sign_changes(1); }
  // Mean period from every other turning time; 0 when fewer than three.
  double measured_period() const;

  const DenseTrajectory<4>& dense() const { return traj_; }

 private:
  double alpha0_, beta0_, lambda_;
  DenseTrajectory<4> traj_;
};

// Throws NumericalError if r falls below 1e-8.
WidthTrajectory evolve_width(double alpha0, double beta0, double lambda, double t_end,
                             double tol = 1e-12);

// b(t) for a single axis (or total amplitude when called per axis with the
// combined formula in GaussianSolution):
//   b = b0 exp(-i lambda t ln|b0|^2 - (i/2) A(t) - i lambda int_0^t Im A).
Complex amplitude_b(const WidthTrajectory& w, Complex b0, double lambda, double t);

// Samples of (t, b(t)) at every integrator node.
std::vector<std::pair<double, Complex>> amplitude_b(const WidthTrajectory& w, Complex b0,
                                                    double lambda);

double potential_u(double r, double alpha0, double beta0, double lambda);

struct PotentialMinimum {
  double r_min;
  double u_min;
};
PotentialMinimum potential_minimum(double alpha0, double beta0, double lambda);

struct BreatherPeriod {
  double period = 0;  // 0 when stationary
  bool stationary = false;
  double r_low = 1, r_high = 1;
};
// Full period 2 int_{r_low}^{r_high} dr / sqrt(-2 U(r)) for lambda < 0.
BreatherPeriod breather_period(double alpha0, double beta0, double lambda);

enum class TauMode { logarithmic, polytropic };

// tau'' = 2 lambda / tau (logarithmic) or alpha / (2 tau^{1+alpha})
// (polytropic), tau(0) = 1, tau'(0) = 0.
class TauScaler {
 public:
  TauScaler(TauMode mode, double parameter, DenseTrajectory<4> traj);

  TauMode mode() const { return mode_; }
  double parameter() const { return parameter_; }
  double t_end() const { return traj_.t_end(); }

  double tau(double t) const { return traj_.at(t)[0]; }
  double tau_dot(double t) const { return traj_.at(t)[1]; }
  // int_{t0}^{t1} ds / tau(s)^2.
  double inverse_square_integral(double t0, double t1) const;
  // int_0^t ln tau.
  double log_tau_integral(double t) const { return traj_.at(t)[3]; }
  // Phase removed by the rescaled frame:
  //   theta = lambda d int_0^t ln tau - 2 lambda t ln(mass_ratio).
  double gauge_phase(double t, int dim, double mass_ratio) const;
  // s = (1/2) ln tau_dot, logarithmic mode only.
  double slow_time(double t) const;

  double first_integral_residual(double t) const;
  // Max over integrator nodes in [0, t_max].
  double max_first_integral_residual(double t_max) const;
  std::vector<double> node_times() const;

 private:
  TauMode mode_;
  double parameter_;
  DenseTrajectory<4> traj_;
};

TauScaler solve_tau(TauMode mode, double parameter, double t_end, double tol = 1e-13);

struct GaussianAxis {
  double alpha0;
  double beta0;
};

struct GaussianState {
  std::vector<Complex> a;
  Complex b;
  double lambda;
  std::vector<Complex> accumulated_a;
};

// Exact Gaussian solution b(t) prod_j exp(-a_j(t) x_j^2 / 2).
class GaussianSolution {
 public:
  GaussianSolution(std::vector<GaussianAxis> axes, Complex b0, double lambda, double t_end,
                   double tol = 1e-12);

  int dim() const { return static_cast<int>(axes_.size()); }
  double lambda() const { return lambda_; }
  Complex b0() const { return b0_; }
  double t_end() const;
  const WidthTrajectory& axis(int j) const { return *widths_[j]; }

  GaussianState state(double t) const;
  Complex amplitude(double t) const;
  double mass() const;
  // ||grad u(t)||_{L2} in closed form.
  double h1_seminorm(double t) const;

  Field field(double t, const Grid& grid) const;
  // The same solution seen in the rescaled frame,
  //   v(t,y) = tau^{d/2} u(t, tau y) e^{-i tau' tau |y|^2/2 - i theta} / m,
  // with m = ||u0|| / ||gamma||.
  Field rescaled_field(double t, const Grid& grid, const TauScaler& scaler) const;

 private:
  std::vector<GaussianAxis> axes_;
  Complex b0_;
  double lambda_;
  std::vector<std::shared_ptr<const WidthTrajectory>> widths_;
};

Field gaussian_field(const GaussianSolution& sol, double t, const Grid& grid);

}  // namespace lognls
