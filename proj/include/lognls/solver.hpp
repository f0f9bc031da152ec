#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lognls/diagnostics.hpp"
#include "lognls/gaussian.hpp"
#include "lognls/grid.hpp"

namespace lognls {

// i u_t + (1/2) Delta u = lambda |u|^{2 sigma} u.
struct PowerNonlinearity {
  double sigma;
  double lambda;
};

// i u_t + (1/2) Delta u = lambda ln(eps + |u|^2) u.
struct LogNonlinearity {
  double lambda;
  double regularization = 1e-10;
};

// i v_t + Delta v / (2 tau^2) = lambda v ln(eps + |v / gamma|^2), gamma = e^{-|y|^2 / 2}.
struct RescaledLogNonlinearity {
  double lambda;
  double regularization = 1e-10;
  std::shared_ptr<const TauScaler> scaler;
};

using Nonlinearity = std::variant<PowerNonlinearity, LogNonlinearity, RescaledLogNonlinearity>;

// With `adaptive` set (rescaled kind only) the step grows with the
// dispersion scale, dt_n = min(dt * tau(t_n)^{2/3}, dt_max), and is capped so
// that the kinetic phase |k|^2 dt_n / (2 tau^2) of every grid mode stays below
// kResonanceFraction * pi.
inline constexpr double kResonanceFraction = 0.8;
struct TimeStepping {
  double dt = 1e-3;
  bool adaptive = false;
  double dt_max = 0;
};

struct NlsProblem {
  Nonlinearity kind;
  Grid grid;
  TimeStepping stepping;

  // Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
  double lambda() const;
  bool rescaled() const { return std::holds_alternative<RescaledLogNonlinearity>(kind); }
  const TauScaler* scaler() const;
};

// Strang splitting: half kinetic step (exact in Fourier space), full
// nonlinear phase step (exact, modulus-preserving), half kinetic step.
// An instance owns its FFT workspace; use one instance per thread.
class NlsSolver {
 public:
  explicit NlsSolver(NlsProblem problem);

  const NlsProblem& problem() const { return problem_; }
  SpectralWorkspace& workspace() { return ws_; }

  // Returns the advanced field; throws NumericalError on non-finite output.
  Field step_strang(const Field& f, double t, double dt);
  // In-place variant; the field must not be shared with another thread.
  void step_in_place(Field& f, double t, double dt);
  // Kinetic flow alone over [t0, t1], in place.
  void kinetic_flow(Field& f, double t0, double t1);
  // Nonlinear phase flow alone over a duration dt, in place.
  void nonlinear_flow(Field& f, double dt) const;
  // Step size prescribed by the stepping rule at time t.
  double step_size(double t) const;
  // Adaptive rule: min(dt * tau(t)^{2/3}, dt_max) and, on a grid with the
  // given points per axis, the largest step keeping every kinetic phase per
  // step below kResonanceFraction * pi.
  double natural_step(double t) const;
  double resonance_step(std::size_t points_per_axis, double t) const;

 private:
  NlsProblem problem_;
  SpectralWorkspace ws_;
  std::vector<double> r2_;
  std::vector<double> floor_;  // eps gamma^2
  double cached_half_ = -1;
  std::vector<Complex> cached_propagator_;
};

Field step_strang(const NlsProblem& problem, const Field& f, double t, double dt);

struct EvolveOptions {
  // Records at every multiple of record_interval (0: only endpoints) and at
  // every explicit time in record_times. Steps are shortened to land on them.
  double record_interval = 0;
  std::vector<double> record_times;
  double snapshot_interval = 0;
  // ||u0||^2 of the physical datum; needed for rescaled-frame energies.
  double initial_mass = kNaN;
  bool stop_on_breach = false;
  double breach_threshold = 1e-8;
  std::size_t boundary_cells = 3;
  // Adaptive rescaled runs: points per axis are doubled, up to max_points
  // (0: never), as soon as the doubled grid admits the natural step without
  // resonance. The box is unchanged.
  std::size_t max_points = 0;
  std::function<void(const DiagnosticsRecord&)> observer;
};

struct EvolveResult {
  std::vector<DiagnosticsRecord> records;
  std::vector<std::pair<double, Field>> snapshots;
  Field final_field;
  double t_final = 0;
  std::size_t steps = 0;
  bool boundary_breach = false;
  double breach_time = kNaN;
  double max_boundary_fraction = 0;
  std::vector<std::pair<double, std::size_t>> refinements;  // (t, new points per axis)
};

EvolveResult evolve(const NlsProblem& problem, const Field& f0, double t0, double t_end,
                    const EvolveOptions& options = {});

// e^{i v.x} f(x); each component of v must be a multiple of 2 pi / L.
Field apply_galilean(const Field& f, std::span<const double> velocity);
// u(t, x - v t) e^{i v.x - i |v|^2 t / 2}: the boost of a solution at time t.
Field galilean_transform(const Field& u, std::span<const double> velocity, double t);
// k u e^{-i t lambda ln|k|^2}.
Field apply_scaling(const Field& f, Complex k, double t, double lambda);

struct FrameMap {
  Field field;
  double high_frequency_fraction = 0;
  bool aliasing = false;  // energy above 90% of Nyquist exceeds 1e-10
};

// v(t,y) = tau^{d/2} u(t, tau y) e^{-i tau' tau |y|^2 / 2 - i theta} / m.
FrameMap to_rescaled_frame(const Field& u, const TauScaler& scaler, double t,
                           double initial_mass, const Grid& y_grid);
FrameMap from_rescaled_frame(const Field& v, const TauScaler& scaler, double t,
                             double initial_mass, const Grid& x_grid);

// Flat little-endian complex64 samples in `<stem>.bin`, metadata as
// "key = value" lines in `<stem>.hdr`.
void write_snapshot(const std::string& stem, const Field& f, double t,
                    const std::map<std::string, std::string>& metadata = {});
struct Snapshot {
  Field field;
  double t;
  std::map<std::string, std::string> metadata;
};
Snapshot read_snapshot(const std::string& stem);

}  // namespace lognls
