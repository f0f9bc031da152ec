#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lognls {

using Complex = std::complex<double>;

// Raised when a numerical run leaves its domain of validity (NaN, collapse,
// truncation). Precondition violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Periodic box [-L/2, L/2)^d sampled with n points per axis.
class Grid {
 public:
  Grid(int dim, std::size_t points_per_axis, double box_length);

  int dim() const { return dim_; }
  std::size_t points_per_axis() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  double cell_volume() const;
  std::size_t size() const { return size_; }

  // Sample coordinate along any axis: -L/2 + i h.
  double coordinate(std::size_t i) const { return axis_[i]; }
  const std::vector<double>& axis() const { return axis_; }
  // Wavenumbers in FFT order, (2pi/L) * {0, 1, ..., n/2-1, -n/2, ..., -1}.
  const std::vector<double>& wavenumbers() const { return k_; }
  std::size_t nyquist_index() const { return n_ / 2; }

  // Row-major multi-index, last axis fastest. Unused axes are 0.
  std::array<std::size_t, 3> unravel(std::size_t flat) const;
  std::array<double, 3> point(std::size_t flat) const;
  double radius_squared(std::size_t flat) const;
  // Stride of axis j in the flat layout.
  std::size_t stride(int axis) const;

  // Smallest wavenumber quantum 2pi/L; admissible boosts are its multiples.
  double wavenumber_quantum() const;
  bool admissible_wavenumber(double k) const;

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
  }

 private:
  int dim_;
  std::size_t n_;
  double length_;
  std::size_t size_;
  std::vector<double> axis_;
  std::vector<double> k_;
};

class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, std::vector<Complex> values);

  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    Field out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.point(i));
    out.require_finite();
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  Complex* data() { return values_.data(); }
  const Complex* data() const { return values_.data(); }

  Field& operator*=(Complex c);
  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);

  bool all_finite() const;
  // Throws NumericalError naming `context` when a sample is NaN or Inf.
  void require_finite(const char* context = "field") const;

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

Field operator*(Complex c, Field f);
Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);

class Density {
 public:
  explicit Density(Grid grid);
  // Rejects negative or non-finite samples.
  Density(Grid grid, std::vector<double> values);

  template <class F>
  static Density sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.point(i));
    return Density(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  double integral() const;
  Density scaled(double c) const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

// |f|^2 samplewise.
Density modulus_squared(const Field& f);

// Owns FFTW plans for one grid shape. Not thread-safe per instance; plan
// creation itself is serialized internally so instances may be built from
// any thread.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const Grid& grid() const { return grid_; }
  // Unnormalized forward DFT, in place.
  void forward(std::span<Complex> data);
  // Inverse DFT including the 1/N factor, in place.
  void inverse(std::span<Complex> data);

  // |k|^2 at each flat spectral index.
  const std::vector<double>& k_squared() const { return k2_; }
  // k_j at each flat index, with the Nyquist mode of axis j set to 0.
  const std::vector<double>& k_axis(int axis) const { return kaxis_[axis]; }

 private:
  Grid grid_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  std::vector<double> k2_;
  std::array<std::vector<double>, 3> kaxis_;
};

std::vector<Field> gradient_spectral(const Field& f);
std::vector<Field> gradient_spectral(const Field& f, SpectralWorkspace& ws);
Field laplacian_spectral(const Field& f);
Field laplacian_spectral(const Field& f, SpectralWorkspace& ws);
// Spectral derivative of a real sample array along one axis.
std::vector<double> derivative_real(std::span<const double> values, int axis,
                                    SpectralWorkspace& ws);

// (sum_k |k|^{2s} |f_k|^2)^{1/2}, normalized so s=0 gives the L2 norm.
double hs_norm(const Field& f, double s);
double hs_norm(const Field& f, double s, SpectralWorkspace& ws);

Complex inner(const Field& a, const Field& b);  // int conj(a) b
double l2_norm(const Field& f);
double l2_distance(const Field& a, const Field& b);
double integrate(std::span<const double> values, const Grid& grid);

struct Moments {
  double mass = 0;
  std::vector<double> momentum;  // Im int conj(f) grad f
  std::vector<double> center;    // int y |f|^2
  double variance = 0;           // int |y|^2 |f|^2
  double a_moment = 0;           // Im int f y.grad conj(f)
};

Moments moments(const Field& f);
Moments moments(const Field& f, SpectralWorkspace& ws);

// Samples the trigonometric interpolant of f at scale * y for every point y
// of `target`. Points outside f's box map to 0. Requires equal dimensions.
Field resample_scaled(const Field& f, const Grid& target, double scale);

// The same trigonometric interpolant on `points_per_axis` >= n points of the
// same box (zero padding; an even-n Nyquist mode is split between +-n/2).
Field refine(const Field& f, std::size_t points_per_axis);

// Fraction of spectral energy carried by modes with |k_j| above `fraction`
// of the Nyquist wavenumber on some axis.
double high_frequency_fraction(const Field& f, double fraction = 0.9);

// Mass within `cells` grid cells of the box boundary, relative to the total.
double boundary_mass_fraction(const Field& f, std::size_t cells = 3);

// Exact translation by `shift` via Fourier phase.
Field translate_spectral(const Field& f, std::span<const double> shift);

}  // namespace lognls
