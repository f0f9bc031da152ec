#include "lognls/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace lognls {

Grid::Grid(int dim, std::size_t points_per_axis, double box_length)
    : dim_(dim), n_(points_per_axis), length_(box_length) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (n_ < 8 || !std::has_single_bit(n_))
    throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                std::to_string(n_));
  if (!(box_length > 0) || !std::isfinite(box_length))
    throw std::invalid_argument("box length must be positive and finite");
  size_ = 1;
  for (int j = 0; j < dim_; ++j) size_ *= n_;
  axis_.resize(n_);
  k_.resize(n_);
  const double h = spacing();
  const double dk = wavenumber_quantum();
  for (std::size_t i = 0; i < n_; ++i) {
    axis_[i] = -0.5 * length_ + static_cast<double>(i) * h;
    const long long m = static_cast<long long>(i) - (i < n_ / 2 ? 0 : static_cast<long long>(n_));
    k_[i] = dk * static_cast<double>(m);
  }
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

std::size_t Grid::stride(int axis) const {
  std::size_t s = 1;
  for (int j = dim_ - 1; j > axis; --j) s *= n_;
  return s;
}

std::array<std::size_t, 3> Grid::unravel(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int j = dim_ - 1; j >= 0; --j) {
    idx[j] = flat % n_;
    flat /= n_;
  }
  return idx;
}

std::array<double, 3> Grid::point(std::size_t flat) const {
  const auto idx = unravel(flat);
  std::array<double, 3> x{0, 0, 0};
  for (int j = 0; j < dim_; ++j) x[j] = axis_[idx[j]];
  return x;
}

double Grid::radius_squared(std::size_t flat) const {
  const auto x = point(flat);
  return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
}

double Grid::wavenumber_quantum() const { return 2.0 * std::numbers::pi / length_; }

bool Grid::admissible_wavenumber(double k) const {
  const double m = k / wavenumber_quantum();
  return std::isfinite(m) && std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, std::abs(m));
}

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size()) {}

Field::Field(Grid grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                " samples, grid expects " + std::to_string(grid_.size()));
  require_finite();
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

void Field::require_finite(const char* context) const {
  if (!all_finite()) throw NumericalError(std::string(context) + ": non-finite sample");
}

Field& Field::operator*=(Complex c) {
  for (auto& z : values_) z *= c;
  return *this;
}

Field& Field::operator+=(const Field& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field operator*(Complex c, Field f) { return f *= c; }
Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }

Density::Density(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Density::Density(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("density size does not match grid");
  for (double v : values_)
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("density samples must be finite and nonnegative");
}

double Density::integral() const { return integrate(values_, grid_); }

Density Density::scaled(double c) const {
  if (!(c >= 0)) throw std::invalid_argument("density scale must be nonnegative");
  std::vector<double> v(values_);
  for (auto& x : v) x *= c;
  return Density(grid_, std::move(v));
}

double Density::max() const { return *std::max_element(values_.begin(), values_.end()); }

Density modulus_squared(const Field& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::norm(f[i]);
  return Density(f.grid(), std::move(v));
}

double integrate(std::span<const double> values, const Grid& grid) {
  long double s = 0;
  for (double v : values) s += v;
  return static_cast<double>(s) * grid.cell_volume();
}

Complex inner(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("field grids differ");
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().cell_volume();
}

double l2_norm(const Field& f) {
  long double s = 0;
  for (const auto& z : f.values()) s += std::norm(z);
  return std::sqrt(static_cast<double>(s) * f.grid().cell_volume());
}

double l2_distance(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("field grids differ");
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(static_cast<double>(s) * a.grid().cell_volume());
}

double boundary_mass_fraction(const Field& f, std::size_t cells) {
  const Grid& g = f.grid();
  const std::size_t n = g.points_per_axis();
  long double edge = 0, total = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = std::norm(f[i]);
    total += w;
    const auto idx = g.unravel(i);
    bool near = false;
    for (int j = 0; j < g.dim(); ++j) near = near || idx[j] < cells || idx[j] + cells >= n;
    if (near) edge += w;
  }
  return total > 0 ? static_cast<double>(edge / total) : 0.0;
}

}  // namespace lognls
