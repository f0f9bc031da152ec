#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "lognls/grid.hpp"

namespace lognls {

namespace {

// FFTW's planner is not reentrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid& grid) : grid_(grid) {
  const int d = grid.dim();
  const int n = static_cast<int>(grid.points_per_axis());
  int dims[3] = {n, n, n};
  {
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(grid.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_plan_ = fftw_plan_dft(d, dims, buf, buf, FFTW_FORWARD, flags);
    inverse_plan_ = fftw_plan_dft(d, dims, buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
  }
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW planning failed");

  const auto& k = grid.wavenumbers();
  const std::size_t nyq = grid.nyquist_index();
  k2_.assign(grid.size(), 0.0);
  for (int j = 0; j < d; ++j) kaxis_[j].assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    for (int j = 0; j < d; ++j) {
      k2_[i] += k[idx[j]] * k[idx[j]];
      kaxis_[j][i] = idx[j] == nyq ? 0.0 : k[idx[j]];
    }
  }
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void SpectralWorkspace::forward(std::span<Complex> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void SpectralWorkspace::inverse(std::span<Complex> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), p, p);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

std::vector<Field> gradient_spectral(const Field& f) {
  SpectralWorkspace ws(f.grid());
  return gradient_spectral(f, ws);
}

std::vector<Field> gradient_spectral(const Field& f, SpectralWorkspace& ws) {
  std::vector<Complex> hat(f.values().begin(), f.values().end());
  ws.forward(hat);
  std::vector<Field> out;
  for (int j = 0; j < f.grid().dim(); ++j) {
    Field g(f.grid());
    const auto& kj = ws.k_axis(j);
    for (std::size_t i = 0; i < hat.size(); ++i) g[i] = Complex(0, kj[i]) * hat[i];
    ws.inverse(g.values());
    out.push_back(std::move(g));
  }
  return out;
}

Field laplacian_spectral(const Field& f) {
  SpectralWorkspace ws(f.grid());
  return laplacian_spectral(f, ws);
}

Field laplacian_spectral(const Field& f, SpectralWorkspace& ws) {
  Field g = f;
  ws.forward(g.values());
  const auto& k2 = ws.k_squared();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= -k2[i];
  ws.inverse(g.values());
  return g;
}

std::vector<double> derivative_real(std::span<const double> values, int axis,
                                    SpectralWorkspace& ws) {
  std::vector<Complex> buf(values.begin(), values.end());
  ws.forward(buf);
  const auto& kj = ws.k_axis(axis);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= Complex(0, kj[i]);
  ws.inverse(buf);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

double hs_norm(const Field& f, double s) {
  SpectralWorkspace ws(f.grid());
  return hs_norm(f, s, ws);
}

double hs_norm(const Field& f, double s, SpectralWorkspace& ws) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("Sobolev index must lie in [0, 1]");
  std::vector<Complex> hat(f.values().begin(), f.values().end());
  ws.forward(hat);
  const auto& k2 = ws.k_squared();
  long double sum = 0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double w = s == 0.0 ? 1.0 : std::pow(k2[i], s);
    sum += w * std::norm(hat[i]);
  }
  const double scale = f.grid().cell_volume() / static_cast<double>(hat.size());
  return std::sqrt(static_cast<double>(sum) * scale);
}

Moments moments(const Field& f) {
  SpectralWorkspace ws(f.grid());
  return moments(f, ws);
}

Moments moments(const Field& f, SpectralWorkspace& ws) {
  const Grid& g = f.grid();
  const int d = g.dim();
  const auto grad = gradient_spectral(f, ws);
  Moments m;
  m.momentum.assign(d, 0.0);
  m.center.assign(d, 0.0);
  long double mass = 0, var = 0, a = 0;
  std::array<long double, 3> mom{0, 0, 0}, cen{0, 0, 0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = g.point(i);
    const double rho = std::norm(f[i]);
    mass += rho;
    Complex ydf = 0;
    for (int j = 0; j < d; ++j) {
      const Complex fdj = std::conj(f[i]) * grad[j][i];
      mom[j] += fdj.imag();
      cen[j] += x[j] * rho;
      var += x[j] * x[j] * rho;
      ydf += x[j] * fdj;
    }
    a -= ydf.imag();
  }
  const double dv = g.cell_volume();
  m.mass = static_cast<double>(mass) * dv;
  m.variance = static_cast<double>(var) * dv;
  m.a_moment = static_cast<double>(a) * dv;
  for (int j = 0; j < d; ++j) {
    m.momentum[j] = static_cast<double>(mom[j]) * dv;
    m.center[j] = static_cast<double>(cen[j]) * dv;
  }
  return m;
}

namespace {

// Rows: target points; columns: source modes in FFT order.
// Rows [p0, p1) of the map from FFT coefficients on `src` to samples of the
// trigonometric interpolant at scale * dst.coordinate(p); zero rows outside
// the source box.
std::vector<Complex> interpolation_rows(const Grid& src, const Grid& dst, double scale, std::size_t p0,
                                        std::size_t p1) {
  const std::size_t ns = src.points_per_axis();
  const double half = 0.5 * src.box_length();
  const double dk = src.wavenumber_quantum();
  std::vector<Complex> m((p1 - p0) * ns, Complex(0, 0));
  for (std::size_t p = p0; p < p1; ++p) {
    const double x = scale * dst.coordinate(p);
    if (std::abs(x) > half * (1 + 1e-12)) continue;
    const double theta = x + half;
    Complex* row = &m[(p - p0) * ns];
    // Direct evaluation per mode keeps phase error at O(eps * k * L).
    for (std::size_t q = 0; q < ns / 2; ++q) {
      const Complex w = std::polar(1.0 / static_cast<double>(ns), dk * static_cast<double>(q) * theta);
      row[q] = w;
      if (q > 0) row[ns - q] = std::conj(w);
    }
    const double kn = dk * static_cast<double>(ns / 2);
    row[ns / 2] = Complex(std::cos(kn * theta) / static_cast<double>(ns), 0);
  }
  return m;
}

// Contracts axis `axis` of a row-major tensor with shape `shape` against the
// interpolation map, built in row blocks of at most ~2^24 entries.
std::vector<Complex> contract_axis(const std::vector<Complex>& in, std::array<std::size_t, 3>& shape, int axis,
                                   const Grid& src, const Grid& dst, double scale) {
  std::size_t outer = 1, inner = 1;
  for (int j = 0; j < axis; ++j) outer *= shape[j];
  for (int j = axis + 1; j < 3; ++j) inner *= shape[j];
  const std::size_t cols = shape[axis], rows = dst.points_per_axis();
  const std::size_t block = std::max<std::size_t>(1, (std::size_t{1} << 24) / cols);
  std::vector<Complex> out(outer * rows * inner, Complex(0, 0));
  for (std::size_t p0 = 0; p0 < rows; p0 += block) {
    const std::size_t p1 = std::min(rows, p0 + block);
    const auto mat = interpolation_rows(src, dst, scale, p0, p1);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t r = p0; r < p1; ++r) {
        const Complex* mrow = &mat[(r - p0) * cols];
        Complex* target = &out[(o * rows + r) * inner];
        for (std::size_t c = 0; c < cols; ++c) {
          const Complex w = mrow[c];
          if (w == Complex(0, 0)) continue;
          const Complex* source = &in[(o * cols + c) * inner];
          for (std::size_t t = 0; t < inner; ++t) target[t] += w * source[t];
        }
      }
  }
  shape[axis] = rows;
  return out;
}

}  // namespace

Field resample_scaled(const Field& f, const Grid& target, double scale) {
  const Grid& src = f.grid();
  if (src.dim() != target.dim()) throw std::invalid_argument("resample: dimension mismatch");
  if (!(scale > 0) || !std::isfinite(scale)) throw std::invalid_argument("resample: bad scale");
  // The interpolant reproduces the samples at the nodes.
  if (scale == 1 && src == target) return f;
  std::vector<Complex> data(f.values().begin(), f.values().end());
  SpectralWorkspace ws(src);
  ws.forward(data);
  std::array<std::size_t, 3> shape{1, 1, 1};
  for (int j = 0; j < src.dim(); ++j) shape[j] = src.points_per_axis();
  for (int j = 0; j < src.dim(); ++j) data = contract_axis(data, shape, j, src, target, scale);
  return Field(target, std::move(data));
}

Field refine(const Field& f, std::size_t points_per_axis) {
  const Grid& src = f.grid();
  const std::size_t n = src.points_per_axis(), m = points_per_axis;
  if (m < n) throw std::invalid_argument("refine: fewer points than the source");
  if (m == n) return f;
  const Grid target(src.dim(), m, src.box_length());
  // Per source index: target indices and weights along one axis.
  std::vector<std::vector<std::pair<std::size_t, double>>> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (n % 2 == 0 && i == n / 2) {
      map[i] = {{m - n / 2, 0.5}, {n / 2, 0.5}};
    } else {
      map[i] = {{i < (n + 1) / 2 ? i : m - (n - i), 1.0}};
    }
  }
  std::vector<Complex> hat(f.values().begin(), f.values().end());
  SpectralWorkspace ws(src);
  ws.forward(hat);
  const double gain = std::pow(static_cast<double>(m) / static_cast<double>(n), src.dim());
  std::vector<Complex> out(target.size(), Complex(0, 0));
  for (std::size_t flat = 0; flat < hat.size(); ++flat) {
    if (hat[flat] == Complex(0, 0)) continue;
    const auto idx = src.unravel(flat);
    std::array<std::size_t, 3> pick{0, 0, 0};
    // Enumerate the product of the per-axis choices.
    while (true) {
      std::size_t dst = 0;
      double w = gain;
      for (int j = 0; j < src.dim(); ++j) {
        const auto& [ti, tw] = map[idx[j]][pick[j]];
        dst += ti * target.stride(j);
        w *= tw;
      }
      out[dst] += w * hat[flat];
      int j = 0;
      while (j < src.dim() && ++pick[j] == map[idx[j]].size()) pick[j++] = 0;
      if (j == src.dim()) break;
    }
  }
  SpectralWorkspace wt(target);
  wt.inverse(out);
  return Field(target, std::move(out));
}

double high_frequency_fraction(const Field& f, double fraction) {
  const Grid& g = f.grid();
  std::vector<Complex> hat(f.values().begin(), f.values().end());
  SpectralWorkspace ws(g);
  ws.forward(hat);
  const double kmax = fraction * g.wavenumber_quantum() * static_cast<double>(g.points_per_axis() / 2);
  const auto& k = g.wavenumbers();
  long double high = 0, total = 0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double e = std::norm(hat[i]);
    total += e;
    const auto idx = g.unravel(i);
    bool hi = false;
    for (int j = 0; j < g.dim(); ++j) hi = hi || std::abs(k[idx[j]]) > kmax;
    if (hi) high += e;
  }
  return total > 0 ? static_cast<double>(high / total) : 0.0;
}

Field translate_spectral(const Field& f, std::span<const double> shift) {
  const Grid& g = f.grid();
  if (static_cast<int>(shift.size()) != g.dim())
    throw std::invalid_argument("translation vector has wrong dimension");
  Field out = f;
  SpectralWorkspace ws(g);
  ws.forward(out.values());
  const auto& k = g.wavenumbers();
  const std::size_t nyq = g.nyquist_index();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = g.unravel(i);
    Complex factor = 1.0;
    for (int j = 0; j < g.dim(); ++j) {
      const double phase = k[idx[j]] * shift[j];
      factor *= idx[j] == nyq ? Complex(std::cos(phase), 0) : std::polar(1.0, -phase);
    }
    out[i] *= factor;
  }
  ws.inverse(out.values());
  return out;
}

}  // namespace lognls
