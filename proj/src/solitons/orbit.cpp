#include <array>
#include <cmath>
#include <numbers>

#include "lognls/solitons.hpp"

namespace lognls {

namespace {

// C(y), grad C, Hessian C for C(y) = sum_k w_k e^{-i k.y}.
struct Correlation {
  Complex c;
  std::array<Complex, 3> grad{};
  std::array<std::array<Complex, 3>, 3> hess{};
};

Correlation correlate(const std::vector<Complex>& w, const std::vector<std::array<double, 3>>& k,
                      const std::array<double, 3>& y, int d) {
  Correlation out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == Complex(0)) continue;
    double ky = 0;
    for (int j = 0; j < d; ++j) ky += k[i][j] * y[j];
    const Complex term = w[i] * std::polar(1.0, -ky);
    out.c += term;
    for (int a = 0; a < d; ++a) {
      out.grad[a] += Complex(0, -k[i][a]) * term;
      for (int b = 0; b < d; ++b) out.hess[a][b] -= k[i][a] * k[i][b] * term;
    }
  }
  return out;
}

// Solves H s = g for d <= 3 by Gaussian elimination with partial pivoting.
bool solve_small(std::array<std::array<double, 3>, 3> h, std::array<double, 3> g, int d,
                 std::array<double, 3>& s) {
  for (int c = 0; c < d; ++c) {
    int p = c;
    for (int r = c + 1; r < d; ++r)
      if (std::abs(h[r][c]) > std::abs(h[p][c])) p = r;
    if (h[p][c] == 0) return false;
    std::swap(h[p], h[c]);
    std::swap(g[p], g[c]);
    for (int r = c + 1; r < d; ++r) {
      const double f = h[r][c] / h[c][c];
      for (int k = c; k < d; ++k) h[r][k] -= f * h[c][k];
      g[r] -= f * g[c];
    }
  }
  for (int r = d - 1; r >= 0; --r) {
    double acc = g[r];
    for (int k = r + 1; k < d; ++k) acc -= h[r][k] * s[k];
    s[r] = acc / h[r][r];
  }
  return true;
}

}  // namespace

ModulatedDistance modulated_distance(const Field& u, const GaussonSpec& spec) {
  const Grid& g = u.grid();
  const int d = g.dim();
  const std::size_t n = g.points_per_axis();
  GaussonSpec standing{spec.omega, spec.lambda, {}, {}};
  Field phi = gausson(standing, 0.0, g);
  Field uh = u;
  SpectralWorkspace ws(g);
  ws.forward(uh.values());
  ws.forward(phi.values());

  // H^1 pairing in Fourier space: int conj(f) g = (h^d / N) sum conj(F) G.
  const double norm = g.cell_volume() / static_cast<double>(g.size());
  std::vector<Complex> w(g.size());
  std::vector<std::array<double, 3>> kv(g.size());
  const auto& k2 = ws.k_squared();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unravel(i);
    bool nyquist = false;
    for (int j = 0; j < d; ++j) {
      nyquist = nyquist || idx[j] == n / 2;
      kv[i][j] = g.wavenumbers()[idx[j]];
    }
    // The Nyquist mode has no continuous translation; it carries no weight.
    if (!nyquist) w[i] = norm * (1 + k2[i]) * std::conj(uh[i]) * phi[i];
  }

  // Coarse search over grid translations: C(j h) is a forward transform of w.
  std::vector<Complex> coarse = w;
  ws.forward(coarse);
  std::size_t best = 0;
  for (std::size_t i = 1; i < coarse.size(); ++i)
    if (std::abs(coarse[i]) > std::abs(coarse[best])) best = i;
  std::array<double, 3> y{};
  const auto bidx = g.unravel(best);
  for (int j = 0; j < d; ++j) {
    double s = static_cast<double>(bidx[j]) * g.spacing();
    if (s > 0.5 * g.box_length()) s -= g.box_length();
    y[j] = s;
  }

  // Newton ascent on |C(y)|^2 with backtracking.
  bool converged = false;
  Correlation cur = correlate(w, kv, y, d);
  for (int it = 0; it < 60 && !converged; ++it) {
    std::array<double, 3> grad{};
    std::array<std::array<double, 3>, 3> hess{};
    for (int a = 0; a < d; ++a) {
      grad[a] = 2 * std::real(std::conj(cur.c) * cur.grad[a]);
      for (int b = 0; b < d; ++b)
        hess[a][b] = 2 * std::real(std::conj(cur.grad[a]) * cur.grad[b] + std::conj(cur.c) * cur.hess[a][b]);
    }
    std::array<double, 3> step{};
    bool newton = solve_small(hess, grad, d, step);
    // Newton direction -H^{-1} grad must ascend; otherwise use the gradient.
    double dir = 0;
    for (int a = 0; a < d; ++a) {
      step[a] = newton ? -step[a] : 0;
      dir += step[a] * grad[a];
    }
    if (!newton || !(dir > 0)) {
      const double scale = std::abs(cur.c) * std::abs(cur.c) + 1e-300;
      for (int a = 0; a < d; ++a) step[a] = grad[a] / scale;
    }
    double size = 0;
    for (int a = 0; a < d; ++a) size = std::max(size, std::abs(step[a]));
    if (size > g.spacing()) {
      for (int a = 0; a < d; ++a) step[a] *= g.spacing() / size;
      size = g.spacing();
    }
    if (size < 1e-14 * std::max(1.0, g.box_length())) {
      converged = true;
      break;
    }
    for (int half = 0; half < 40; ++half) {
      std::array<double, 3> trial = y;
      for (int a = 0; a < d; ++a) trial[a] += step[a];
      Correlation next = correlate(w, kv, trial, d);
      if (std::abs(next.c) >= std::abs(cur.c)) {
        y = trial;
        cur = next;
        break;
      }
      for (int a = 0; a < d; ++a) step[a] *= 0.5;
      if (half == 39) converged = true;  // no ascent at rounding level: stationary
    }
  }

  // Evaluate the distance directly rather than through the cancelling
  // expansion ||u||^2 + ||phi||^2 - 2|C|.
  const double theta = -std::arg(cur.c);
  double dist2 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double ky = 0;
    for (int j = 0; j < d; ++j) ky += kv[i][j] * y[j];
    const Complex diff = uh[i] - std::polar(1.0, theta - ky) * phi[i];
    dist2 += (1 + k2[i]) * std::norm(diff);
  }
  return {std::sqrt(norm * dist2), theta, std::vector<double>(y.begin(), y.begin() + d), converged};
}

DistanceSeries superposition_experiment(const SuperpositionSetup& s, const Grid& grid) {
  if (!(s.half_separation > 0)) throw std::invalid_argument("half separation must be positive");
  const int d = grid.dim();
  std::vector<double> c1(d, 0.0), c2(d, 0.0), v1(d, 0.0), v2(d, 0.0);
  c1[0] = -s.half_separation;
  c2[0] = s.half_separation;
  v1[0] = -s.velocity;
  v2[0] = s.velocity;
  const std::vector<GaussonSpec> specs{{0.0, s.lambda, v1, c1}, {0.0, s.lambda, v2, c2}};
  const NlsProblem p{LogNonlinearity{s.lambda, s.regularization}, grid, {s.dt, false, 0}};
  EvolveOptions o;
  o.snapshot_interval = s.record_interval;
  const auto res = evolve(p, multi_gausson(specs, 0.0, grid), 0.0, s.t_end, o);
  DistanceSeries out;
  out.boundary_breach = res.boundary_breach;
  for (const auto& [t, f] : res.snapshots) {
    out.t.push_back(t);
    out.distance.push_back(l2_distance(f, multi_gausson(specs, t, grid)));
    out.sup = std::max(out.sup, out.distance.back());
  }
  return out;
}

DistanceSeries orbital_distance_series(const NlsProblem& problem, const Field& u0, const GaussonSpec& spec,
                                       double t_end, double interval) {
  EvolveOptions o;
  o.snapshot_interval = interval;
  const auto res = evolve(problem, u0, 0.0, t_end, o);
  DistanceSeries out;
  out.boundary_breach = res.boundary_breach;
  for (const auto& [t, f] : res.snapshots) {
    out.t.push_back(t);
    out.distance.push_back(modulated_distance(f, spec).distance);
    out.sup = std::max(out.sup, out.distance.back());
  }
  return out;
}

}  // namespace lognls
