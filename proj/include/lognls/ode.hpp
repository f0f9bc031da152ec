#pragma once

#include <algorithm>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lognls {

// Dense solution of an autonomous-or-not ODE produced by an adaptive
// Dormand-Prince 5(4) integrator. Between accepted steps the state is a
// quartic matching both endpoint values and slopes plus the integrator's own
// midpoint value, which keeps interpolation at the integrator's order.
template <std::size_t N>
class DenseTrajectory {
 public:
  using State = std::array<double, N>;
  struct Node {
    double t;
    State y;
    State dy;
    State mid;  // state at the midpoint of the step ending here
  };

  DenseTrajectory() = default;
  explicit DenseTrajectory(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  double t_begin() const { return nodes_.front().t; }
  double t_end() const { return nodes_.back().t; }
  const std::vector<Node>& nodes() const { return nodes_; }

  State at(double t) const {
    const std::size_t k = locate(t);
    if (k == 0) return nodes_[0].y;
    return eval(k, t).first;
  }

  State derivative_at(double t) const {
    const std::size_t k = locate(t);
    if (k == 0) return nodes_[0].dy;
    return eval(k, t).second;
  }

  // Times in (t_begin, t_end] where component c changes sign, refined on the
  // interpolant.
  std::vector<double> sign_changes(std::size_t c) const {
    std::vector<double> out;
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      const double a = nodes_[k - 1].y[c], b = nodes_[k].y[c];
      if (b == 0.0 && k + 1 < nodes_.size()) {
        out.push_back(nodes_[k].t);
        continue;
      }
      if (a == 0.0 || b == 0.0 || (a > 0) == (b > 0)) continue;
      auto f = [&](double t) { return eval(k, t).first[c]; };
      std::uintmax_t iters = 100;
      const auto r = boost::math::tools::toms748_solve(
          f, nodes_[k - 1].t, nodes_[k].t, a, b,
          boost::math::tools::eps_tolerance<double>(52), iters);
      out.push_back(0.5 * (r.first + r.second));
    }
    return out;
  }

 private:
  std::size_t locate(double t) const {
    if (nodes_.empty()) throw std::logic_error("empty trajectory");
    if (!(t >= nodes_.front().t && t <= nodes_.back().t))
      throw std::out_of_range("time " + std::to_string(t) + " outside trajectory [" +
                              std::to_string(nodes_.front().t) + ", " +
                              std::to_string(nodes_.back().t) + "]");
    if (t == nodes_.front().t) return 0;
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t,
                               [](const Node& n, double v) { return n.t < v; });
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  std::pair<State, State> eval(std::size_t k, double t) const {
    const Node& p = nodes_[k - 1];
    const Node& q = nodes_[k];
    const double h = q.t - p.t;
    const double s = (t - p.t) / h;
    State y{}, dy{};
    for (std::size_t i = 0; i < N; ++i) {
      // p(s) = y0 + h f0 s + c2 s^2 + c3 s^3 + c4 s^4 with p(1/2) = mid.
      const double A = q.y[i] - p.y[i] - h * p.dy[i];
      const double B = h * (q.dy[i] - p.dy[i]);
      const double C = 16.0 * (q.mid[i] - p.y[i] - 0.5 * h * p.dy[i]);
      const double c4 = C - 8.0 * A + 2.0 * B;
      const double c3 = B - 2.0 * A - 2.0 * c4;
      const double c2 = A - c3 - c4;
      y[i] = p.y[i] + s * (h * p.dy[i] + s * (c2 + s * (c3 + s * c4)));
      dy[i] = (h * p.dy[i] + s * (2 * c2 + s * (3 * c3 + s * 4 * c4))) / h;
    }
    return {y, dy};
  }

  std::vector<Node> nodes_;
};

// Integrates y' = rhs(y, t) from t0 until the trajectory covers t_end.
// `guard(y, t)` may throw to abort on invalid states.
template <std::size_t N, class Rhs, class Guard>
DenseTrajectory<N> integrate_dense(Rhs rhs, std::array<double, N> y0, double t0, double t_end,
                                   double abs_tol, double rel_tol, Guard guard) {
  using State = std::array<double, N>;
  namespace odeint = boost::numeric::odeint;
  if (!(abs_tol > 0 && rel_tol > 0)) throw std::invalid_argument("tolerances must be positive");
  if (!(t_end >= t0)) throw std::invalid_argument("t_end precedes t0");

  auto system = [&](const State& y, State& dydt, double t) { dydt = rhs(y, t); };
  auto stepper =
      odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>());
  std::vector<typename DenseTrajectory<N>::Node> nodes;
  nodes.push_back({t0, y0, rhs(y0, t0), y0});
  if (t_end == t0) return DenseTrajectory<N>(std::move(nodes));

  double dt0 = std::min(1e-3, 1e-2 * (t_end - t0));
  stepper.initialize(y0, t0, dt0);
  while (stepper.current_time() < t_end) {
    const auto [ta, tb] = stepper.do_step(system);
    State mid{};
    stepper.calc_state(0.5 * (ta + tb), mid);
    const State& y = stepper.current_state();
    guard(y, tb);
    nodes.push_back({tb, y, rhs(y, tb), mid});
  }
  return DenseTrajectory<N>(std::move(nodes));
}

}  // namespace lognls
