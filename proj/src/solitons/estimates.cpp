#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lognls/rng.hpp"
#include "lognls/solitons.hpp"

namespace lognls {

namespace {

// F(z) = z ln|z|^2 with F(0) = 0.
Complex log_nonlinearity(Complex z) {
  const double n = std::norm(z);
  return n == 0 ? Complex(0) : z * std::log(n);
}

// Relative slack for rounding in the evaluation of both sides.
constexpr double kSlack = 1e-12;

Complex uniform_disk(SplitMix64& rng, double radius) {
  return std::polar(radius * std::sqrt(rng.uniform()), rng.uniform(0, 2 * std::numbers::pi));
}

Complex log_uniform_modulus(SplitMix64& rng, double radius, double decades) {
  return std::polar(radius * std::pow(10.0, -decades * rng.uniform()), rng.uniform(0, 2 * std::numbers::pi));
}

Complex clip(Complex z, double radius) {
  const double a = std::abs(z);
  return a > radius ? z * (radius / a) : z;
}

template <class Check>
AuditReport audit(std::size_t pairs, std::uint64_t seed, double radius, Check check) {
  SplitMix64 rng(seed);
  AuditReport rep;
  for (std::size_t i = 0; i < pairs; ++i) {
    Complex z, zp;
    switch (i % 3) {
      case 0:
        z = uniform_disk(rng, radius);
        zp = uniform_disk(rng, radius);
        break;
      case 1:
        z = log_uniform_modulus(rng, radius, 12);
        zp = log_uniform_modulus(rng, radius, 12);
        break;
      default:
        z = log_uniform_modulus(rng, radius, 6);
        zp = clip(z + log_uniform_modulus(rng, 0.1 * radius, 10), radius);
        break;
    }
    if (z == Complex(0)) z = radius * 1e-300;
    const auto r = check(z, zp);
    ++rep.pairs;
    if (!r.ok) ++rep.violations;
    if (r.rhs > 0) rep.max_ratio = std::max(rep.max_ratio, r.lhs / r.rhs);
  }
  return rep;
}

}  // namespace

EstimateCheck nonlinearity_estimate_check(Complex z, Complex zp) {
  // A modulus of 1 + ulp is a rounded point of the closed unit disk.
  constexpr double unit = 1 + 4 * std::numeric_limits<double>::epsilon();
  if (z == Complex(0) || std::abs(z) > unit || std::abs(zp) > unit)
    throw std::invalid_argument("estimate needs 0 < |z| <= 1 and |z'| <= 1");
  const double lhs = std::abs(log_nonlinearity(z) - log_nonlinearity(zp));
  const double rhs = std::abs(z - zp) * (6 - std::log(std::norm(z)));
  return {lhs, rhs, lhs <= rhs * (1 + kSlack)};
}

EstimateCheck uniqueness_estimate_check(Complex z1, Complex z2) {
  const Complex dz = z2 - z1;
  const double lhs = std::abs(std::imag((log_nonlinearity(z2) - log_nonlinearity(z1)) * std::conj(dz)));
  const double rhs = 4 * std::norm(dz);
  return {lhs, rhs, lhs <= rhs * (1 + kSlack)};
}

AuditReport audit_nonlinearity_estimate(std::size_t pairs, std::uint64_t seed) {
  return audit(pairs, seed, 1.0, nonlinearity_estimate_check);
}

AuditReport audit_uniqueness_estimate(std::size_t pairs, std::uint64_t seed) {
  return audit(pairs, seed, 10.0, uniqueness_estimate_check);
}

}  // namespace lognls
