#pragma once

// Reference computations used only by tests. Each one takes a different
// route from the library code it checks.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace ccnli::oracle {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

/// Si(x) by 61-point Gauss-Kronrod on pieces of length at most pi/2.
inline double si(double x) {
  if (x == 0.0) return 0.0;
  auto f = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
  const double ax = std::abs(x);
  const int pieces = static_cast<int>(std::ceil(ax / (kPi / 2.0)));
  double sum = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double a = ax * p / pieces;
    const double b = ax * (p + 1) / pieces;
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0);
  }
  return x < 0.0 ? -sum : sum;
}

/// O(n^2) DFT with the library's sign convention.
inline std::vector<cplx> dft(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = sign * 2.0 * kPi * static_cast<double>((m * i) % n) / static_cast<double>(n);
      acc += x[i] * std::polar(1.0, ph);
    }
    out[m] = acc;
  }
  return out;
}

/// Gaussian exp(-t^2 / (2 s^2)) after linear propagation over z under
/// dq/dz = -i q_tt: exp(-t^2 / (2 w)) * s / sqrt(w), w = s^2 - 2 i z.
inline cplx dispersed_gaussian(double s, double z, double t) {
  const cplx w = cplx(s * s, -2.0 * z);
  return std::exp(-t * t / (2.0 * w)) * s / std::sqrt(w);
}

/// Fundamental soliton of dq/dz = -i q_tt - 2i |q|^2 q: eta sech(eta t) exp(-i eta^2 z).
inline cplx soliton(double eta, double z, double t) {
  return eta / std::cosh(eta * t) * std::polar(1.0, -eta * eta * z);
}

/// log2(n!) by summation.
inline double log2_factorial(std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 2; i <= n; ++i) s += std::log2(static_cast<double>(i));
  return s;
}

/// Random complex vector with standard normal components.
inline std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {nd(gen), nd(gen)};
  return v;
}

}  // namespace ccnli::oracle
