#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "ccnli/perturbation.hpp"

namespace ccnli {
namespace {

constexpr double kPi = std::numbers::pi;

// sum_{k>=0} (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
double si_series(double x) {
  const double x2 = x * x;
  double term = x;  // x^(2k+1)/(2k+1)!
  double sum = x;
  for (int k = 1; k < 40; ++k) {
    const double n = 2.0 * k + 1.0;
    term *= -x2 / ((n - 1.0) * n);
    const double add = term / n;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Si(x) = pi/2 + Im E1(ix) for x > 0. exp(ix) E1(ix) = f(x) - i g(x) is the
// continued fraction 1/(1+ix - 1/(3+ix - 4/(5+ix - ...))), evaluated with the
// modified Lentz method.
double si_auxiliary(double x) {
  using C = std::complex<double>;
  constexpr double tiny = 1e-300;
  C b(1.0, x);
  C c(1.0 / tiny, 0.0);
  C d = 1.0 / b;
  C h = d;
  for (int i = 2; i < 500; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= C(std::cos(x), -std::sin(x));  // h = E1(ix)
  return kPi / 2.0 + h.imag();
}

}  // namespace

double si(double x) {
  if (x == 0.0) return 0.0;
  const double ax = std::abs(x);
  const double v = ax <= 4.0 ? si_series(ax) : si_auxiliary(ax);
  return x < 0.0 ? -v : v;
}

double sinc(double u) {
  if (u == 0.0) return 1.0;
  const double pu = kPi * u;
  return std::sin(pu) / pu;
}

double sincsq_antiderivative(double a, double b, double x) {
  const double u = a * x + b;
  const double s = sinc(u);
  return si(2.0 * kPi * u) / (a * kPi) - (u / a) * s * s;
}

}  // namespace ccnli
