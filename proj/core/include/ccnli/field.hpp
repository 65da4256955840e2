#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ccnli/fft.hpp"

namespace ccnli {

/// Uniformly sampled complex envelope q(t) in normalized units.
///
/// Sample i sits at time t0 + i*dt. The grid is the support of FFT-based
/// operators, which treat it as one period of a periodic function.
class SampledSignal {
 public:
  SampledSignal(std::vector<cplx> samples, double dt, double t0 = 0.0);

  std::size_t size() const noexcept { return samples_.size(); }
  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
  double duration() const noexcept { return static_cast<double>(samples_.size()) * dt_; }

  const std::vector<cplx>& samples() const noexcept { return samples_; }
  std::vector<cplx>& samples() noexcept { return samples_; }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }

  /// dt * sum |q_i|^2, the rectangle-rule approximation of the energy.
  double energy() const;

 private:
  std::vector<cplx> samples_;
  double dt_;
  double t0_;
};

/// dt * sum a_i conj(b_i).
cplx inner_product(const SampledSignal& a, const SampledSignal& b);

/// Relative L2 distance ||a - b|| / ||b||.
double relative_l2(const SampledSignal& a, const SampledSignal& b);

/// Physical fiber and modulation parameters that fix the normalization.
struct PhysicalParams {
  double beta2_s2_per_km = -21.7e-24;  // s^2/km (= -21.7 ps^2/km)
  double gamma_per_w_km = 1.3;         // 1/(W km)
  double symbol_interval_s = 20e-12;   // T, the baud interval
};

/// Physical <-> normalized units for the lossless NLS equation.
///
///   q = Q / sqrt(P0),  z = l / L0,  t = tau / T0,
///   T0 = sqrt(|beta2| L0 / 2),  P0 = 2 / (gamma L0).
///
/// Under this map the propagation equation becomes
/// dq/dz = -i d^2q/dt^2 - 2i |q|^2 q. Positive z is forward propagation;
/// every module (dispersion, perturbation, split-step) uses this one sign.
class NormalizationMap {
 public:
  /// Map with an explicit length scale L0 (km).
  static NormalizationMap from_length_scale(double l0_km, double beta2_s2_per_km,
                                            double gamma_per_w_km);

  double l0_km() const noexcept { return l0_km_; }
  double t0_s() const noexcept { return t0_s_; }
  double p0_w() const noexcept { return p0_w_; }
  double beta2() const noexcept { return beta2_; }
  double gamma() const noexcept { return gamma_; }

  double to_normalized_distance(double km) const noexcept { return km / l0_km_; }
  double to_physical_distance(double z) const noexcept { return z * l0_km_; }
  double to_normalized_time(double seconds) const noexcept { return seconds / t0_s_; }
  double to_physical_time(double t) const noexcept { return t * t0_s_; }
  cplx to_normalized_field(cplx sqrt_watt) const noexcept;
  cplx to_physical_field(cplx q) const noexcept;
  double to_normalized_power(double watt) const noexcept { return watt / p0_w_; }
  double to_physical_power(double p) const noexcept { return p * p0_w_; }

 private:
  NormalizationMap(double l0, double t0, double p0, double beta2, double gamma)
      : l0_km_(l0), t0_s_(t0), p0_w_(p0), beta2_(beta2), gamma_(gamma) {}

  double l0_km_;
  double t0_s_;
  double p0_w_;
  double beta2_;
  double gamma_;
};

/// Choose L0 = 2 T^2 / |beta2| so that the normalized symbol interval is 1.
/// Throws ConfigError unless beta2 < 0, gamma > 0 and T > 0.
NormalizationMap normalize(const PhysicalParams& physical);

/// How FFT-based operators treat the ends of the grid.
enum class Boundary {
  /// The signal is a finite pulse on a zero background; an operation whose
  /// result would reach past the grid edge raises AliasingError.
  isolated,
  /// The grid holds exactly one period of a periodic signal.
  periodic,
};

/// exp(i (2 pi f)^2 z), the transfer function of the dispersion operator.
cplx dispersion_transfer(double f, double z);

/// Multiply an unnormalized FFT spectrum (layout of Fft::forward) by the
/// dispersion transfer function for distance z.
void apply_dispersion(std::span<cplx> spectrum, double dt, double z);

/// Linear dispersive propagation over normalized distance z (any sign).
SampledSignal disperse(const SampledSignal& s, double z, Boundary boundary = Boundary::isolated);

/// Impulse response of the dispersion operator at distance z != 0:
/// exp(-i (t^2/(4z) - pi/4)) / sqrt(4 pi z), with sqrt(z) = i sqrt(|z|) for z < 0.
cplx dispersion_kernel(double z, double t);

/// disperse(s(t - t0) exp(i 2 pi f0 t), z) evaluated through the
/// translation/modulation identity: S(t - t0 + 4 pi f0 z) exp(i 2 pi f0 (t + 2 pi f0 z)),
/// where S = disperse(s, z). With Boundary::periodic, f0 must be a whole
/// number of frequency bins.
SampledSignal disperse_modulated(const SampledSignal& s, double z, double t0, double f0,
                                 Boundary boundary = Boundary::isolated);

}  // namespace ccnli
