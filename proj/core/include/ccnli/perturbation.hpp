#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ccnli/fft.hpp"
#include "ccnli/field.hpp"

namespace ccnli {

class SymbolFrame;

// ---------------------------------------------------------------------------
// Special functions

/// Sine integral Si(x) = int_0^x sin(t)/t dt.
///
/// Power series for |x| <= 4; beyond that Si(x) = pi/2 - f(x) cos x - g(x) sin x
/// with the auxiliary functions f, g obtained from the continued fraction of
/// E1(ix). Absolute error is below 1e-13 on the real line.
double si(double x);

/// Normalized sinc: sin(pi u)/(pi u), sinc(0) = 1.
double sinc(double u);

/// Antiderivative of sinc^2(a x + b) in x (a != 0):
/// Si(2 pi u)/(a pi) - (u/a) sinc^2(u), u = a x + b.
double sincsq_antiderivative(double a, double b, double x);

/// s(j,k,z,f) = int_0^z sinc^2((j - 4 pi f z') (1 - |f - k|)) dz', closed form.
/// Returns 0 when |f - k| >= 1.
double spatial_integral(int j, int k, double z, double f);

// ---------------------------------------------------------------------------
// XPM coefficients

struct ChiOptions {
  /// Adaptive Gauss-Kronrod stops once the error estimate is below
  /// max(absolute_tolerance, relative_tolerance |chi|); failing that within
  /// max_intervals throws NumericalError.
  double relative_tolerance = 1e-12;
  double absolute_tolerance = 1e-10;
  std::size_t max_intervals = 4000;
};

/// chi_{k,j}(z) = -2i int_{k-1}^{k+1} (1 - |f-k|)^2 s(j,k,z,f) df.
///
/// Purely imaginary. Evaluated for the canonical representative of the pair
/// (k,j) ~ (-k,-j) so that chi(k,j,z) == chi(-k,-j,z) bit for bit.
cplx chi(int k, int j, double z, const ChiOptions& options = {});

/// Dense table of chi_{k,j}(z) for k in [-M, M] and j in [j_min, j_max].
class PerturbTable {
 public:
  PerturbTable(double z, int m, int j_min, int j_max);

  /// Evaluate every entry, spreading (k,j) pairs over `workers` threads
  /// (0 = hardware concurrency). Output does not depend on the worker count.
  static PerturbTable compute(double z, int m, int j_min, int j_max,
                              const ChiOptions& options = {}, unsigned workers = 0);

  double z() const noexcept { return z_; }
  int channels_half() const noexcept { return m_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  bool covers(int k, int j) const noexcept {
    return k >= -m_ && k <= m_ && j >= j_min_ && j <= j_max_;
  }

  cplx at(int k, int j) const;
  void set(int k, int j, cplx value);

  /// CSV with header `k,j,im_chi`, rows ordered by k then j.
  void write_csv(std::ostream& out) const;
  /// Inverse of write_csv; the distance is not stored in the file.
  static PerturbTable read_csv(std::istream& in, double z);

 private:
  std::size_t index(int k, int j) const;

  double z_;
  int m_;
  int j_min_;
  int j_max_;
  std::vector<cplx> values_;
};

// ---------------------------------------------------------------------------
// Brute-force oracle for C(k1,j1,k2,j2,k3,j3,z)

struct BruteForceOptions {
  /// Samples per unit of normalized time; raised to the smallest alias-free
  /// rate for the requested channels when lower.
  std::size_t samples_per_unit = 0;
  /// Time window in symbol intervals; 0 picks a size from the walk-off.
  std::size_t window = 0;
  /// Tolerances of the adaptive z' quadrature.
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-14;
  std::size_t max_intervals = 400;
  /// Resource guard on the FFT length.
  std::size_t max_grid = std::size_t{1} << 22;
};

/// Direct evaluation of
///   C = -2i int_0^z int D(k1,j1) D*(k2,j2) D(k3,j3) D*(0,0) dt dz'
/// where D(k,j,z,t) is the dispersed pulse sinc(t-j) exp(i 2 pi k t),
/// built on an FFT grid. Reference only; cost grows with the time window.
cplx c_bruteforce(int k1, int j1, int k2, int j2, int k3, int j3, double z,
                  const BruteForceOptions& options = {});

/// Number of (k1,k2,k3) in [-M,M]^3 with |k1 - k2 + k3| <= 1: 9M^2 + 9M + 1.
long long count_nonzero_c(int m);

/// The same count by exhaustive enumeration of the selection rule.
long long enumerate_nonzero_c(int m);

/// SPM coefficients C(0,j1,0,j2,0,j3,z) for |j1|,|j2|,|j3| <= window.
class SpmTable {
 public:
  /// `panels` Gauss-Legendre panels (8 nodes each) over [0, z].
  static SpmTable compute(double z, int window, const BruteForceOptions& options = {},
                          std::size_t panels = 0);

  double z() const noexcept { return z_; }
  int window() const noexcept { return window_; }
  cplx at(int j1, int j2, int j3) const;
  /// max |C| over triples touching the window edge divided by max |C|.
  double tail_ratio() const noexcept { return tail_ratio_; }

 private:
  SpmTable(double z, int window);
  std::size_t index(int j1, int j2, int j3) const;

  double z_;
  int window_;
  std::vector<cplx> values_;
  double tail_ratio_ = 0.0;
};

// ---------------------------------------------------------------------------
// Perturbation predictors. Frames are accessed cyclically in j; `j0` is the
// time index of the symbol of interest on channel 0.

/// sum a_{0,j1} a*_{0,j2} a_{0,j3} C(0,j1,0,j2,0,j3,z). Throws NumericalError
/// when the table's tail ratio exceeds `tail_tolerance`.
cplx delta_spm(const SymbolFrame& frame, const SpmTable& table, std::size_t j0 = 0,
               double tail_tolerance = 1e-2);

/// 2 a_{0,0} sum_{k != 0} sum_j |a_{k,j}|^2 chi_{k,j}(z) over the table's j range.
cplx delta_xpm_dominant(const SymbolFrame& frame, const PerturbTable& table, std::size_t j0 = 0);

/// The same sum restricted to j in [j_lo, j_hi].
cplx delta_xpm_window(const SymbolFrame& frame, const PerturbTable& table, int j_lo, int j_hi,
                      std::size_t j0 = 0);

/// Block decomposition of the dominant XPM term for constant-energy codewords
/// of length m whose boundaries are aligned with j = 0.
struct BlockwiseXpm {
  /// 2 a00 E sum_{k != 0} sum_{l >= 1 or l <= -2} chi_{k, l m + offset}.
  cplx deterministic;
  /// Interferer indices that remain random: [-m, m-1].
  int random_lo;
  int random_hi;
  /// sum |chi_{k,j} - chi_{k,lm}| / sum |chi_{k,j}| over every j inside the
  /// deterministic blocks: the L1 error of the piecewise-constant model.
  double max_relative_variation;
  /// max_relative_variation <= variation_limit.
  bool slowly_varying;
};

/// Index inside each block whose chi stands in for the whole block: the first
/// symbol lm, or the centre lm + m/2. chi_{k,j} of the nearest channels is
/// close to linear in j, so the centre anchor cancels the first-order error.
enum class BlockAnchor { start, centre };

BlockwiseXpm delta_xpm_blockwise(cplx a00, double codeword_energy, int m,
                                 const PerturbTable& table, double variation_limit = 0.05,
                                 BlockAnchor anchor = BlockAnchor::start);

/// First-order matched-filter output a00 + epsilon * delta.
cplx predict_rx_symbol(cplx a00, cplx delta, double epsilon);

/// Prediction from frame and coefficient tables (SPM plus dominant XPM).
cplx predict_rx_symbol(const SymbolFrame& frame, const SpmTable& spm, const PerturbTable& xpm,
                       double epsilon, std::size_t j0 = 0);

// ---------------------------------------------------------------------------
// First-order field

struct FirstOrderOptions {
  /// Largest Gauss-Legendre panel in z'.
  double max_panel = 0.01;
};

/// q1(z, t) = -2i int_0^z D[|q0(z')|^2 q0(z'); z - z'] dz' with
/// q0(z') = D[launch; z'], on the launch signal's periodic grid.
SampledSignal first_order_field(const SampledSignal& launch, double z,
                                const FirstOrderOptions& options = {});

}  // namespace ccnli
