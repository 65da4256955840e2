#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "ccnli/error.hpp"
#include "ccnli/perturbation.hpp"
#include "quadrature.hpp"

namespace ccnli {
namespace {

constexpr double kPi = std::numbers::pi;

// Periodic grid holding dispersed, modulated sinc pulses. The window spans
// [-L/2, L/2) symbol intervals with `fs` samples per interval; spectra are
// sampled at multiples of 1/L, so band edges k +- 1/2 fall on bins and carry
// half weight.
class PulseGrid {
 public:
  PulseGrid(std::size_t fs, std::size_t window)
      : fs_(fs), window_(window), n_(fs * window), fft_(n_), spec_(n_) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t samples_per_unit() const noexcept { return fs_; }
  double dt() const noexcept { return 1.0 / static_cast<double>(fs_); }

  // D(k, j, z, t) = disperse(sinc(t - j) exp(i 2 pi k t), z) on the grid.
  void pulse(int k, int j, double z, std::vector<cplx>& out) {
    std::fill(spec_.begin(), spec_.end(), cplx{});
    const long lw = static_cast<long>(window_);
    const long lo = static_cast<long>(k) * lw - lw / 2;
    const long hi = static_cast<long>(k) * lw + lw / 2;
    const double inv_l = 1.0 / static_cast<double>(window_);
    for (long b = lo; b <= hi; ++b) {
      const double f = static_cast<double>(b) * inv_l;
      const double weight = (b == lo || b == hi) ? 0.5 : 1.0;
      // exp(i 2 pi f t0) with t0 = -L/2 is (-1)^b.
      const double sign = (b % 2 == 0) ? 1.0 : -1.0;
      const double w = 2.0 * kPi * f;
      const double phase = -2.0 * kPi * (f - k) * j + w * w * z;
      spec_[bin_index(b, n_)] += weight * sign * inv_l * std::polar(1.0, phase);
    }
    out.resize(n_);
    fft_.backward(spec_, out);
  }

 private:
  std::size_t fs_;
  std::size_t window_;
  std::size_t n_;
  Fft fft_;
  std::vector<cplx> spec_;
};

std::size_t auto_window(int max_abs_j, int max_abs_k, double z) {
  const double reach = static_cast<double>(max_abs_j) + 4.0 * kPi * (max_abs_k + 1.0) * std::abs(z);
  const double target = 4.0 * reach + 256.0;
  const auto blocks = static_cast<std::size_t>(std::ceil(target / 256.0));
  return blocks * 256;
}

void guard(std::size_t n, const BruteForceOptions& options) {
  if (n > options.max_grid) {
    std::ostringstream msg;
    msg << "brute-force grid of " << n << " samples exceeds the limit of " << options.max_grid;
    throw ConfigError(msg.str());
  }
}

}  // namespace

cplx c_bruteforce(int k1, int j1, int k2, int j2, int k3, int j3, double z,
                  const BruteForceOptions& options) {
  if (z == 0.0) return {0.0, 0.0};
  const int max_k = std::max({std::abs(k1), std::abs(k2), std::abs(k3)});
  const int max_j = std::max({std::abs(j1), std::abs(j2), std::abs(j3)});
  const std::size_t window = options.window != 0 ? options.window : auto_window(max_j, max_k, z);
  if (window % 2 != 0) throw ConfigError("c_bruteforce: window must be even");
  // Each pulse needs |f| < fs/2, and the four-fold product occupies
  // |f| <= |k1| + |k2| + |k3| + 2, which must stay below fs so that nothing
  // folds onto f = 0.
  const auto needed = static_cast<std::size_t>(
      std::max(2 * max_k + 2, std::abs(k1) + std::abs(k2) + std::abs(k3) + 3));
  const std::size_t fs = std::max(options.samples_per_unit, needed);
  guard(fs * window, options);

  PulseGrid grid(fs, window);
  const std::array<std::pair<int, int>, 4> args{{{k1, j1}, {k2, j2}, {k3, j3}, {0, 0}}};
  std::vector<std::vector<cplx>> buffers(4);

  auto integrand = [&](double zp) -> cplx {
    std::map<std::pair<int, int>, std::size_t> seen;
    std::array<std::size_t, 4> slot{};
    for (std::size_t p = 0; p < 4; ++p) {
      const auto [it, fresh] = seen.emplace(args[p], p);
      if (fresh) grid.pulse(args[p].first, args[p].second, zp, buffers[p]);
      slot[p] = it->second;
    }
    const auto& d1 = buffers[slot[0]];
    const auto& d2 = buffers[slot[1]];
    const auto& d3 = buffers[slot[2]];
    const auto& d0 = buffers[slot[3]];
    cplx acc{};
    for (std::size_t i = 0; i < grid.size(); ++i)
      acc += d1[i] * std::conj(d2[i]) * d3[i] * std::conj(d0[i]);
    return acc * grid.dt();
  };

  const double lo = std::min(0.0, z);
  const double hi = std::max(0.0, z);
  const auto r = detail::adaptive_gauss_kronrod(integrand, {lo, hi}, options.absolute_tolerance,
                                                options.relative_tolerance, options.max_intervals);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "c_bruteforce: z' quadrature did not converge, error estimate " << r.error;
    throw NumericalError(msg.str(), r.error);
  }
  const cplx integral = z > 0.0 ? r.value : -r.value;
  return cplx(0.0, -2.0) * integral;
}

// ---------------------------------------------------------------------------

SpmTable::SpmTable(double z, int window) : z_(z), window_(window) {
  const auto side = static_cast<std::size_t>(2 * window + 1);
  values_.assign(side * side * side, cplx{});
}

std::size_t SpmTable::index(int j1, int j2, int j3) const {
  const int w = window_;
  if (std::abs(j1) > w || std::abs(j2) > w || std::abs(j3) > w) {
    std::ostringstream msg;
    msg << "SpmTable: (" << j1 << "," << j2 << "," << j3 << ") outside window " << w;
    throw ConfigError(msg.str());
  }
  const auto side = static_cast<std::size_t>(2 * w + 1);
  return (static_cast<std::size_t>(j1 + w) * side + static_cast<std::size_t>(j2 + w)) * side +
         static_cast<std::size_t>(j3 + w);
}

cplx SpmTable::at(int j1, int j2, int j3) const { return values_[index(j1, j2, j3)]; }

SpmTable SpmTable::compute(double z, int window, const BruteForceOptions& options,
                           std::size_t panels) {
  if (window < 0) throw ConfigError("SpmTable: window must be non-negative");
  SpmTable table(z, window);
  if (z == 0.0) return table;

  const std::size_t span = options.window != 0 ? options.window : auto_window(window, 0, z);
  if (span % 2 != 0) throw ConfigError("SpmTable: window must be even");
  const std::size_t fs = std::max<std::size_t>(options.samples_per_unit, 3);
  guard(fs * span, options);
  if (panels == 0) panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(std::abs(z) / 0.1)));

  PulseGrid grid(fs, span);
  const std::size_t n = grid.size();
  const auto& nodes = boost::math::quadrature::gauss<double, 8>::abscissa();
  const auto& weights = boost::math::quadrature::gauss<double, 8>::weights();
  const int w = window;
  std::vector<cplx> d0;
  std::vector<cplx> pair(n);
  const double h = z / static_cast<double>(panels);

  auto accumulate = [&](double zp, double weight) {
    // D(0, j) is D(0, 0) delayed by j whole symbols, i.e. j*fs samples.
    grid.pulse(0, 0, zp, d0);
    auto at = [&](std::size_t i, int j) {
      return d0[bin_index(static_cast<long>(i) - static_cast<long>(j) * static_cast<long>(fs), n)];
    };
    for (int j1 = -w; j1 <= w; ++j1)
      for (int j3 = j1; j3 <= w; ++j3) {
        for (std::size_t i = 0; i < n; ++i) pair[i] = at(i, j1) * at(i, j3) * std::conj(d0[i]);
        for (int j2 = -w; j2 <= w; ++j2) {
          cplx acc{};
          for (std::size_t i = 0; i < n; ++i) acc += pair[i] * std::conj(at(i, j2));
          const cplx add = cplx(0.0, -2.0) * weight * grid.dt() * acc;
          table.values_[table.index(j1, j2, j3)] += add;
          if (j3 != j1) table.values_[table.index(j3, j2, j1)] += add;
        }
      }
  };
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double x = nodes[q] * h / 2.0;
      const double wq = weights[q] * h / 2.0;
      accumulate(mid + x, wq);
      if (nodes[q] != 0.0) accumulate(mid - x, wq);
    }
  }

  double peak = 0.0;
  double edge = 0.0;
  for (int j1 = -w; j1 <= w; ++j1)
    for (int j2 = -w; j2 <= w; ++j2)
      for (int j3 = -w; j3 <= w; ++j3) {
        const double v = std::abs(table.at(j1, j2, j3));
        peak = std::max(peak, v);
        if (std::abs(j1) == w || std::abs(j2) == w || std::abs(j3) == w) edge = std::max(edge, v);
      }
  table.tail_ratio_ = peak > 0.0 ? edge / peak : 0.0;
  return table;
}

}  // namespace ccnli
