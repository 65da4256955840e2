#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "ccnli/error.hpp"
#include "ccnli/perturbation.hpp"

namespace ccnli {

SampledSignal first_order_field(const SampledSignal& launch, double z,
                                const FirstOrderOptions& options) {
  if (!(options.max_panel > 0.0)) throw ConfigError("first_order_field: max_panel must be positive");
  const std::size_t n = launch.size();
  if (z == 0.0) return SampledSignal(std::vector<cplx>(n), launch.dt(), launch.t0());

  Fft fft(n);
  std::vector<cplx> spectrum(n);
  fft.forward(launch.samples(), spectrum);
  std::vector<double> freq(n);
  for (std::size_t m = 0; m < n; ++m) freq[m] = bin_frequency(m, n, launch.dt());

  const auto panels = static_cast<std::size_t>(std::ceil(std::abs(z) / options.max_panel));
  const double h = z / static_cast<double>(panels);
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& nodes = boost::math::quadrature::gauss<double, 8>::abscissa();
  const auto& weights = boost::math::quadrature::gauss<double, 8>::weights();

  std::vector<cplx> acc(n);
  std::vector<cplx> work(n);
  // acc += weight * F[|q0|^2 q0 at z'] * H(z - z')
  auto node = [&](double zp, double weight) {
    for (std::size_t m = 0; m < n; ++m) work[m] = spectrum[m] * dispersion_transfer(freq[m], zp);
    fft.backward(work);
    for (auto& v : work) {
      v *= inv_n;
      v *= std::norm(v);
    }
    fft.forward(work);
    for (std::size_t m = 0; m < n; ++m) acc[m] += weight * work[m] * dispersion_transfer(freq[m], z - zp);
  };
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double x = nodes[q] * h / 2.0;
      const double wq = weights[q] * h / 2.0;
      node(mid + x, wq);
      if (nodes[q] != 0.0) node(mid - x, wq);
    }
  }
  for (auto& v : acc) v *= cplx(0.0, -2.0) * inv_n;
  fft.backward(acc);
  return SampledSignal(std::move(acc), launch.dt(), launch.t0());
}

}  // namespace ccnli
