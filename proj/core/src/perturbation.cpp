#include "ccnli/perturbation.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <tuple>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "ccnli/csv.hpp"
#include "ccnli/error.hpp"
#include "ccnli/symbol_frame.hpp"
#include "quadrature.hpp"

namespace ccnli {
namespace {

constexpr double kPi = std::numbers::pi;

// Below this |a| the spatial integrand is constant in z'.
constexpr double kDegenerateSlope = 1e-12;
// Below this |a z| the closed form loses digits to cancellation and an
// 8-point Gauss-Legendre rule is exact to rounding instead.
constexpr double kShortSweep = 1e-2;

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

double spatial_integral(int j, int k, double z, double f) {
  const double w = 1.0 - std::abs(f - k);
  if (w <= 0.0) return 0.0;
  const double a = -4.0 * kPi * f * w;
  const double b = static_cast<double>(j) * w;
  if (std::abs(a) < kDegenerateSlope) {
    const double s = sinc(b);
    return z * s * s;
  }
  if (std::abs(a * z) < kShortSweep) {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    auto g = [&](double x) {
      const double s = sinc(a * x + b);
      return s * s;
    };
    return Rule::integrate(g, 0.0, z);
  }
  return sincsq_antiderivative(a, b, z) - sincsq_antiderivative(a, b, 0.0);
}

cplx chi(int k, int j, double z, const ChiOptions& options) {
  if (k < 0 || (k == 0 && j < 0)) {
    k = -k;
    j = -j;
  }
  if (z == 0.0) return {0.0, 0.0};

  auto integrand = [&](double f) {
    const double w = 1.0 - std::abs(f - k);
    return w * w * spatial_integral(j, k, z, f);
  };

  const double lo = k - 1.0;
  const double hi = k + 1.0;
  std::vector<double> cuts{lo, hi, static_cast<double>(k)};
  // a = 0 inside the interval.
  if (lo < 0.0 && 0.0 < hi) cuts.push_back(0.0);
  // Onset of the collision: j - 4 pi f z' first vanishes on [0, z] here.
  const double onset = static_cast<double>(j) / (4.0 * kPi * z);
  if (lo < onset && onset < hi) cuts.push_back(onset);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto r = detail::adaptive_gauss_kronrod(integrand, cuts, options.absolute_tolerance,
                                                options.relative_tolerance, options.max_intervals);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "chi(" << k << "," << j << "," << z << "): quadrature did not converge, error estimate "
        << r.error;
    throw NumericalError(msg.str(), r.error);
  }
  const double total = r.value;
  return {0.0, -2.0 * total};
}

// ---------------------------------------------------------------------------

PerturbTable::PerturbTable(double z, int m, int j_min, int j_max)
    : z_(z), m_(m), j_min_(j_min), j_max_(j_max) {
  if (m < 0) throw ConfigError("PerturbTable: M must be non-negative");
  if (j_min > j_max) throw ConfigError("PerturbTable: empty j range");
  values_.assign(static_cast<std::size_t>(2 * m + 1) * static_cast<std::size_t>(j_max - j_min + 1),
                 cplx{});
}

std::size_t PerturbTable::index(int k, int j) const {
  if (!covers(k, j)) {
    std::ostringstream msg;
    msg << "PerturbTable: (" << k << "," << j << ") outside the table";
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(k + m_) * static_cast<std::size_t>(j_max_ - j_min_ + 1) +
         static_cast<std::size_t>(j - j_min_);
}

cplx PerturbTable::at(int k, int j) const { return values_[index(k, j)]; }
void PerturbTable::set(int k, int j, cplx value) { values_[index(k, j)] = value; }

PerturbTable PerturbTable::compute(double z, int m, int j_min, int j_max, const ChiOptions& options,
                                   unsigned workers) {
  PerturbTable table(z, m, j_min, j_max);
  const std::size_t width = static_cast<std::size_t>(j_max - j_min + 1);
  const std::size_t total = table.values_.size();
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total || failed.load()) return;
      const int k = static_cast<int>(i / width) - m;
      const int j = static_cast<int>(i % width) + j_min;
      try {
        table.values_[i] = chi(k, j, z, options);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failed.exchange(true)) failure = e.what();
      }
    }
  };
  const unsigned n = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(total));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
  }
  if (failed) throw NumericalError("PerturbTable::compute: " + failure);
  return table;
}

void PerturbTable::write_csv(std::ostream& out) const {
  out << "k,j,im_chi\n";
  for (int k = -m_; k <= m_; ++k)
    for (int j = j_min_; j <= j_max_; ++j)
      out << k << ',' << j << ',' << format_double(at(k, j).imag()) << '\n';
}

PerturbTable PerturbTable::read_csv(std::istream& in, double z) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,j,im_chi", 0) != 0)
    throw ConfigError("PerturbTable::read_csv: missing header k,j,im_chi");
  std::vector<std::tuple<int, int, double>> rows;
  int m = 0;
  int j_min = 0;
  int j_max = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw ConfigError("PerturbTable::read_csv: expected 3 columns: " + line);
    const int k = std::stoi(fields[0]);
    const int j = std::stoi(fields[1]);
    const double v = parse_double(fields[2]);
    rows.emplace_back(k, j, v);
    m = std::max(m, std::abs(k));
    j_min = first ? j : std::min(j_min, j);
    j_max = first ? j : std::max(j_max, j);
    first = false;
  }
  if (rows.empty()) throw ConfigError("PerturbTable::read_csv: no rows");
  PerturbTable table(z, m, j_min, j_max);
  if (rows.size() != table.values_.size())
    throw ConfigError("PerturbTable::read_csv: table is not dense");
  for (const auto& [k, j, v] : rows) table.set(k, j, {0.0, v});
  return table;
}

// ---------------------------------------------------------------------------

long long count_nonzero_c(int m) {
  if (m < 0) throw ConfigError("count_nonzero_c: M must be non-negative");
  const long long mm = m;
  return 9 * mm * mm + 9 * mm + 1;
}

long long enumerate_nonzero_c(int m) {
  if (m < 0) throw ConfigError("enumerate_nonzero_c: M must be non-negative");
  long long count = 0;
  for (int k1 = -m; k1 <= m; ++k1)
    for (int k2 = -m; k2 <= m; ++k2)
      for (int k3 = -m; k3 <= m; ++k3)
        if (std::abs(k1 - k2 + k3) <= 1) ++count;
  return count;
}

// ---------------------------------------------------------------------------

cplx delta_spm(const SymbolFrame& frame, const SpmTable& table, std::size_t j0,
               double tail_tolerance) {
  if (table.tail_ratio() > tail_tolerance) {
    std::ostringstream msg;
    msg << "delta_spm: window " << table.window() << " truncates the SPM kernel (tail ratio "
        << table.tail_ratio() << " > " << tail_tolerance << ")";
    throw NumericalError(msg.str(), table.tail_ratio());
  }
  const int w = table.window();
  const long c = static_cast<long>(j0);
  cplx acc{};
  for (int j1 = -w; j1 <= w; ++j1) {
    const cplx a1 = frame.cyclic(0, c + j1);
    if (a1 == cplx{}) continue;
    for (int j2 = -w; j2 <= w; ++j2) {
      const cplx a12 = a1 * std::conj(frame.cyclic(0, c + j2));
      if (a12 == cplx{}) continue;
      for (int j3 = -w; j3 <= w; ++j3) acc += a12 * frame.cyclic(0, c + j3) * table.at(j1, j2, j3);
    }
  }
  return acc;
}

cplx delta_xpm_window(const SymbolFrame& frame, const PerturbTable& table, int j_lo, int j_hi,
                      std::size_t j0) {
  if (frame.channels_half() > table.channels_half())
    throw ConfigError("delta_xpm: table does not cover every interfering channel");
  if (j_lo < table.j_min() || j_hi > table.j_max())
    throw ConfigError("delta_xpm: j window outside the table");
  if (static_cast<std::size_t>(j_hi - j_lo + 1) > frame.length())
    throw ConfigError("delta_xpm: j window longer than the frame");
  const long c = static_cast<long>(j0);
  const int m = frame.channels_half();
  cplx sum{};
  for (int k = -m; k <= m; ++k) {
    if (k == 0) continue;
    for (int j = j_lo; j <= j_hi; ++j) sum += std::norm(frame.cyclic(k, c + j)) * table.at(k, j);
  }
  return 2.0 * frame.cyclic(0, c) * sum;
}

cplx delta_xpm_dominant(const SymbolFrame& frame, const PerturbTable& table, std::size_t j0) {
  return delta_xpm_window(frame, table, table.j_min(), table.j_max(), j0);
}

BlockwiseXpm delta_xpm_blockwise(cplx a00, double codeword_energy, int m, const PerturbTable& table,
                                 double variation_limit, BlockAnchor anchor) {
  if (m < 1) throw ConfigError("delta_xpm_blockwise: blocklength must be positive");
  BlockwiseXpm out{};
  out.random_lo = -m;
  out.random_hi = m - 1;
  if (out.random_lo < table.j_min() || out.random_hi > table.j_max())
    throw ConfigError("delta_xpm_blockwise: table does not span the collision window [-m, m-1]");

  const int offset = anchor == BlockAnchor::centre ? m / 2 : 0;
  cplx sum{};
  double deviation = 0.0;
  double magnitude = 0.0;
  auto add_block = [&](int k, int l) {
    const int start = l * m;
    const cplx reference = table.at(k, start + offset);
    sum += reference;
    for (int j = start; j < start + m; ++j) {
      const cplx v = table.at(k, j);
      deviation += std::abs(v - reference);
      magnitude += std::abs(v);
    }
  };
  const int mh = table.channels_half();
  for (int k = -mh; k <= mh; ++k) {
    if (k == 0) continue;
    for (int l = 1; l * m + m - 1 <= table.j_max(); ++l) add_block(k, l);
    for (int l = -2; l * m >= table.j_min(); --l) add_block(k, l);
  }
  out.deterministic = 2.0 * a00 * codeword_energy * sum;
  out.max_relative_variation = magnitude > 0.0 ? deviation / magnitude : 0.0;
  out.slowly_varying = out.max_relative_variation <= variation_limit;
  return out;
}

cplx predict_rx_symbol(cplx a00, cplx delta, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("predict_rx_symbol: epsilon must be in [0, 1]");
  return a00 + epsilon * delta;
}

cplx predict_rx_symbol(const SymbolFrame& frame, const SpmTable& spm, const PerturbTable& xpm,
                       double epsilon, std::size_t j0) {
  const cplx delta = delta_spm(frame, spm, j0) + delta_xpm_dominant(frame, xpm, j0);
  return predict_rx_symbol(frame.cyclic(0, static_cast<long>(j0)), delta, epsilon);
}

}  // namespace ccnli
