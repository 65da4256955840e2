#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace ccnli::detail {

template <typename K>
struct QuadratureResult {
  K value;
  double error;
  bool converged;
};

/// Globally adaptive 15/31-point Gauss-Kronrod integration over the
/// consecutive intervals of `cuts`. The interval with the largest error
/// estimate |K - G| is bisected until the summed estimate is at most
/// max(abs_tol, rel_tol |I|) or `max_intervals` is reached. The result is
/// a deterministic function of the inputs.
template <typename F>
auto adaptive_gauss_kronrod(F f, const std::vector<double>& cuts, double abs_tol, double rel_tol,
                            std::size_t max_intervals)
    -> QuadratureResult<decltype(f(0.0))> {
  using K = decltype(f(0.0));
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  struct Piece {
    double a;
    double b;
    K value;
    double error;
    bool operator<(const Piece& o) const {
      if (error != o.error) return error < o.error;
      return a > o.a;  // ties: leftmost first
    }
  };
  auto evaluate = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    K fc = f(mid);
    K kr = fc * wk[0];
    K ga = fc * wg[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
      const K sum = f(mid + half * x[i]) + f(mid - half * x[i]);
      kr += sum * wk[i];
      if (i % 2 == 0) ga += sum * wg[i / 2];
    }
    return Piece{a, b, kr * half, std::abs((kr - ga) * half)};
  };

  std::priority_queue<Piece> heap;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i] != cuts[i + 1]) heap.push(evaluate(cuts[i], cuts[i + 1]));

  auto totals = [&](K& value, double& error) {
    value = K{};
    error = 0.0;
    auto copy = heap;
    std::vector<Piece> pieces;
    while (!copy.empty()) {
      pieces.push_back(copy.top());
      copy.pop();
    }
    // Sum in position order so the result does not depend on heap layout.
    std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.a < q.a; });
    for (const auto& p : pieces) {
      value += p.value;
      error += p.error;
    }
  };

  K value{};
  double error = 0.0;
  double running_error = 0.0;
  K running_value{};
  {
    auto copy = heap;
    while (!copy.empty()) {
      running_error += copy.top().error;
      running_value += copy.top().value;
      copy.pop();
    }
  }
  while (!heap.empty() && heap.size() < max_intervals &&
         running_error > std::max(abs_tol, rel_tol * std::abs(running_value))) {
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const Piece left = evaluate(worst.a, mid);
    const Piece right = evaluate(mid, worst.b);
    running_error += left.error + right.error - worst.error;
    running_value += left.value + right.value - worst.value;
    heap.push(left);
    heap.push(right);
  }
  totals(value, error);
  return {value, error, error <= std::max(abs_tol, rel_tol * std::abs(value))};
}

}  // namespace ccnli::detail
