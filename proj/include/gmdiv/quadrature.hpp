#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace gmdiv {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum over cells of |Kronrod - Gauss|
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = true;
};

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 20000;
};

/// Sum in a fixed binary tree so the result depends only on the order of `xs`.
double pairwise_sum(std::span<const double> xs);

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule on [-1, 1]; computed once per n and cached.
const GaussLegendreRule& gauss_legendre(std::size_t n);

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Cell {
  double a, b, value, error;
};

template <class F>
Cell kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod on the pieces [bp[i], bp[i+1]].
///
/// The cell with the largest |K15 - G7| is bisected until the summed
/// difference is at most max(abs_tol, rel_tol * |value|). Single threaded and
/// deterministic; the final value is a pairwise sum in left-to-right order.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints,
                                    const AdaptiveOptions& opts) {
  QuadratureResult out;
  if (breakpoints.size() < 2) return out;

  std::vector<detail::Cell> cells;
  std::priority_queue<std::pair<double, std::size_t>> queue;
  double total_value = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    cells.push_back(detail::kronrod15(f, breakpoints[i], breakpoints[i + 1]));
    total_value += cells.back().value;
    total_error += cells.back().error;
    queue.emplace(cells.back().error, cells.size() - 1);
  }
  out.evaluations = 15 * cells.size();

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total_value)); };
  std::size_t since_resum = 0;
  while (!queue.empty() && total_error > target()) {
    if (cells.size() >= opts.max_intervals) {
      out.converged = false;
      break;
    }
    const auto [err, idx] = queue.top();
    queue.pop();
    const detail::Cell cell = cells[idx];
    const double mid = 0.5 * (cell.a + cell.b);
    if (!(mid > cell.a && mid < cell.b) || cell.b - cell.a < 1e-13 * (1.0 + std::abs(mid))) {
      continue;  // cannot split further; its error stays in the total
    }
    const auto left = detail::kronrod15(f, cell.a, mid);
    const auto right = detail::kronrod15(f, mid, cell.b);
    out.evaluations += 30;
    cells[idx] = left;
    cells.push_back(right);
    queue.emplace(left.error, idx);
    queue.emplace(right.error, cells.size() - 1);
    total_value += left.value + right.value - cell.value;
    total_error += left.error + right.error - cell.error;
    if (++since_resum == 64) {
      since_resum = 0;
      total_error = 0.0;
      for (const auto& c : cells) total_error += c.error;
    }
  }

  std::sort(cells.begin(), cells.end(),
            [](const detail::Cell& x, const detail::Cell& y) { return x.a < y.a; });
  std::vector<double> values(cells.size());
  std::vector<double> errors(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    values[i] = cells[i].value;
    errors[i] = cells[i].error;
  }
  out.value = pairwise_sum(values);
  out.error = pairwise_sum(errors);
  out.intervals = cells.size();
  if (out.error > std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value))) {
    out.converged = false;
  }
  return out;
}

}  // namespace gmdiv
