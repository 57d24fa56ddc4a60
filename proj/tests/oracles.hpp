#pragma once

// Reference values computed without the library's integration code: closed
// forms for Gaussian pairs, brute-force Riemann sums on plain densities, and
// exhaustive search for covers and grid minima.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

struct Atom1 {
  double a;
  double w;
};
using Mix1 = std::vector<Atom1>;

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// N(u, I) vs N(v, I) at distance delta.
inline double kl_gauss(double delta) { return 0.5 * delta * delta; }
inline double h2_gauss(double delta) { return 2.0 - 2.0 * std::exp(-delta * delta / 8.0); }
inline double chisq_gauss(double delta) { return std::expm1(delta * delta); }
inline double tv_gauss(double delta) { return 2.0 * normal_cdf(0.5 * delta) - 1.0; }
inline double l2sq_gauss(double delta, std::size_t d) {
  return 2.0 * std::pow(4.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) *
         -std::expm1(-delta * delta / 4.0);
}
inline double renyi_gauss(double delta, double lambda) {
  return std::exp(0.5 * lambda * (lambda - 1.0) * delta * delta);
}

// |p - q|_2^2 for 1-d atomic mixtures: sum c_i c_j (4 pi)^{-1/2} exp(-(a_i - a_j)^2 / 4).
inline double l2sq_mixture(const Mix1& p, const Mix1& q) {
  std::vector<std::pair<double, double>> signed_atoms;
  for (const auto& x : p) signed_atoms.emplace_back(x.a, x.w);
  for (const auto& x : q) signed_atoms.emplace_back(x.a, -x.w);
  long double total = 0.0L;
  for (const auto& [ai, ci] : signed_atoms) {
    for (const auto& [aj, cj] : signed_atoms) {
      total += static_cast<long double>(ci * cj) * std::exp(-(ai - aj) * (ai - aj) / 4.0);
    }
  }
  return static_cast<double>(total / std::sqrt(4.0L * std::numbers::pi_v<long double>));
}

inline long double density(const Mix1& m, long double x) {
  long double s = 0.0L;
  for (const auto& at : m) {
    const long double z = x - at.a;
    s += at.w * std::exp(-0.5L * z * z);
  }
  return s / std::sqrt(2.0L * std::numbers::pi_v<long double>);
}

enum class Kind { KL, H2, ChiSq, TV, L2Sq };

// Midpoint rule on [lo, hi] with plain (non log-domain) densities.
inline double riemann(Kind kind, const Mix1& p, const Mix1& q, double lo, double hi, std::size_t n) {
  const long double h = (static_cast<long double>(hi) - lo) / n;
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double x = lo + (i + 0.5L) * h;
    const long double f = density(p, x);
    const long double g = density(q, x);
    long double v = 0.0L;
    switch (kind) {
      case Kind::KL: v = f > 0 ? f * std::log(f / g) - f + g : g; break;
      case Kind::H2: {
        const long double r = std::sqrt(f) - std::sqrt(g);
        v = r * r;
        break;
      }
      case Kind::ChiSq: v = (f - g) * (f - g) / g; break;
      case Kind::TV: v = 0.5L * std::fabs(f - g); break;
      case Kind::L2Sq: v = (f - g) * (f - g); break;
    }
    total += v;
  }
  return static_cast<double>(total * h);
}

// Size of the smallest subset of indices whose eps-balls cover every index.
inline std::size_t exhaustive_min_cover(const std::vector<std::vector<double>>& dist, double eps) {
  const std::size_t n = dist.size();
  std::size_t best = n;
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountl(mask));
    if (size >= best) continue;
    bool covers = true;
    for (std::size_t i = 0; i < n && covers; ++i) {
      bool hit = false;
      for (std::size_t c = 0; c < n && !hit; ++c) {
        if ((mask >> c) & 1UL) hit = dist[i][c] <= eps;
      }
      covers = hit;
    }
    if (covers) best = size;
  }
  return best;
}

// Plain farthest-point greedy from index 0, first index on ties.
inline std::vector<std::size_t> greedy(const std::vector<std::vector<double>>& dist, double eps) {
  const std::size_t n = dist.size();
  std::vector<std::size_t> centers{0};
  for (;;) {
    std::size_t far = n;
    double far_d = eps;
    for (std::size_t i = 0; i < n; ++i) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t c : centers) m = std::min(m, dist[i][c]);
      if (m > far_d) {
        far_d = m;
        far = i;
      }
    }
    if (far == n) return centers;
    centers.push_back(far);
  }
}

struct Scan {
  double value;
  std::size_t argmin;
};

inline Scan grid_scan(const std::vector<double>& eps, const std::vector<std::size_t>& N, bool local,
                      std::size_t n) {
  Scan s{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double lg = std::log(static_cast<double>(N[k]));
    const double v = local ? eps[k] * eps[k] + lg / static_cast<double>(n)
                           : static_cast<double>(n) * eps[k] * eps[k] + lg;
    if (v < s.value) s = {v, k};
  }
  return s;
}

}  // namespace oracle
