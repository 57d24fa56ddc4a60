#include "gmdiv/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace gmdiv {

double normal_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

double chi_tail(std::size_t d, double t) {
  if (t <= 0.0) return 1.0;
  // Q_{k+2}(t) = Q_k(t) + y^{k/2} e^{-y} / Gamma(k/2 + 1),  y = t^2 / 2.
  const double y = 0.5 * t * t;
  double q;
  std::size_t k;
  if (d % 2 == 1) {
    q = std::erfc(t / std::numbers::sqrt2);
    k = 1;
  } else {
    q = std::exp(-y);
    k = 2;
  }
  for (; k < d; k += 2) {
    const double half = 0.5 * static_cast<double>(k);
    q += std::exp(half * std::log(y) - y - std::lgamma(half + 1.0));
  }
  return std::min(q, 1.0);
}

double sphere_area(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double log_gaussian_norm(std::size_t d) {
  return -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
}

Polynomial poly_multiply(const Polynomial& a, const Polynomial& b) {
  if (a.empty() || b.empty()) return {};
  Polynomial out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Polynomial poly_shifted_power(double shift, std::size_t k) {
  Polynomial out{1.0};
  for (std::size_t i = 0; i < k; ++i) out = poly_multiply(out, {shift, 1.0});
  return out;
}

double log_gaussian_poly_tail(const Polynomial& poly, double t0) {
  if (poly.empty()) return -std::numeric_limits<double>::infinity();
  // J_k = e^{t0^2/2} int_{t0}^inf t^k e^{-t^2/2} dt
  //     = t0^{k-1} + (k-1) J_{k-2},  J_1 = 1,
  //     J_0 = sqrt(pi/2) erfc(t0/sqrt2) e^{t0^2/2}.
  double j0;
  if (t0 > 26.0) {
    // Mills ratio; truncated after a positive term so it stays an upper bound.
    const double u = 1.0 / (t0 * t0);
    j0 = (1.0 - u * (1.0 - u * (3.0 - u * (15.0 - 105.0 * u)))) / t0;
  } else {
    j0 = std::sqrt(std::numbers::pi / 2.0) * std::erfc(t0 / std::numbers::sqrt2) *
         std::exp(0.5 * t0 * t0);
  }
  std::vector<double> J(std::max<std::size_t>(poly.size(), 2));
  J[0] = j0;
  J[1] = 1.0;
  for (std::size_t k = 2; k < J.size(); ++k) {
    J[k] = std::pow(t0, static_cast<double>(k - 1)) + static_cast<double>(k - 1) * J[k - 2];
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) acc += poly[k] * J[k];
  if (!(acc > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(acc) - 0.5 * t0 * t0;
}

double bregman_exp(double x) {
  if (std::abs(x) < 0.1) {
    // Horner on sum_{k>=2} (k-1) x^k / k!
    double term = x * x / 2.0;  // x^k / k! at k = 2
    double sum = 0.0;
    for (int k = 2; k < 20; ++k) {
      sum += static_cast<double>(k - 1) * term;
      term *= x / static_cast<double>(k + 1);
    }
    return sum;
  }
  return x * std::exp(x) - std::expm1(x);
}

}  // namespace gmdiv
