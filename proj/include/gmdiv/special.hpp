#pragma once

#include <cstddef>
#include <vector>

namespace gmdiv {

/// P[Z > t] for Z ~ N(0, 1).
double normal_tail(double t);
double normal_cdf(double t);

/// P[|Z| > t] for Z ~ N(0, I_d); equals 1 for t <= 0.
double chi_tail(std::size_t d, double t);

/// Surface area of the unit sphere in R^d (2 for d = 1).
double sphere_area(std::size_t d);

/// -(d/2) log(2 pi).
double log_gaussian_norm(std::size_t d);

/// Coefficients c_0 + c_1 t + ... in increasing degree.
using Polynomial = std::vector<double>;

Polynomial poly_multiply(const Polynomial& a, const Polynomial& b);
/// (t + shift)^k expanded in t.
Polynomial poly_shifted_power(double shift, std::size_t k);

/// log of  int_{t0}^inf poly(t) exp(-t^2/2) dt.  The integrand must be
/// non-negative on [t0, inf); the result is -inf when the integral is 0.
double log_gaussian_poly_tail(const Polynomial& poly, double t0);

/// Stable x e^x - (e^x - 1) = sum_{k>=2} (k-1) x^k / k!, i.e. t log t - t + 1
/// at t = e^x.
double bregman_exp(double x);

}  // namespace gmdiv
