#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "gmdiv/mixture.hpp"

namespace gmdiv {

enum class DivergenceKind { KL, HellingerSq, ChiSq, TV, L2Sq };

inline constexpr std::array<DivergenceKind, 5> kAllDivergenceKinds = {
    DivergenceKind::KL, DivergenceKind::HellingerSq, DivergenceKind::ChiSq, DivergenceKind::TV,
    DivergenceKind::L2Sq};

std::string_view to_string(DivergenceKind kind);
DivergenceKind parse_divergence_kind(std::string_view name);

enum class IntegrationMethod { Quadrature, MonteCarlo };

/// An integral over a ball together with what was left out of it.
///
/// `truncation_bound` bounds the contribution of the integrand outside the
/// ball of radius `domain_radius`. `quadrature_error` is the final
/// Kronrod-Gauss difference inside the ball. Monte Carlo estimates (d > 3)
/// carry a 95% half-width instead and report an infinite domain.
struct IntegralEstimate {
  double value = 0.0;
  double truncation_bound = 0.0;
  double domain_radius = 0.0;
  std::size_t quadrature_points = 0;
  double quadrature_error = 0.0;
  IntegrationMethod method = IntegrationMethod::Quadrature;
  double mc_half_width = 0.0;
};

struct DivergenceOptions {
  double tol = 0.0;         // <= 0 picks default_tolerance(d)
  double min_radius = 0.0;  // integrate over at least this ball
  std::uint64_t mc_seed = 0x6d69787475726573ULL;
  std::size_t mc_samples = 200000;
};

/// 1e-8 for d = 1, 1e-6 otherwise.
double default_tolerance(std::size_t d);

/// Radius R such that any mixture of the class keeps mass <= tol outside |x| <= R.
///
/// Compact(M), d = 1: R = M + sqrt(2 ln(2 / tol)).  d >= 2: M plus the
/// inverse chi tail at tol.  Subgaussian(K) splits tol between the atom tail
/// and the noise tail.  Unconstrained has no certificate.
double truncation_radius(const ClassTag& cls, std::size_t d, double tol);

/// Certified integral of the selected divergence.
///
/// d = 1 uses adaptive Gauss-Kronrod on [-R, R]; d = 2, 3 integrate in polar
/// coordinates (adaptive radial rule over a refined angular rule). Larger d
/// falls back to importance sampling from (p + q) / 2.
IntegralEstimate divergence(DivergenceKind kind, const GaussianMixture& p,
                            const GaussianMixture& q, const DivergenceOptions& opts = {});
IntegralEstimate divergence(DivergenceKind kind, const GaussianMixture& p,
                            const GaussianMixture& q, double tol);

/// int p^lambda / q^(lambda - 1), lambda > 1.
IntegralEstimate renyi_integral(const GaussianMixture& p, const GaussianMixture& q, double lambda,
                                const DivergenceOptions& opts = {});
IntegralEstimate renyi_integral(const GaussianMixture& p, const GaussianMixture& q, double lambda,
                                double tol);

/// sqrt of the squared Hellinger distance.
double hellinger_distance(const GaussianMixture& p, const GaussianMixture& q, double tol = 0.0);

/// E exp(i t X) for X ~ gm; d = 1 only.
std::complex<double> characteristic_function(const GaussianMixture& gm, double t);

/// |p - q|_2^2 through the characteristic functions:
/// (1 / 2pi) int |Psi_p - Psi_q|^2 dt, truncated where 4 e^{-t^2} drops below tol.
double plancherel_l2(const GaussianMixture& p, const GaussianMixture& q, double tol = 0.0);

}  // namespace gmdiv
