#include "gmdiv/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gmdiv/errors.hpp"
#include "gmdiv/quadrature.hpp"
#include "gmdiv/special.hpp"

namespace gmdiv {

std::string_view to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::KL: return "KL";
    case DivergenceKind::HellingerSq: return "HellingerSq";
    case DivergenceKind::ChiSq: return "ChiSq";
    case DivergenceKind::TV: return "TV";
    case DivergenceKind::L2Sq: return "L2Sq";
  }
  return "?";
}

DivergenceKind parse_divergence_kind(std::string_view name) {
  for (auto kind : kAllDivergenceKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw InputError("unknown divergence kind '" + std::string(name) + "'");
}

double default_tolerance(std::size_t d) { return d == 1 ? 1e-8 : 1e-6; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest t with chi_tail(d, t) <= tol.
double chi_quantile(std::size_t d, double tol) {
  double lo = 0.0;
  double hi = 1.0;
  while (chi_tail(d, hi) > tol) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi_tail(d, mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

enum class Form { KL, Hellinger, ChiSq, TV, L2, Renyi };

Form form_of(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::KL: return Form::KL;
    case DivergenceKind::HellingerSq: return Form::Hellinger;
    case DivergenceKind::ChiSq: return Form::ChiSq;
    case DivergenceKind::TV: return Form::TV;
    case DivergenceKind::L2Sq: return Form::L2;
  }
  return Form::KL;
}

// Pointwise integrand as a function of the two log-densities. Every form is
// non-negative.
struct Integrand {
  Form form;
  double lambda = 3.0;

  double operator()(double lp, double lq) const {
    if (lp == -kInf && lq == -kInf) return 0.0;
    const double delta = lp - lq;
    const double top = std::max(lp, lq);
    const double gap = std::abs(delta);
    switch (form) {
      case Form::KL:
        // p log(p/q) - p + q = q * (t log t - t + 1), t = p/q
        if (gap < 0.1) return std::exp(lq) * bregman_exp(delta);
        return std::exp(lp) * (delta - 1.0) + std::exp(lq);
      case Form::Hellinger: {
        const double e = std::expm1(-0.5 * gap);
        return std::exp(top) * e * e;
      }
      case Form::ChiSq: {
        if (delta > 30.0) {
          const double tail = -std::expm1(-delta);
          return std::exp(2.0 * lp - lq) * tail * tail;
        }
        const double e = std::expm1(delta);
        return std::exp(lq) * e * e;
      }
      case Form::TV: return 0.5 * std::exp(top) * -std::expm1(-gap);
      case Form::L2: {
        const double diff = std::exp(top) * -std::expm1(-gap);
        return diff * diff;
      }
      case Form::Renyi: return std::exp(lambda * lp - (lambda - 1.0) * lq);
    }
    return 0.0;
  }
};

double mass_outside(const GaussianMixture& gm, double R) {
  const std::size_t d = gm.dim();
  const auto& loc = gm.locations();
  const auto& lw = gm.log_weights();
  double total = 0.0;
  for (std::size_t j = 0; j < lw.size(); ++j) {
    const double w = std::exp(lw[j]);
    if (d == 1) {
      const double a = loc[j];
      total += w * (normal_tail(R - a) + normal_tail(R + a));
    } else {
      double sq = 0.0;
      for (std::size_t i = 0; i < d; ++i) sq += loc[j * d + i] * loc[j * d + i];
      total += w * chi_tail(d, R - std::sqrt(sq));
    }
  }
  return total;
}

// Bound on the integral of the integrand over |x| > R. Requires R > M, with M
// the largest atom norm of p and q.
double tail_bound(const Integrand& g, const GaussianMixture& p, const GaussianMixture& q,
                  double R, double M) {
  const std::size_t d = p.dim();
  const double surface = sphere_area(d);
  const double norm = std::exp(log_gaussian_norm(d));
  switch (g.form) {
    case Form::Hellinger: return mass_outside(p, R) + mass_outside(q, R);
    case Form::TV: return 0.5 * (mass_outside(p, R) + mass_outside(q, R));
    case Form::L2: {
      const double peak = norm * std::exp(-0.5 * (R - M) * (R - M));
      return peak * (mass_outside(p, R) + mass_outside(q, R));
    }
    case Form::KL: {
      // p log(p/q) - p + q <= p |log(p/q)| + q on the tail. Densities decay
      // like p(R w) exp(-((s-M)^2 - (R-M)^2)/2) along rays and the score
      // bound 3|x| + 4M gives |log(p/q)|(s) <= L_R + (s-R)(3s + 3R + 8M).
      const double t0 = R - M;
      const double c = 3.0 * R + 11.0 * M;  // (s-R)(3s+3R+8M) = (t-t0)(3t+c), t = s-M
      auto envelope = [&](double p_factor, double q_factor, double log_ratio) {
        return Polynomial{p_factor * (log_ratio - c * t0) + q_factor,
                          p_factor * (c - 3.0 * t0), 3.0 * p_factor};
      };
      if (d == 1) {
        double total = 0.0;
        for (double side : {-1.0, 1.0}) {
          const double x = side * R;
          const double lp = p.log_density_unchecked(&x);
          const double lq = q.log_density_unchecked(&x);
          const double shift = 0.5 * t0 * t0;
          const auto poly = envelope(std::exp(lp + shift), std::exp(lq + shift), std::abs(lp - lq));
          total += std::exp(log_gaussian_poly_tail(poly, t0));
        }
        return total;
      }
      // Sup bounds on the sphere: p(R w) <= phi_d(R - M), |log(p/q)(R w)| <= 2MR.
      auto poly = envelope(norm, norm, 2.0 * M * R);
      poly = poly_multiply(poly, poly_shifted_power(M, d - 1));
      for (double& coef : poly) coef *= surface;
      return std::exp(log_gaussian_poly_tail(poly, t0));
    }
    case Form::ChiSq: {
      // p^2/q <= phi_d(s-M)^2 / phi_d(s+M) = (2pi)^{-d/2} e^{4M^2} e^{-(s-3M)^2/2}
      auto poly = poly_shifted_power(3.0 * M, d - 1);
      for (double& coef : poly) coef *= surface * norm;
      const double log_tail = 4.0 * M * M + log_gaussian_poly_tail(poly, R - 3.0 * M);
      return std::exp(log_tail) + mass_outside(q, R);
    }
    case Form::Renyi: {
      // p^l / q^(l-1) <= (2pi)^{-d/2} e^{2l(l-1)M^2} e^{-(s-(2l-1)M)^2/2}
      const double lam = g.lambda;
      const double center = (2.0 * lam - 1.0) * M;
      auto poly = poly_shifted_power(center, d - 1);
      for (double& coef : poly) coef *= surface * norm;
      return std::exp(2.0 * lam * (lam - 1.0) * M * M + log_gaussian_poly_tail(poly, R - center));
    }
  }
  return kInf;
}

void check_pair(const GaussianMixture& p, const GaussianMixture& q) {
  if (p.dim() != q.dim()) {
    throw InputError("divergence: dimension mismatch (" + std::to_string(p.dim()) + " vs " +
                     std::to_string(q.dim()) + ")");
  }
  for (const auto* gm : {&p, &q}) {
    if (std::holds_alternative<Unconstrained>(gm->mixing().class_tag())) {
      throw CapabilityError(
          "divergence: an Unconstrained mixture has no certifiable tail; tag it Compact or "
          "Subgaussian");
    }
  }
}

std::vector<double> unit_breakpoints(double lo, double hi) {
  std::vector<double> bp;
  const auto pieces = static_cast<std::size_t>(std::ceil(hi - lo));
  for (std::size_t i = 0; i <= pieces; ++i) {
    bp.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pieces));
  }
  return bp;
}

// Roots of log p - log q on [-R, R], located on a 0.05 grid then bisected.
std::vector<double> crossings(const GaussianMixture& p, const GaussianMixture& q, double R) {
  auto delta = [&](double x) { return p.log_density_unchecked(&x) - q.log_density_unchecked(&x); };
  std::vector<double> roots;
  const auto steps = static_cast<std::size_t>(std::ceil(2.0 * R / 0.05));
  double x0 = -R;
  double f0 = delta(x0);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double x1 = -R + 2.0 * R * static_cast<double>(i) / static_cast<double>(steps);
    const double f1 = delta(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0;
      double hi = x1;
      double flo = f0;
      for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = delta(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// Trapezoid on the circle of radius s, doubling until two levels agree.
double circle_average(const Integrand& g, const GaussianMixture& p, const GaussianMixture& q,
                      double s, double abs_floor, std::size_t& evals) {
  auto at = [&](double theta) {
    const double x[2] = {s * std::cos(theta), s * std::sin(theta)};
    ++evals;
    return g(p.log_density_unchecked(x), q.log_density_unchecked(x));
  };
  std::size_t n = 64;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += at(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  double estimate = 2.0 * std::numbers::pi * sum / static_cast<double>(n);
  while (n < 4096) {
    double mid = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      mid += at(std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n));
    }
    sum += mid;
    n *= 2;
    const double refined = 2.0 * std::numbers::pi * sum / static_cast<double>(n);
    const bool done = std::abs(refined - estimate) <= std::max(1e-11 * std::abs(refined), abs_floor);
    estimate = refined;
    if (done) break;
  }
  return estimate;
}

// Gauss-Legendre in cos(polar) times trapezoid in azimuth on the sphere of radius s.
double sphere_integral(const Integrand& g, const GaussianMixture& p, const GaussianMixture& q,
                       double s, double abs_floor, std::size_t& evals) {
  auto level = [&](std::size_t n) {
    const auto& rule = gauss_legendre(n);
    const std::size_t m = 2 * n;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = rule.nodes[i];
      const double rho = s * std::sqrt(std::max(0.0, 1.0 - mu * mu));
      double ring = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        const double x[3] = {rho * std::cos(phi), rho * std::sin(phi), s * mu};
        ring += g(p.log_density_unchecked(x), q.log_density_unchecked(x));
      }
      evals += m;
      total += rule.weights[i] * ring * 2.0 * std::numbers::pi / static_cast<double>(m);
    }
    return total;
  };
  double estimate = level(16);
  for (std::size_t n = 32; n <= 128; n *= 2) {
    const double refined = level(n);
    const bool done = std::abs(refined - estimate) <= std::max(1e-11 * std::abs(refined), abs_floor);
    estimate = refined;
    if (done) break;
  }
  return estimate;
}

IntegralEstimate monte_carlo(const Integrand& g, const GaussianMixture& p, const GaussianMixture& q,
                             const DivergenceOptions& opts) {
  const std::size_t d = p.dim();
  std::mt19937_64 rng(opts.mc_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto picker = [](const GaussianMixture& gm) {
    std::vector<double> w;
    for (const auto& a : gm.mixing().atoms()) w.push_back(a.weight);
    return std::discrete_distribution<std::size_t>(w.begin(), w.end());
  };
  auto pick_p = picker(p);
  auto pick_q = picker(q);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x(d);
  double mean = 0.0;
  double m2 = 0.0;
  const std::size_t n = std::max<std::size_t>(opts.mc_samples, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const GaussianMixture& src = coin(rng) ? p : q;
    const std::size_t j = (&src == &p) ? pick_p(rng) : pick_q(rng);
    for (std::size_t k = 0; k < d; ++k) x[k] = src.locations()[j * d + k] + noise(rng);
    const double lp = p.log_density_unchecked(x.data());
    const double lq = q.log_density_unchecked(x.data());
    const double top = std::max(lp, lq);
    const double lm = top + std::log1p(std::exp(-std::abs(lp - lq))) - std::log(2.0);
    const double v = g(lp, lq) * std::exp(-lm);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  IntegralEstimate est;
  est.value = mean;
  est.method = IntegrationMethod::MonteCarlo;
  est.domain_radius = kInf;
  est.quadrature_points = n;
  est.mc_half_width = 1.96 * std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return est;
}

IntegralEstimate integrate_certified(const Integrand& g, const GaussianMixture& p,
                                     const GaussianMixture& q, const DivergenceOptions& opts) {
  check_pair(p, q);
  const std::size_t d = p.dim();
  const double tol = opts.tol > 0.0 ? opts.tol : default_tolerance(d);
  if (d > 3) return monte_carlo(g, p, q, opts);

  const double M = std::max(p.support_radius(), q.support_radius());
  double R = std::max({truncation_radius(Compact{M}, d, std::min(0.25 * tol, 0.5)), M + 1.0,
                       opts.min_radius});
  double tail = tail_bound(g, p, q, R, M);
  while (tail > 0.5 * tol && R < M + 400.0) {
    R += 0.5;
    tail = tail_bound(g, p, q, R, M);
  }

  IntegralEstimate est;
  est.domain_radius = R;
  est.truncation_bound = tail;
  const AdaptiveOptions quad{0.5 * tol, 0.5 * tol, 20000};

  if (d == 1) {
    auto bp = unit_breakpoints(-R, R);
    if (g.form == Form::TV) {
      const auto roots = crossings(p, q, R);
      bp.insert(bp.end(), roots.begin(), roots.end());
      std::sort(bp.begin(), bp.end());
    }
    auto f = [&](double x) { return g(p.log_density_unchecked(&x), q.log_density_unchecked(&x)); };
    const auto res = integrate_adaptive(f, bp, quad);
    est.value = res.value;
    est.quadrature_error = res.error;
    est.quadrature_points = res.evaluations;
    return est;
  }

  const double abs_floor = 1e-3 * tol / std::pow(R, static_cast<double>(d));
  std::size_t evals = 0;
  auto radial = [&](double s) {
    if (d == 2) return s * circle_average(g, p, q, s, abs_floor, evals);
    return s * s * sphere_integral(g, p, q, s, abs_floor, evals);
  };
  const auto bp = unit_breakpoints(0.0, R);
  const auto res = integrate_adaptive(radial, bp, quad);
  est.value = res.value;
  est.quadrature_error = res.error;
  est.quadrature_points = evals;
  return est;
}

}  // namespace

double truncation_radius(const ClassTag& cls, std::size_t d, double tol) {
  if (!(tol > 0.0) || !(tol < 1.0)) throw DomainError("truncation_radius: tol must lie in (0, 1)");
  if (d == 0) throw InputError("truncation_radius: dimension must be positive");
  if (const auto* c = std::get_if<Compact>(&cls)) {
    if (d == 1) return c->M + std::sqrt(2.0 * std::log(2.0 / tol));
    return c->M + chi_quantile(d, tol);
  }
  if (const auto* s = std::get_if<Subgaussian>(&cls)) {
    const double atom_radius = s->K * std::sqrt(2.0 * std::log(2.0 / tol));
    return atom_radius + chi_quantile(d, 0.5 * tol);
  }
  throw CapabilityError("truncation_radius: Unconstrained class has no certifiable tail");
}

IntegralEstimate divergence(DivergenceKind kind, const GaussianMixture& p,
                            const GaussianMixture& q, const DivergenceOptions& opts) {
  return integrate_certified(Integrand{form_of(kind)}, p, q, opts);
}

IntegralEstimate divergence(DivergenceKind kind, const GaussianMixture& p,
                            const GaussianMixture& q, double tol) {
  DivergenceOptions opts;
  opts.tol = tol;
  return divergence(kind, p, q, opts);
}

IntegralEstimate renyi_integral(const GaussianMixture& p, const GaussianMixture& q, double lambda,
                                const DivergenceOptions& opts) {
  if (!(lambda > 1.0)) throw DomainError("renyi_integral: lambda must exceed 1");
  return integrate_certified(Integrand{Form::Renyi, lambda}, p, q, opts);
}

IntegralEstimate renyi_integral(const GaussianMixture& p, const GaussianMixture& q, double lambda,
                                double tol) {
  DivergenceOptions opts;
  opts.tol = tol;
  return renyi_integral(p, q, lambda, opts);
}

double hellinger_distance(const GaussianMixture& p, const GaussianMixture& q, double tol) {
  DivergenceOptions opts;
  opts.tol = tol;
  return std::sqrt(std::max(0.0, divergence(DivergenceKind::HellingerSq, p, q, opts).value));
}

std::complex<double> characteristic_function(const GaussianMixture& gm, double t) {
  if (gm.dim() != 1) throw CapabilityError("characteristic_function: only d = 1 is supported");
  std::complex<double> acc = 0.0;
  const auto& loc = gm.locations();
  const auto& lw = gm.log_weights();
  for (std::size_t j = 0; j < lw.size(); ++j) acc += std::exp(lw[j]) * std::polar(1.0, t * loc[j]);
  return acc * std::exp(-0.5 * t * t);
}

double plancherel_l2(const GaussianMixture& p, const GaussianMixture& q, double tol) {
  if (p.dim() != 1 || q.dim() != 1) throw CapabilityError("plancherel_l2: only d = 1 is supported");
  if (!(tol > 0.0)) tol = default_tolerance(1);
  // |Psi_p - Psi_q|^2 <= 4 e^{-t^2}; (1/pi) int_T^inf 4 e^{-t^2} = (2/sqrt(pi)) erfc(T).
  double T = 1.0;
  while (2.0 / std::sqrt(std::numbers::pi) * std::erfc(T) > 0.5 * tol) T += 0.5;

  std::vector<double> coef;
  std::vector<double> loc;
  for (const auto& a : p.mixing().atoms()) {
    coef.push_back(a.weight);
    loc.push_back(a.location[0]);
  }
  for (const auto& a : q.mixing().atoms()) {
    coef.push_back(-a.weight);
    loc.push_back(a.location[0]);
  }
  auto integrand = [&](double t) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) {
      re += coef[j] * std::cos(t * loc[j]);
      im += coef[j] * std::sin(t * loc[j]);
    }
    return std::exp(-t * t) * (re * re + im * im) / std::numbers::pi;
  };
  const auto bp = unit_breakpoints(0.0, T);
  return integrate_adaptive(integrand, bp, AdaptiveOptions{0.5 * tol, 0.5 * tol, 20000}).value;
}

}  // namespace gmdiv
