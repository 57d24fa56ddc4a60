#include "gmdiv/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "gmdiv/errors.hpp"

namespace gmdiv {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kRelativeSlack = 1e-12;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::string class_name(const ClassTag& tag) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* c = std::get_if<Compact>(&tag)) {
    os << "Compact(" << c->M << ")";
  } else if (const auto* s = std::get_if<Subgaussian>(&tag)) {
    os << "Subgaussian(" << s->K << ")";
  } else {
    os << "Unconstrained";
  }
  return os.str();
}

MixingDistribution::MixingDistribution(std::size_t dim, std::vector<Atom> atoms, ClassTag tag)
    : dim_(dim), atoms_(std::move(atoms)), tag_(tag) {
  if (dim_ == 0) throw InputError("mixing distribution: dim must be positive");
  if (atoms_.empty()) throw InputError("mixing distribution: needs at least one atom");

  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.location.size() != dim_) {
      throw InputError("mixing distribution: atom location has length " +
                       std::to_string(a.location.size()) + ", expected " + std::to_string(dim_));
    }
    for (double x : a.location) {
      if (!std::isfinite(x)) throw InputError("mixing distribution: non-finite atom location");
    }
    if (!(a.weight > 0.0) || a.weight > 1.0 + kWeightTolerance) {
      throw InputError("mixing distribution: weights must lie in (0, 1]");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "mixing distribution: weights sum to " << total << ", not 1";
    throw InputError(os.str());
  }
  for (auto& a : atoms_) a.weight /= total;

  for (const auto& a : atoms_) max_radius_ = std::max(max_radius_, norm2(a.location));

  if (const auto* c = std::get_if<Compact>(&tag_)) {
    if (!(c->M >= 0.0) || !std::isfinite(c->M)) throw InputError("Compact class needs M >= 0");
    if (max_radius_ > c->M * (1.0 + kRelativeSlack)) {
      std::ostringstream os;
      os.precision(17);
      os << "atom at radius " << max_radius_ << " lies outside Compact(" << c->M << ")";
      throw InputError(os.str());
    }
  } else if (const auto* s = std::get_if<Subgaussian>(&tag_)) {
    if (!(s->K > 0.0) || !std::isfinite(s->K)) throw InputError("Subgaussian class needs K > 0");
    if (!subgaussian_check(*this, s->K)) {
      throw InputError("atoms violate the tail bound of " + class_name(tag_));
    }
  }
}

bool subgaussian_check(const MixingDistribution& m, double K) {
  if (!(K > 0.0)) throw DomainError("subgaussian_check needs K > 0");
  std::vector<std::pair<double, double>> radial;  // (radius, weight)
  radial.reserve(m.size());
  for (const auto& a : m.atoms()) radial.emplace_back(norm2(a.location), a.weight);
  std::sort(radial.begin(), radial.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });

  // Walk outward-in; the tail just inside radius t counts every atom at radius >= t.
  double tail = 0.0;
  for (std::size_t i = 0; i < radial.size();) {
    const double t = radial[i].first;
    while (i < radial.size() && radial[i].first == t) tail += radial[i++].second;
    if (t <= 0.0) break;
    const double bound = std::exp(-t * t / (2.0 * K * K));
    if (tail > bound * (1.0 + kRelativeSlack)) return false;
  }
  return true;
}

GaussianMixture::GaussianMixture(MixingDistribution mixing)
    : mixing_(std::move(mixing)),
      log_norm_(-0.5 * static_cast<double>(mixing_.dim()) * std::log(2.0 * std::numbers::pi)) {
  locations_.reserve(mixing_.size() * mixing_.dim());
  log_weights_.reserve(mixing_.size());
  for (const auto& a : mixing_.atoms()) {
    locations_.insert(locations_.end(), a.location.begin(), a.location.end());
    log_weights_.push_back(std::log(a.weight));
  }
}

double GaussianMixture::log_density_unchecked(const double* x) const {
  const std::size_t d = dim();
  const std::size_t k = log_weights_.size();
  // Single pass log-sum-exp; a strictly larger term moves the shift, so the
  // first maximal term wins ties.
  double shift = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  const double* loc = locations_.data();
  for (std::size_t j = 0; j < k; ++j, loc += d) {
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = x[i] - loc[i];
      sq += diff * diff;
    }
    const double term = log_weights_[j] - 0.5 * sq;
    if (term > shift) {
      acc = acc * std::exp(shift - term) + 1.0;
      shift = term;
    } else {
      acc += std::exp(term - shift);
    }
  }
  return log_norm_ + shift + std::log(acc);
}

double GaussianMixture::log_density(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw InputError("log_density: point has length " + std::to_string(x.size()) +
                     ", mixture dimension is " + std::to_string(dim()));
  }
  return log_density_unchecked(x.data());
}

Point GaussianMixture::score(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw InputError("score: point has length " + std::to_string(x.size()) +
                     ", mixture dimension is " + std::to_string(dim()));
  }
  const std::size_t d = dim();
  const std::size_t k = log_weights_.size();
  std::vector<double> terms(k);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = x[i] - locations_[j * d + i];
      sq += diff * diff;
    }
    terms[j] = log_weights_[j] - 0.5 * sq;
    if (terms[j] > shift) shift = terms[j];
  }
  Point grad(d, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double r = std::exp(terms[j] - shift);
    total += r;
    for (std::size_t i = 0; i < d; ++i) grad[i] += r * (locations_[j * d + i] - x[i]);
  }
  for (double& g : grad) g /= total;
  return grad;
}

std::vector<Point> GaussianMixture::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) throw InputError("sample: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  weights.reserve(size());
  for (const auto& a : mixing_.atoms()) weights.push_back(a.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> noise(0.0, 1.0);

  const std::size_t d = dim();
  std::vector<Point> out(n, Point(d));
  for (auto& x : out) {
    const std::size_t j = pick(rng);
    for (std::size_t i = 0; i < d; ++i) x[i] = locations_[j * d + i] + noise(rng);
  }
  return out;
}

double log_density(const GaussianMixture& gm, std::span<const double> x) {
  return gm.log_density(x);
}

Point score(const GaussianMixture& gm, std::span<const double> x) { return gm.score(x); }

std::vector<Point> sample(const GaussianMixture& gm, std::size_t n, std::uint64_t seed) {
  return gm.sample(n, seed);
}

GaussianMixture point_mass(Point u) {
  const std::size_t d = u.size();
  const double radius = norm2(u);
  return GaussianMixture(MixingDistribution(d, {Atom{std::move(u), 1.0}}, Compact{radius}));
}

GaussianMixture standard_gaussian(std::size_t dim) { return point_mass(Point(dim, 0.0)); }

DichotomyParams DichotomyParams::make(double K, double r) {
  if (!(K > 1.0)) throw DomainError("dichotomy family requires K > 1");
  if (!(r > 1.0)) throw DomainError("dichotomy family requires r > 1");
  return {K, r, std::exp(-r * r / (2.0 * K * K))};
}

MixingDistribution dichotomy_family(double K, double r) {
  const auto params = DichotomyParams::make(K, r);
  return MixingDistribution(1, {Atom{{0.0}, 1.0 - params.h_r}, Atom{{r}, params.h_r}},
                            Subgaussian{K});
}

}  // namespace gmdiv
