#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gmdiv {

using Point = std::vector<double>;

/// Atoms lie in the closed Euclidean ball of radius M.
struct Compact {
  double M;
};

/// P[|X| > t] <= exp(-t^2 / (2 K^2)) for every t >= 0.
struct Subgaussian {
  double K;
};

struct Unconstrained {};

using ClassTag = std::variant<Compact, Subgaussian, Unconstrained>;

std::string class_name(const ClassTag& tag);

struct Atom {
  Point location;
  double weight;
};

/// Finite atomic mixing distribution on R^d.
///
/// Weights must sum to one within 1e-12; they are renormalised when the
/// deviation is below that and rejected otherwise. The class tag is checked
/// against the atoms on construction.
class MixingDistribution {
 public:
  MixingDistribution(std::size_t dim, std::vector<Atom> atoms,
                     ClassTag tag = Unconstrained{});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const ClassTag& class_tag() const { return tag_; }

  /// Largest atom norm.
  double max_radius() const { return max_radius_; }

 private:
  std::size_t dim_;
  std::vector<Atom> atoms_;
  ClassTag tag_;
  double max_radius_ = 0.0;
};

/// True iff the step-function tail of `m` sits below exp(-t^2/(2K^2)).
/// Checked just inside each atom radius, which is exact for a finite law.
bool subgaussian_check(const MixingDistribution& m, double K);

/// The mixing distribution convolved with N(0, I_d).
class GaussianMixture {
 public:
  explicit GaussianMixture(MixingDistribution mixing);

  const MixingDistribution& mixing() const { return mixing_; }
  std::size_t dim() const { return mixing_.dim(); }
  std::size_t size() const { return mixing_.size(); }
  double support_radius() const { return mixing_.max_radius(); }

  double log_density(std::span<const double> x) const;
  Point score(std::span<const double> x) const;
  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const;

  // Hot path for the integrators: no dimension check, x has dim() entries.
  double log_density_unchecked(const double* x) const;

  // Weighted atom locations, row-major.
  const std::vector<double>& locations() const { return locations_; }
  const std::vector<double>& log_weights() const { return log_weights_; }

 private:
  MixingDistribution mixing_;
  std::vector<double> locations_;
  std::vector<double> log_weights_;
  double log_norm_;
};

double log_density(const GaussianMixture& gm, std::span<const double> x);
Point score(const GaussianMixture& gm, std::span<const double> x);
std::vector<Point> sample(const GaussianMixture& gm, std::size_t n, std::uint64_t seed);

/// N(u, I) tagged Compact(|u|).
GaussianMixture point_mass(Point u);
GaussianMixture standard_gaussian(std::size_t dim);

struct DichotomyParams {
  double K;
  double r;
  double h_r;

  static DichotomyParams make(double K, double r);
};

/// (1 - h_r) delta_0 + h_r delta_r with h_r = exp(-r^2 / (2K^2)), tagged Subgaussian(K).
MixingDistribution dichotomy_family(double K, double r);

}  // namespace gmdiv
