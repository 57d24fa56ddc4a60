#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gmdiv/mixture.hpp"
#include "oracles.hpp"

namespace support {

inline gmdiv::GaussianMixture gauss(std::vector<double> u) { return gmdiv::point_mass(std::move(u)); }

inline gmdiv::GaussianMixture from_mix1(const oracle::Mix1& m, double M) {
  std::vector<gmdiv::Atom> atoms;
  for (const auto& a : m) atoms.push_back({{a.a}, a.w});
  return gmdiv::GaussianMixture(gmdiv::MixingDistribution(1, atoms, gmdiv::Compact{M}));
}

// Random 1-d mixture with up to max_atoms atoms in [-M, M].
inline oracle::Mix1 random_mix1(std::mt19937_64& rng, double M, int max_atoms = 5) {
  std::uniform_int_distribution<int> k(1, max_atoms);
  std::uniform_real_distribution<double> loc(-M, M);
  std::exponential_distribution<double> expo(1.0);
  const int n = k(rng);
  oracle::Mix1 m;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    m.push_back({loc(rng), expo(rng)});
    total += m.back().w;
  }
  for (auto& a : m) a.w /= total;
  return m;
}

inline gmdiv::GaussianMixture random_compact(std::mt19937_64& rng, std::size_t d, double M,
                                             int max_atoms = 5) {
  std::uniform_int_distribution<int> k(1, max_atoms);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = k(rng);
  std::vector<gmdiv::Atom> atoms;
  for (int i = 0; i < n; ++i) {
    std::vector<double> u(d);
    double sq = 0.0;
    for (double& x : u) {
      x = normal(rng);
      sq += x * x;
    }
    const double r = M * std::pow(unit(rng), 1.0 / static_cast<double>(d)) / std::sqrt(sq);
    for (double& x : u) x *= r;
    atoms.push_back({u, 1.0 / n});
  }
  return gmdiv::GaussianMixture(gmdiv::MixingDistribution(d, atoms, gmdiv::Compact{M}));
}

}  // namespace support
