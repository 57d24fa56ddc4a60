#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "json.hpp"
#include "gmdiv/bounds.hpp"
#include "gmdiv/mixture.hpp"

namespace gmdiv {

/// Random atomic mixing distribution in the class.
///
/// Atom count is uniform on {1, ..., max_atoms}, weights are a flat Dirichlet
/// draw. Compact(M) places atoms uniformly in the ball. Subgaussian(K) orders
/// atoms from the outside in and caps the k-th radius at K sqrt(2 log(1/W_k)),
/// W_k the weight of atoms 1..k, so the tail bound holds by construction (the
/// innermost atom lands at the origin).
MixingDistribution random_mixing(const ClassTag& cls, std::size_t d, std::mt19937_64& rng,
                                 std::size_t max_atoms = 8);

struct SweepSpec {
  BoundId id = BoundId::Thm1;
  ClassTag cls = Compact{2.0};
  std::size_t d = 1;
  std::size_t n = 100;
  std::uint64_t seed = 1;
  double tol = 0.0;  // <= 0 picks default_tolerance(d)
  std::size_t max_atoms = 8;
  double standard_q_fraction = 0.1;
};

struct SweepInstance {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::size_t atoms_p = 0;
  std::size_t atoms_q = 0;
  double lhs = 0.0;  // log domain for ChiSqThm
  double rhs = 0.0;
  double ratio = 0.0;
  double slack = 0.0;
  bool pass = true;
  double kl = 0.0;
  double h2 = 0.0;
  double chisq = 0.0;
  bool ordering_ok = true;
};

struct SweepReport {
  SweepSpec spec;
  std::vector<SweepInstance> instances;
  double max_ratio = 0.0;
  std::size_t argmax_index = 0;
  std::size_t failures = 0;
  std::size_t ordering_failures = 0;
  bool log_domain = false;
};

/// Draws spec.n seeded pairs from the class and checks lhs <= rhs + slack with
/// slack = 2 (sum of truncation bounds) + 1e-9. Every instance also records
/// KL, H2 and chi^2 and checks KL >= H2 and chi^2 >= KL. Instances run in
/// parallel; instance i uses derive_seed(seed, i).
///
/// Bounds: Thm1, Thm2, ChiSqThm, TVfromL2, HO need Compact; Thm3 and Thm5
/// need Subgaussian; L2fromTV takes either. HO uses delta = exp(-12 M^2) H2
/// and lambda = 3.
SweepReport verify_sweep(const SweepSpec& spec);

void write_sweep_csv(std::ostream& out, const SweepReport& report);
nlohmann::json sweep_summary(const SweepReport& report);

struct DichotomyRow {
  double K;
  double r;
  double kl;
  double h2;
  double kl_lb;
  double h2_ub;
  double ratio;  // kl / h2
  double kl_truncation;
  double h2_truncation;
};

/// KL(f_{pi_r} || N(0,1)) and H2 on an r-grid, each integrated to h_r * rel_tol.
std::vector<DichotomyRow> dichotomy_experiment(double K, const std::vector<double>& rs,
                                               double rel_tol = 1e-6);

void write_dichotomy_csv(std::ostream& out, const std::vector<DichotomyRow>& rows);

}  // namespace gmdiv
