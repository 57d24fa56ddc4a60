#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gmdiv/mixture.hpp"

namespace gmdiv {

enum class BoundId {
  Thm1,
  Thm2,
  Thm3,
  Thm5,
  ChiSqThm,
  TVfromL2,
  L2fromTV,
  HO,
  DichotomyKL_LB,
  DichotomyH2_UB,
  LemFormula
};

inline constexpr std::array<BoundId, 11> kAllBoundIds = {
    BoundId::Thm1,     BoundId::Thm2,     BoundId::Thm3,           BoundId::Thm5,
    BoundId::ChiSqThm, BoundId::TVfromL2, BoundId::L2fromTV,       BoundId::HO,
    BoundId::DichotomyKL_LB, BoundId::DichotomyH2_UB, BoundId::LemFormula};

std::string_view to_string(BoundId id);
BoundId parse_bound_id(std::string_view name);

/// Named inputs of a bound, e.g. {"M": 2, "d": 1, "H2": 0.1}.
using BoundParams = std::map<std::string, double>;

/// Symbols a bound takes, in a fixed order:
///   Thm1, ChiSqThm   M d H2       Thm2       M H2
///   Thm3             K d H2       Thm5       K H2
///   TVfromL2         M L2         L2fromTV   TV
///   HO               delta lambda H2 renyi
///   DichotomyKL_LB, DichotomyH2_UB   K r
///   LemFormula       t M
/// L2 and TV are distances (not squared); H2 is the squared Hellinger distance.
const std::vector<std::string>& bound_symbols(BoundId id);

/// Right-hand side as printed. Throws InputError when the symbol set differs
/// from bound_symbols(id) and DomainError when a hypothesis of the bound fails.
double bound_rhs(BoundId id, const BoundParams& params);

/// log of bound_rhs, computed without overflow (needed for ChiSqThm at large M).
/// Throws DomainError when the right-hand side is not positive.
double bound_log_rhs(BoundId id, const BoundParams& params);

/// 2 log(1/delta) / (1 - delta)^2 h2 + 4 delta log(1/delta) / (1 - delta)^2
///   + delta^((lambda - 1) / 2) renyi
///
/// Needs 0 < delta < exp(-1/2), lambda > 1 and
/// loglog(1/delta) / log(1/delta) <= (lambda - 1) / 2.
double ho_bound(double delta, double lambda, double h2, double renyi);

/// (1 + sqrt(1 + 1/K^2)) / 2, the root of lambda (lambda - 1) = 1 / (4 K^2).
double lambda_star(double K);

/// (h2 / 4)^max(8 / (lambda - 1)^2, 1).
double delta_star(double lambda, double h2);

struct DichotomyBounds {
  double kl_lb;  // (r^2/10 - r^2/(10 K^2) - 3/10) h_r
  double h2_ub;  // (2 + 2r) h_r
};

DichotomyBounds dichotomy_bounds(const DichotomyParams& params);

struct LemFormulaValues {
  double lhs;  // t log t - t + 1
  double rhs;  // 9 M^2 (sqrt(t) - 1)^2
  double g;    // lhs / (sqrt(t) - 1)^2, continued by its limit 2 at t = 1
};

/// Needs 0 <= t <= exp(8 M^2) and M >= 1.
LemFormulaValues lem_formula_gap(double t, double M);

/// Same with t given as log t (log_t = -inf means t = 0).
LemFormulaValues lem_formula_gap_log(double log_t, double M);

}  // namespace gmdiv
