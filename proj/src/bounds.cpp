#include "gmdiv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gmdiv/errors.hpp"
#include "gmdiv/special.hpp"

namespace gmdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

[[noreturn]] void violated(BoundId id, const std::string& what) {
  throw DomainError(std::string(to_string(id)) + ": hypothesis violated: " + what);
}

void require(bool ok, BoundId id, const std::string& what) {
  if (!ok) violated(id, what);
}

struct Args {
  BoundId id;
  const BoundParams& params;

  double operator[](const std::string& name) const { return params.at(name); }
};

Args checked(BoundId id, const BoundParams& params) {
  const auto& symbols = bound_symbols(id);
  for (const auto& s : symbols) {
    if (!params.count(s)) {
      throw InputError(std::string(to_string(id)) + ": missing parameter '" + s + "'");
    }
    if (std::isnan(params.at(s))) {
      throw InputError(std::string(to_string(id)) + ": parameter '" + s + "' is NaN");
    }
  }
  for (const auto& [name, value] : params) {
    if (std::find(symbols.begin(), symbols.end(), name) == symbols.end()) {
      throw InputError(std::string(to_string(id)) + ": unexpected parameter '" + name + "'");
    }
  }
  return {id, params};
}

void require_h2(BoundId id, double h2, double upper = 2.0) {
  require(h2 > 0.0 && h2 <= upper, id, "H2 in (0, " + num(upper) + "], got " + num(h2));
}

void require_dim(BoundId id, double d) {
  require(d >= 1.0 && d == std::floor(d), id, "d a positive integer, got " + num(d));
}

// log(pre) + log(h2) style assembly for the products of positive factors.
struct LogRhs {
  double log_value;
  double sign = 1.0;
};

LogRhs evaluate_log(BoundId id, const BoundParams& params) {
  const Args a = checked(id, params);
  switch (id) {
    case BoundId::Thm1: {
      const double M = a["M"], d = a["d"], h2 = a["H2"];
      require(M >= 2.0, id, "M >= 2, got " + num(M));
      require_dim(id, d);
      require_h2(id, h2);
      return {std::log(5154.0) + std::log(std::max(M * M, d)) + std::log(h2)};
    }
    case BoundId::Thm2: {
      const double M = a["M"], h2 = a["H2"];
      require(M >= 1.0, id, "M >= 1, got " + num(M));
      require_h2(id, h2);
      const double v = 200.0 * M * M * h2 + 16.0 * h2 * std::log(1.0 / h2);
      return {std::log(std::abs(v)), v < 0.0 ? -1.0 : 1.0};
    }
    case BoundId::Thm3: {
      const double K = a["K"], d = a["d"], h2 = a["H2"];
      require(K > 0.0 && K < 1.0, id, "0 < K < 1, got " + num(K));
      require_dim(id, d);
      require_h2(id, h2);
      const double c = std::max(-3.0 * std::log1p(-K), std::log(8.0 * d * d * d));
      return {std::log(1660056.0) + c + std::log(h2)};
    }
    case BoundId::Thm5: {
      const double K = a["K"], h2 = a["H2"];
      require(K >= 0.0, id, "K >= 0, got " + num(K));
      require_h2(id, h2, 4.0);
      const double v = (10240.0 * K * K * K * K + 652.0) * h2 * std::log(4.0 / h2);
      return {v > 0.0 ? std::log(v) : -kInf};
    }
    case BoundId::ChiSqThm: {
      const double M = a["M"], d = a["d"], h2 = a["H2"];
      require(M >= 2.0, id, "M >= 2, got " + num(M));
      require_dim(id, d);
      require_h2(id, h2);
      return {std::log(2.0) + 50.0 * std::max(M * M, d) + std::log(h2)};
    }
    case BoundId::TVfromL2: {
      const double M = a["M"], l2 = a["L2"];
      require(M >= 1.0, id, "M >= 1, got " + num(M));
      require(l2 > 0.0 && l2 < 1.0, id, "L2 in (0, 1), got " + num(l2));
      const double factor = 8.0 * std::sqrt(M) + 2.0 * std::pow(std::log(1.0 / l2), 0.25);
      return {std::log(factor) + std::log(l2)};
    }
    case BoundId::L2fromTV: {
      const double tv = a["TV"];
      require(tv > 0.0 && tv <= 1.0, id, "TV in (0, 1], got " + num(tv));
      const double factor = std::max(std::pow(std::log(1.0 / tv), 0.25), 3.0);
      return {std::log(factor) + std::log(tv)};
    }
    case BoundId::HO: {
      const double v = ho_bound(a["delta"], a["lambda"], a["H2"], a["renyi"]);
      return {std::log(std::abs(v)), v < 0.0 ? -1.0 : 1.0};
    }
    case BoundId::DichotomyKL_LB:
    case BoundId::DichotomyH2_UB: {
      const double K = a["K"], r = a["r"];
      require(K > 1.0, id, "K > 1, got " + num(K));
      require(r > 1.0, id, "r > 1, got " + num(r));
      const auto b = dichotomy_bounds(DichotomyParams::make(K, r));
      const double v = id == BoundId::DichotomyKL_LB ? b.kl_lb : b.h2_ub;
      return {std::log(std::abs(v)), v < 0.0 ? -1.0 : 1.0};
    }
    case BoundId::LemFormula: {
      const double v = lem_formula_gap(a["t"], a["M"]).rhs;
      return {v > 0.0 ? std::log(v) : -kInf};
    }
  }
  return {-kInf};
}

}  // namespace

std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::Thm1: return "Thm1";
    case BoundId::Thm2: return "Thm2";
    case BoundId::Thm3: return "Thm3";
    case BoundId::Thm5: return "Thm5";
    case BoundId::ChiSqThm: return "ChiSqThm";
    case BoundId::TVfromL2: return "TVfromL2";
    case BoundId::L2fromTV: return "L2fromTV";
    case BoundId::HO: return "HO";
    case BoundId::DichotomyKL_LB: return "DichotomyKL_LB";
    case BoundId::DichotomyH2_UB: return "DichotomyH2_UB";
    case BoundId::LemFormula: return "LemFormula";
  }
  return "?";
}

BoundId parse_bound_id(std::string_view name) {
  for (auto id : kAllBoundIds) {
    if (to_string(id) == name) return id;
  }
  throw InputError("unknown bound id '" + std::string(name) + "'");
}

const std::vector<std::string>& bound_symbols(BoundId id) {
  static const std::vector<std::string> mdh{"M", "d", "H2"};
  static const std::vector<std::string> mh{"M", "H2"};
  static const std::vector<std::string> kdh{"K", "d", "H2"};
  static const std::vector<std::string> kh{"K", "H2"};
  static const std::vector<std::string> ml{"M", "L2"};
  static const std::vector<std::string> tv{"TV"};
  static const std::vector<std::string> ho{"delta", "lambda", "H2", "renyi"};
  static const std::vector<std::string> kr{"K", "r"};
  static const std::vector<std::string> tm{"t", "M"};
  switch (id) {
    case BoundId::Thm1:
    case BoundId::ChiSqThm: return mdh;
    case BoundId::Thm2: return mh;
    case BoundId::Thm3: return kdh;
    case BoundId::Thm5: return kh;
    case BoundId::TVfromL2: return ml;
    case BoundId::L2fromTV: return tv;
    case BoundId::HO: return ho;
    case BoundId::DichotomyKL_LB:
    case BoundId::DichotomyH2_UB: return kr;
    case BoundId::LemFormula: return tm;
  }
  return tv;
}

double bound_rhs(BoundId id, const BoundParams& params) {
  switch (id) {
    case BoundId::Thm5: {
      checked(id, params);
      const double K = params.at("K"), h2 = params.at("H2");
      require(K >= 0.0, id, "K >= 0, got " + num(K));
      require_h2(id, h2, 4.0);
      return (10240.0 * K * K * K * K + 652.0) * h2 * std::log(4.0 / h2);
    }
    case BoundId::Thm2: {
      checked(id, params);
      const double M = params.at("M"), h2 = params.at("H2");
      require(M >= 1.0, id, "M >= 1, got " + num(M));
      require_h2(id, h2);
      return 200.0 * M * M * h2 + 16.0 * h2 * std::log(1.0 / h2);
    }
    case BoundId::LemFormula: {
      checked(id, params);
      return lem_formula_gap(params.at("t"), params.at("M")).rhs;
    }
    default: {
      const auto v = evaluate_log(id, params);
      return v.sign * std::exp(v.log_value);
    }
  }
}

double bound_log_rhs(BoundId id, const BoundParams& params) {
  const auto v = evaluate_log(id, params);
  if (v.sign < 0.0 || v.log_value == -kInf) {
    throw DomainError(std::string(to_string(id)) + ": right-hand side is not positive");
  }
  return v.log_value;
}

double ho_bound(double delta, double lambda, double h2, double renyi) {
  const BoundId id = BoundId::HO;
  require(delta > 0.0 && delta < std::exp(-0.5), id, "0 < delta < exp(-1/2), got " + num(delta));
  require(lambda > 1.0, id, "lambda > 1, got " + num(lambda));
  require(h2 >= 0.0, id, "H2 >= 0, got " + num(h2));
  require(renyi >= 0.0, id, "renyi >= 0, got " + num(renyi));
  const double L = std::log(1.0 / delta);
  require(std::log(L) / L <= 0.5 * (lambda - 1.0), id,
          "loglog(1/delta) / log(1/delta) <= (lambda - 1) / 2");
  const double scale = 1.0 / ((1.0 - delta) * (1.0 - delta));
  return 2.0 * L * scale * h2 + 4.0 * delta * L * scale +
         std::pow(delta, 0.5 * (lambda - 1.0)) * renyi;
}

double lambda_star(double K) {
  if (!(K > 0.0)) throw DomainError("lambda_star: K > 0 required, got " + num(K));
  return 0.5 * (1.0 + std::sqrt(1.0 + 1.0 / (K * K)));
}

double delta_star(double lambda, double h2) {
  if (!(lambda > 1.0)) throw DomainError("delta_star: lambda > 1 required, got " + num(lambda));
  if (!(h2 > 0.0 && h2 <= 2.0)) throw DomainError("delta_star: H2 in (0, 2] required, got " + num(h2));
  const double exponent = std::max(8.0 / ((lambda - 1.0) * (lambda - 1.0)), 1.0);
  return std::pow(0.25 * h2, exponent);
}

DichotomyBounds dichotomy_bounds(const DichotomyParams& params) {
  const double K = params.K;
  const double r = params.r;
  if (!(K > 1.0)) throw DomainError("dichotomy bounds: K > 1 required, got " + num(K));
  if (!(r > 1.0)) throw DomainError("dichotomy bounds: r > 1 required, got " + num(r));
  const double r2 = r * r;
  return {(r2 / 10.0 - r2 / (10.0 * K * K) - 0.3) * params.h_r, (2.0 + 2.0 * r) * params.h_r};
}

LemFormulaValues lem_formula_gap_log(double log_t, double M) {
  const BoundId id = BoundId::LemFormula;
  require(M >= 1.0, id, "M >= 1, got " + num(M));
  require(!std::isnan(log_t) && log_t <= 8.0 * M * M, id, "0 <= t <= exp(8 M^2)");
  const double c = 9.0 * M * M;
  if (log_t == -kInf) return {1.0, c, 1.0};
  if (log_t == 0.0) return {0.0, 0.0, 2.0};
  const double root_gap = std::expm1(0.5 * log_t);
  const double sq = root_gap * root_gap;
  const double lhs = bregman_exp(log_t);
  return {lhs, c * sq, lhs / sq};
}

LemFormulaValues lem_formula_gap(double t, double M) {
  const BoundId id = BoundId::LemFormula;
  require(t >= 0.0, id, "t >= 0, got " + num(t));
  return lem_formula_gap_log(t == 0.0 ? -kInf : std::log(t), M);
}

}  // namespace gmdiv
