#include "gmdiv/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmdiv/divergence.hpp"
#include "gmdiv/errors.hpp"
#include "gmdiv/format.hpp"
#include "gmdiv/parallel.hpp"

namespace gmdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> dirichlet_flat(std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) {
    x = expo(rng);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

Point random_direction(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point u(d);
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& x : u) {
      x = normal(rng);
      sq += x * x;
    }
  } while (sq == 0.0);
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : u) x *= inv;
  return u;
}

double class_param(const ClassTag& cls) {
  if (const auto* c = std::get_if<Compact>(&cls)) return c->M;
  if (const auto* s = std::get_if<Subgaussian>(&cls)) return s->K;
  return 0.0;
}

std::string class_key(const ClassTag& cls) {
  if (std::holds_alternative<Compact>(cls)) return "compact";
  if (std::holds_alternative<Subgaussian>(cls)) return "subgaussian";
  return "unconstrained";
}

// Confirms up front that the sweep's class satisfies the bound's hypotheses.
void check_spec(const SweepSpec& spec) {
  if (spec.n == 0) throw InputError("sweep: n must be at least 1");
  if (spec.d == 0) throw InputError("sweep: d must be positive");
  if (spec.max_atoms == 0) throw InputError("sweep: max_atoms must be at least 1");
  const bool compact = std::holds_alternative<Compact>(spec.cls);
  const bool subgaussian = std::holds_alternative<Subgaussian>(spec.cls);
  const double param = class_param(spec.cls);
  const double d = static_cast<double>(spec.d);
  const std::string name(to_string(spec.id));
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw DomainError(name + ": hypothesis violated: " + what);
  };
  switch (spec.id) {
    case BoundId::Thm1:
    case BoundId::ChiSqThm:
      need(compact, "class Compact(M)");
      bound_rhs(spec.id, {{"M", param}, {"d", d}, {"H2", 1.0}});
      break;
    case BoundId::Thm2:
      need(compact, "class Compact(M)");
      bound_rhs(spec.id, {{"M", param}, {"H2", 1.0}});
      break;
    case BoundId::Thm3:
      need(subgaussian, "class Subgaussian(K)");
      bound_rhs(spec.id, {{"K", param}, {"d", d}, {"H2", 1.0}});
      break;
    case BoundId::Thm5:
      need(subgaussian, "class Subgaussian(K)");
      break;
    case BoundId::TVfromL2:
      need(compact, "class Compact(M)");
      need(spec.d == 1, "d = 1");
      bound_rhs(spec.id, {{"M", param}, {"L2", 0.5}});
      break;
    case BoundId::L2fromTV:
      need(compact || subgaussian, "class Compact(M) or Subgaussian(K)");
      need(spec.d == 1, "d = 1");
      break;
    case BoundId::HO:
      need(compact, "class Compact(M)");
      need(param > 0.0, "M > 0");
      break;
    default:
      throw DomainError(name + " is not a sweepable bound");
  }
}

SweepInstance evaluate_instance(const SweepSpec& spec, std::size_t index) {
  SweepInstance out;
  out.seed = spec.seed;
  out.index = index;
  std::mt19937_64 rng(derive_seed(spec.seed, index));
  const GaussianMixture p(random_mixing(spec.cls, spec.d, rng, spec.max_atoms));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool standard_q = unit(rng) < spec.standard_q_fraction;
  const GaussianMixture q(
      standard_q ? MixingDistribution(spec.d, {Atom{Point(spec.d, 0.0), 1.0}}, spec.cls)
                 : random_mixing(spec.cls, spec.d, rng, spec.max_atoms));
  out.atoms_p = p.size();
  out.atoms_q = q.size();

  DivergenceOptions opts;
  opts.tol = spec.tol > 0.0 ? spec.tol : default_tolerance(spec.d);
  opts.mc_seed = derive_seed(spec.seed ^ 0x9e3779b97f4a7c15ULL, index);
  const auto kl = divergence(DivergenceKind::KL, p, q, opts);
  const auto h2 = divergence(DivergenceKind::HellingerSq, p, q, opts);
  const auto chi = divergence(DivergenceKind::ChiSq, p, q, opts);
  out.kl = kl.value;
  out.h2 = h2.value;
  out.chisq = chi.value;

  {
    const double slack = 2.0 * (kl.truncation_bound + h2.truncation_bound + chi.truncation_bound) +
                         1e-9 + 2.0 * opts.tol * std::max({1.0, kl.value, chi.value});
    out.ordering_ok = kl.value >= h2.value - slack && chi.value >= kl.value - slack;
  }

  const double param = class_param(spec.cls);
  const double d = static_cast<double>(spec.d);
  const double h2v = std::min(h2.value, 2.0);
  double lhs = 0.0;
  double rhs = 0.0;
  double trunc = 0.0;
  switch (spec.id) {
    case BoundId::Thm1:
      lhs = kl.value;
      rhs = h2v > 0.0 ? bound_rhs(spec.id, {{"M", param}, {"d", d}, {"H2", h2v}}) : 0.0;
      trunc = kl.truncation_bound + h2.truncation_bound;
      break;
    case BoundId::Thm2:
      lhs = kl.value;
      rhs = h2v > 0.0 ? bound_rhs(spec.id, {{"M", param}, {"H2", h2v}}) : 0.0;
      trunc = kl.truncation_bound + h2.truncation_bound;
      break;
    case BoundId::Thm3:
      lhs = kl.value;
      rhs = h2v > 0.0 ? bound_rhs(spec.id, {{"K", param}, {"d", d}, {"H2", h2v}}) : 0.0;
      trunc = kl.truncation_bound + h2.truncation_bound;
      break;
    case BoundId::Thm5:
      lhs = kl.value;
      rhs = h2v > 0.0 ? bound_rhs(spec.id, {{"K", param}, {"H2", h2v}}) : 0.0;
      trunc = kl.truncation_bound + h2.truncation_bound;
      break;
    case BoundId::ChiSqThm: {
      // Log domain: the constant overflows doubles for moderate M.
      const double slack = 2.0 * (chi.truncation_bound + h2.truncation_bound) + 1e-9;
      out.slack = slack;
      out.lhs = chi.value > 0.0 ? std::log(chi.value) : -kInf;
      if (h2v > 0.0) {
        out.rhs = bound_log_rhs(spec.id, {{"M", param}, {"d", d}, {"H2", h2v}});
        const double hi = std::max(out.rhs, std::log(slack));
        const double allowed = hi + std::log1p(std::exp(std::min(out.rhs, std::log(slack)) - hi));
        out.pass = out.lhs <= allowed;
        out.ratio = std::exp(out.lhs - out.rhs);
      } else {
        out.rhs = -kInf;
        out.pass = chi.value <= slack;
        out.ratio = 0.0;
      }
      return out;
    }
    case BoundId::TVfromL2: {
      const auto tv = divergence(DivergenceKind::TV, p, q, opts);
      const auto l2sq = divergence(DivergenceKind::L2Sq, p, q, opts);
      const double l2 = std::sqrt(std::max(0.0, l2sq.value));
      lhs = tv.value;
      rhs = l2 > 0.0 ? bound_rhs(spec.id, {{"M", param}, {"L2", l2}}) : 0.0;
      trunc = tv.truncation_bound + l2sq.truncation_bound;
      break;
    }
    case BoundId::L2fromTV: {
      const auto tv = divergence(DivergenceKind::TV, p, q, opts);
      const auto l2sq = divergence(DivergenceKind::L2Sq, p, q, opts);
      const double tvv = std::min(tv.value, 1.0);
      lhs = std::sqrt(std::max(0.0, l2sq.value));
      rhs = tvv > 0.0 ? bound_rhs(spec.id, {{"TV", tvv}}) : 0.0;
      trunc = tv.truncation_bound + l2sq.truncation_bound;
      break;
    }
    case BoundId::HO: {
      const auto renyi = renyi_integral(p, q, 3.0, opts);
      lhs = kl.value;
      if (h2v > 0.0) {
        const double delta = std::exp(-12.0 * param * param) * h2v;
        rhs = ho_bound(delta, 3.0, h2v, renyi.value);
      }
      trunc = kl.truncation_bound + h2.truncation_bound + renyi.truncation_bound;
      break;
    }
    default:
      throw DomainError(std::string(to_string(spec.id)) + " is not a sweepable bound");
  }
  out.lhs = lhs;
  out.rhs = rhs;
  out.slack = 2.0 * trunc + 1e-9;
  out.pass = lhs <= rhs + out.slack;
  if (rhs > 0.0) {
    out.ratio = lhs / rhs;
  } else {
    out.ratio = lhs <= out.slack ? 0.0 : kInf;
  }
  return out;
}

}  // namespace

MixingDistribution random_mixing(const ClassTag& cls, std::size_t d, std::mt19937_64& rng,
                                 std::size_t max_atoms) {
  if (max_atoms == 0) throw InputError("random_mixing: max_atoms must be at least 1");
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t k = count(rng);
  const auto weights = dirichlet_flat(k, rng);
  std::vector<Atom> atoms;
  atoms.reserve(k);

  if (const auto* c = std::get_if<Compact>(&cls)) {
    for (std::size_t j = 0; j < k; ++j) {
      Point u = random_direction(d, rng);
      const double radius = c->M * std::pow(unit(rng), 1.0 / static_cast<double>(d));
      for (double& x : u) x *= radius;
      atoms.push_back({std::move(u), weights[j]});
    }
  } else if (const auto* s = std::get_if<Subgaussian>(&cls)) {
    double cumulative = 0.0;
    double previous = kInf;
    for (std::size_t j = 0; j < k; ++j) {
      cumulative += weights[j];
      const double cap = j + 1 == k || cumulative >= 1.0
                             ? 0.0
                             : s->K * std::sqrt(2.0 * std::log(1.0 / cumulative));
      const double radius = std::min(previous, cap * unit(rng));
      previous = radius;
      Point u = random_direction(d, rng);
      for (double& x : u) x *= radius;
      atoms.push_back({std::move(u), weights[j]});
    }
  } else {
    throw CapabilityError("random_mixing: Unconstrained class has no sampling law");
  }
  return MixingDistribution(d, std::move(atoms), cls);
}

SweepReport verify_sweep(const SweepSpec& spec) {
  check_spec(spec);
  SweepReport report;
  report.spec = spec;
  report.log_domain = spec.id == BoundId::ChiSqThm;
  report.instances.resize(spec.n);
  parallel_for(spec.n, [&](std::size_t i) { report.instances[i] = evaluate_instance(spec, i); });

  report.max_ratio = -kInf;
  for (const auto& inst : report.instances) {
    if (inst.ratio > report.max_ratio) {
      report.max_ratio = inst.ratio;
      report.argmax_index = inst.index;
    }
    if (!inst.pass) ++report.failures;
    if (!inst.ordering_ok) ++report.ordering_failures;
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  CsvWriter csv(out, {"seed", "index", "class", "class_param", "d", "atoms_p", "atoms_q", "lhs",
                      "rhs", "ratio", "pass"});
  const std::string cls = class_key(report.spec.cls);
  const double param = class_param(report.spec.cls);
  for (const auto& inst : report.instances) {
    csv.cell(static_cast<unsigned long long>(inst.seed))
        .cell(inst.index)
        .cell(cls)
        .cell(param)
        .cell(report.spec.d)
        .cell(inst.atoms_p)
        .cell(inst.atoms_q)
        .cell(inst.lhs)
        .cell(inst.rhs)
        .cell(inst.ratio)
        .cell(inst.pass);
    csv.end_row();
  }
}

nlohmann::json sweep_summary(const SweepReport& report) {
  nlohmann::json j;
  j["bound"] = std::string(to_string(report.spec.id));
  j["class"] = class_key(report.spec.cls);
  j["class_param"] = class_param(report.spec.cls);
  j["d"] = report.spec.d;
  j["n"] = report.spec.n;
  j["seed"] = report.spec.seed;
  j["tol"] = report.spec.tol > 0.0 ? report.spec.tol : default_tolerance(report.spec.d);
  j["log_domain"] = report.log_domain;
  j["max_ratio"] = report.max_ratio;
  j["argmax_index"] = report.argmax_index;
  j["failures"] = report.failures;
  j["ordering_failures"] = report.ordering_failures;
  double max_kl_h2 = 0.0;
  for (const auto& inst : report.instances) {
    if (inst.h2 > 0.0) max_kl_h2 = std::max(max_kl_h2, inst.kl / inst.h2);
  }
  j["max_kl_over_h2"] = max_kl_h2;
  return j;
}

std::vector<DichotomyRow> dichotomy_experiment(double K, const std::vector<double>& rs,
                                               double rel_tol) {
  if (rs.empty()) throw InputError("dichotomy: r-grid is empty");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InputError("dichotomy: rel_tol must lie in (0, 1)");
  std::vector<DichotomyRow> rows(rs.size());
  // Validate every grid point before spending time on quadrature.
  for (double r : rs) DichotomyParams::make(K, r);
  parallel_for(rs.size(), [&](std::size_t i) {
    const auto params = DichotomyParams::make(K, rs[i]);
    const GaussianMixture p(dichotomy_family(K, rs[i]));
    const GaussianMixture q = standard_gaussian(1);
    DivergenceOptions opts;
    opts.tol = params.h_r * rel_tol;
    const auto kl = divergence(DivergenceKind::KL, p, q, opts);
    const auto h2 = divergence(DivergenceKind::HellingerSq, p, q, opts);
    const auto b = dichotomy_bounds(params);
    rows[i] = {K,        rs[i],   kl.value, h2.value, b.kl_lb, b.h2_ub, kl.value / h2.value,
               kl.truncation_bound, h2.truncation_bound};
  });
  return rows;
}

void write_dichotomy_csv(std::ostream& out, const std::vector<DichotomyRow>& rows) {
  CsvWriter csv(out, {"K", "r", "KL", "H2", "kl_lb", "h2_ub", "ratio"});
  for (const auto& row : rows) {
    csv.cell(row.K).cell(row.r).cell(row.kl).cell(row.h2).cell(row.kl_lb).cell(row.h2_ub).cell(
        row.ratio);
    csv.end_row();
  }
}

}  // namespace gmdiv
