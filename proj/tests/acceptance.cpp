// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gmdiv/bounds.hpp"
#include "gmdiv/divergence.hpp"
#include "gmdiv/estimation.hpp"
#include "gmdiv/mixture.hpp"
#include "gmdiv/parallel.hpp"
#include "gmdiv/sweep.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"

#ifndef GMDIV_CLI_PATH
#error "GMDIV_CLI_PATH must point at the gmdiv executable"
#endif

using namespace gmdiv;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kClosedFormRel = 1e-6;
constexpr double kClosedFormSeconds = 1.0;
constexpr double kTightnessAbs = 1e-6;
constexpr double kSweepSeconds = 180.0;
constexpr double kRenyiRel = 1e-6;
constexpr double kDichotomyRatioGrowth = 3.0;
constexpr double kDichotomySeconds = 30.0;
constexpr double kInequalityRel = 1e-12;
constexpr double kGradientRel = 1e-5;
constexpr double kFiniteDifferenceStep = 1e-4;
constexpr double kPlancherelAbs = 1e-6;
constexpr double kRegretSlack = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  Outcome outcome() const {
    Outcome o;
    o.pass = count_ == 0;
    o.detail = notes_;
    for (const auto& f : failures_) o.detail += (o.detail.empty() ? "" : "; ") + ("failed: " + f);
    if (count_ > failures_.size()) o.detail += "; +" + std::to_string(count_ - failures_.size()) + " more";
    return o;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
  std::string notes_;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

Outcome closed_forms() {
  Checker c;
  const auto p = standard_gaussian(1);
  double worst = 0.0;
  double slowest = 0.0;
  for (double delta : {0.5, 1.0, 2.0, 4.0}) {
    const auto q = support::gauss({delta});
    const std::pair<DivergenceKind, double> cases[] = {
        {DivergenceKind::KL, oracle::kl_gauss(delta)},
        {DivergenceKind::HellingerSq, oracle::h2_gauss(delta)},
        {DivergenceKind::ChiSq, oracle::chisq_gauss(delta)},
        {DivergenceKind::TV, oracle::tv_gauss(delta)},
        {DivergenceKind::L2Sq, oracle::l2sq_gauss(delta, 1)},
    };
    for (const auto& [kind, want] : cases) {
      const auto t0 = std::chrono::steady_clock::now();
      const double got = divergence(kind, p, q).value;
      const double secs = seconds_since(t0);
      const double e = rel_err(got, want);
      worst = std::max(worst, e);
      slowest = std::max(slowest, secs);
      c.expect(e <= kClosedFormRel, std::string(to_string(kind)) + " delta=" + num(delta) + " rel " + num(e));
      c.expect(secs < kClosedFormSeconds, std::string(to_string(kind)) + " took " + num(secs) + " s");
    }
    const double pl = plancherel_l2(p, q);
    c.expect(rel_err(pl, oracle::l2sq_gauss(delta, 1)) <= kClosedFormRel, "plancherel delta=" + num(delta));
  }
  c.note("max rel err " + num(worst) + ", slowest " + num(slowest) + " s");
  return c.outcome();
}

Outcome tightness() {
  Checker c;
  const double M = 2.0;
  for (std::size_t d : {1u, 2u}) {
    std::vector<double> u(d, 0.0);
    u[0] = M;
    std::vector<double> v = u;
    v[0] = -M;
    const GaussianMixture p(MixingDistribution(d, {{u, 1.0}}, Compact{M}));
    const GaussianMixture q(MixingDistribution(d, {{v, 1.0}}, Compact{M}));
    const double kl = divergence(DivergenceKind::KL, p, q).value;
    const double h2 = divergence(DivergenceKind::HellingerSq, p, q).value;
    const double kl_want = 2.0 * M * M;
    const double h2_want = 2.0 - 2.0 * std::exp(-M * M / 2.0);
    c.expect(std::abs(kl - kl_want) <= kTightnessAbs, "KL d=" + std::to_string(d) + " = " + num(kl));
    c.expect(std::abs(h2 - h2_want) <= kTightnessAbs, "H2 d=" + std::to_string(d) + " = " + num(h2));
    c.note("d=" + std::to_string(d) + " |dKL| " + num(std::abs(kl - kl_want)) + " |dH2| " +
           num(std::abs(h2 - h2_want)));
  }
  return c.outcome();
}

Outcome sweeps() {
  Checker c;
  struct Run {
    BoundId id;
    ClassTag cls;
    std::size_t d;
    std::uint64_t seed;
  };
  const Run runs[] = {
      {BoundId::Thm1, Compact{2.0}, 1, 101},     {BoundId::Thm1, Compact{2.0}, 2, 102},
      {BoundId::Thm2, Compact{1.0}, 1, 201},     {BoundId::Thm2, Compact{2.0}, 1, 202},
      {BoundId::Thm3, Subgaussian{0.5}, 1, 301}, {BoundId::Thm5, Subgaussian{0.5}, 1, 501},
      {BoundId::Thm5, Subgaussian{2.0}, 1, 502}, {BoundId::ChiSqThm, Compact{2.0}, 1, 601},
      {BoundId::TVfromL2, Compact{2.0}, 1, 701}, {BoundId::L2fromTV, Compact{2.0}, 1, 801},
  };
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t total = 0;
  for (const auto& r : runs) {
    SweepSpec spec;
    spec.id = r.id;
    spec.cls = r.cls;
    spec.d = r.d;
    spec.n = 500;
    spec.seed = r.seed;
    const auto report = verify_sweep(spec);
    const std::string name = std::string(to_string(r.id)) + " d=" + std::to_string(r.d);
    c.expect(report.instances.size() == 500, name + " ran " + std::to_string(report.instances.size()));
    c.expect(report.failures == 0, name + " failures " + std::to_string(report.failures));
    c.expect(report.ordering_failures == 0, name + " ordering failures " + std::to_string(report.ordering_failures));
    total += report.instances.size();
  }
  const double secs = seconds_since(t0);
  c.expect(secs < kSweepSeconds, "runtime " + num(secs) + " s");
  c.note(std::to_string(total) + " instances in " + num(secs) + " s");
  return c.outcome();
}

Outcome renyi() {
  Checker c;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t d : {1u, 2u}) {
    for (int k = 0; k < 5; ++k) {
      std::vector<double> a(d);
      std::vector<double> b(d);
      double dist2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        a[i] = u(rng);
        b[i] = u(rng);
        dist2 += (a[i] - b[i]) * (a[i] - b[i]);
      }
      const double got = renyi_integral(support::gauss(a), support::gauss(b), 3.0).value;
      const double want = std::exp(3.0 * dist2);
      c.expect(rel_err(got, want) <= kRenyiRel, "single atom d=" + std::to_string(d) + " rel " + num(rel_err(got, want)));
    }
  }

  double sup = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    std::mt19937_64 r(derive_seed(4040, s));
    const GaussianMixture p(random_mixing(Compact{2.0}, 1, r));
    const GaussianMixture q(random_mixing(Compact{2.0}, 1, r));
    sup = std::max(sup, renyi_integral(p, q, 3.0).value);
  }
  c.expect(sup <= std::exp(48.0), "sup renyi " + num(sup));

  std::size_t ho_checked = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    std::mt19937_64 r(derive_seed(4041, s));
    const double M = 1.0;
    const GaussianMixture p(random_mixing(Compact{M}, 1, r));
    const GaussianMixture q(random_mixing(Compact{M}, 1, r));
    const auto kl = divergence(DivergenceKind::KL, p, q);
    const auto h2 = divergence(DivergenceKind::HellingerSq, p, q);
    const auto ren = renyi_integral(p, q, 3.0);
    const double delta = std::exp(-12.0 * M * M) * h2.value;
    const double rhs = ho_bound(delta, 3.0, h2.value, ren.value);
    const double slack = 2.0 * (kl.truncation_bound + h2.truncation_bound + ren.truncation_bound) + 1e-9;
    c.expect(kl.value <= rhs + slack, "HO pair " + std::to_string(s) + ": " + num(kl.value) + " > " + num(rhs));
    ++ho_checked;
  }
  c.note("sup over 200 pairs " + num(sup) + " <= e^48; " + std::to_string(ho_checked) + " HO pairs");
  return c.outcome();
}

Outcome dichotomy() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = dichotomy_experiment(2.0, {5.0, 10.0, 15.0});
  const double secs = seconds_since(t0);
  for (const auto& row : rows) {
    c.expect(row.kl >= row.kl_lb, "KL below envelope at r=" + num(row.r));
    c.expect(row.h2 <= row.h2_ub, "H2 above envelope at r=" + num(row.r));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) c.expect(rows[i].ratio > rows[i - 1].ratio, "ratio not increasing");
  const double growth = rows.back().ratio / rows.front().ratio;
  c.expect(growth >= kDichotomyRatioGrowth, "ratio(15)/ratio(5) = " + num(growth));
  c.expect(secs < kDichotomySeconds, "runtime " + num(secs) + " s");
  c.note("ratios " + num(rows[0].ratio) + ", " + num(rows[1].ratio) + ", " + num(rows[2].ratio) + "; growth " +
         num(growth) + " in " + num(secs) + " s");
  return c.outcome();
}

Outcome inequalities() {
  Checker c;
  for (double M : {1.0, 2.0}) {
    const double top = 8.0 * M * M;
    const int n = 10000;
    double prev_g = 0.0;
    for (int k = 0; k < n; ++k) {
      const double log_t = -40.0 + (top + 40.0) * k / (n - 1);
      const auto v = lem_formula_gap_log(log_t, M);
      c.expect(v.lhs <= v.rhs * (1.0 + kInequalityRel), "t log t inequality at log t = " + num(log_t));
      c.expect(v.g >= prev_g * (1.0 - kInequalityRel), "g decreasing at log t = " + num(log_t));
      prev_g = v.g;
    }
  }

  const double M = 2.0;
  std::mt19937_64 rng(606);
  for (std::size_t d : {1u, 2u}) {
    for (int m = 0; m < 50; ++m) {
      const GaussianMixture gm(random_mixing(Compact{M}, d, rng));
      for (double r = 0.0; r <= M + 10.0; r += 0.25) {
        for (int k = 0; k < 8; ++k) {
          const double angle = 2.0 * std::numbers::pi * k / 8.0;
          const std::vector<double> x =
              d == 1 ? std::vector<double>{k % 2 ? r : -r} : std::vector<double>{r * std::cos(angle), r * std::sin(angle)};
          double sn = 0.0;
          for (double v : gm.score(x)) sn += v * v;
          c.expect(std::sqrt(sn) <= 3.0 * r + 4.0 * M + 1e-12, "score bound at r=" + num(r));
        }
      }
    }
  }

  for (int m = 0; m < 50; ++m) {
    const std::size_t d = 1 + static_cast<std::size_t>(m % 2);
    const GaussianMixture gm(random_mixing(Compact{M}, d, rng));
    for (int k = 0; k < 6; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / 6.0 + 0.1;
      auto at = [&](double r) {
        return d == 1 ? gm.log_density(std::vector<double>{k % 2 ? r : -r})
                      : gm.log_density(std::vector<double>{r * std::cos(angle), r * std::sin(angle)});
      };
      for (double r = M; r <= M + 8.0; r += 0.5) {
        const double lr = at(r);
        for (double r2 = r; r2 <= M + 8.0; r2 += 0.5) {
          const double l2 = at(r2);
          const double decay = -0.5 * ((r2 - M) * (r2 - M) - (r - M) * (r - M));
          c.expect(l2 <= lr + 1e-12, "radial monotonicity");
          c.expect(l2 <= lr + decay + 1e-10, "radial envelope");
        }
      }
    }
  }
  c.note("2 x 10000 grid points, 100 score grids, 50 radial grids");
  return c.outcome();
}

Outcome gradients() {
  Checker c;
  std::mt19937_64 rng(707);
  std::normal_distribution<double> normal(0.0, 2.0);
  double worst = 0.0;
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int trial = 0; trial < 100; ++trial) {
      const GaussianMixture gm(random_mixing(Compact{2.0}, d, rng));
      std::vector<double> x(d);
      for (double& v : x) v = normal(rng);
      const auto s = gm.score(x);
      double err = 0.0;
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        auto xp = x;
        auto xm = x;
        xp[i] += kFiniteDifferenceStep;
        xm[i] -= kFiniteDifferenceStep;
        const double fd = (gm.log_density(xp) - gm.log_density(xm)) / (2.0 * kFiniteDifferenceStep);
        err += (fd - s[i]) * (fd - s[i]);
        norm += s[i] * s[i];
      }
      const double rel = std::sqrt(err) / std::max(1.0, std::sqrt(norm));
      worst = std::max(worst, rel);
      c.expect(rel <= kGradientRel, "d=" + std::to_string(d) + " rel " + num(rel));
    }
  }
  c.note("worst relative error " + num(worst));
  return c.outcome();
}

Outcome plancherel() {
  Checker c;
  std::mt19937_64 rng(808);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianMixture p(random_mixing(Compact{2.0}, 1, rng));
    const GaussianMixture q(random_mixing(Compact{2.0}, 1, rng));
    const double direct = divergence(DivergenceKind::L2Sq, p, q).value;
    const double fourier = plancherel_l2(p, q);
    worst = std::max(worst, std::abs(direct - fourier));
    c.expect(std::abs(direct - fourier) <= kPlancherelAbs, "pair " + std::to_string(trial));
    for (double t = 0.0; t <= 10.0; t += 0.05) {
      const double gap = std::abs(characteristic_function(p, t) - characteristic_function(q, t));
      c.expect(gap <= 2.0 * std::exp(-t * t / 2.0) * (1.0 + 1e-12), "characteristic gap at t=" + num(t));
    }
  }
  c.note("max |direct - fourier| " + num(worst));
  return c.outcome();
}

std::vector<GaussianMixture> thetas(const std::vector<double>& ts) {
  std::vector<GaussianMixture> out;
  for (double t : ts) out.push_back(support::gauss({t}));
  return out;
}

Outcome estimation() {
  Checker c;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> loc(-2.0, 2.0);
  std::uniform_int_distribution<int> size(4, 12);
  std::uniform_real_distribution<double> radius(0.1, 0.5);
  for (int config = 0; config < 10; ++config) {
    std::vector<double> ts(static_cast<std::size_t>(size(rng)));
    for (double& t : ts) t = loc(rng);
    const double eps = radius(rng);
    const auto dist = pairwise_hellinger(thetas(ts));
    const auto g = greedy_cover_indices(dist, eps).size();
    const auto opt = oracle::exhaustive_min_cover(dist, eps);
    c.expect(g <= 2 * opt, "greedy " + std::to_string(g) + " vs optimum " + std::to_string(opt));
  }

  const auto pair_net = greedy_cover(thetas({-1.0, 1.0}), 0.01);
  const auto truth = support::gauss({1.0});
  double worst_regret = -1e300;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto trace = sequential_forecaster(pair_net, truth.sample(100, derive_seed(9090, s)), truth);
    for (std::size_t t = 0; t < trace.cum_regret.size(); ++t) {
      c.expect(trace.cum_regret[t] <= std::log(2.0) + kRegretSlack, "regret on stream " + std::to_string(s));
      c.expect(trace.best_expert_regret[t] <= std::log(2.0) + kRegretSlack, "best-element regret on stream " + std::to_string(s));
      worst_regret = std::max(worst_regret, trace.cum_regret[t]);
    }
  }

  const auto mle_net = greedy_cover(thetas({-1.5, 0.0, 1.5}), 0.01);
  double min_sep = 1e300;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) min_sep = std::min(min_sep, mle_net.distance_cache[i][j]);
  c.expect(min_sep >= 0.5, "net separation " + num(min_sep));
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    hits += batch_net_mle(mle_net, mle_net.elements[1].sample(200, derive_seed(9091, s))).index == 1;
  }
  c.expect(hits >= 18, "MLE selected truth " + std::to_string(hits) + "/20");

  std::vector<double> eps;
  std::vector<std::size_t> N;
  for (int k = 1; k <= 100; ++k) {
    eps.push_back(0.01 * k);
    N.push_back(static_cast<std::size_t>(std::ceil(1.0 / eps.back() - 1e-12)));
  }
  for (bool local : {true, false}) {
    const auto r = rate_functional(eps, N, local, 100);
    const auto ref = oracle::grid_scan(eps, N, local, 100);
    c.expect(r.value == ref.value && r.argmin == ref.argmin, local ? "batch rate minimum" : "sequential rate minimum");
  }
  c.note("max regret " + num(worst_regret) + " <= log 2; MLE " + std::to_string(hits) + "/20 at separation " +
         num(min_sep));
  return c.outcome();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  Checker c;
  const fs::path root = fs::temp_directory_path() / ("gmdiv_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  using nlohmann::json;
  const json std1 = json::parse(R"({"dim":1,"atoms":[[[0],1]],"class_tag":"compact","params":{"M":0}})");
  const json mix = json::parse(R"({"dim":1,"atoms":[[[-1],0.3],[[1.5],0.7]],"class_tag":"compact","params":{"M":1.5}})");
  struct Command {
    std::string name;
    json config;
    std::vector<std::string> csvs;
  };
  std::vector<Command> commands = {
      {"div", {{"p", mix}, {"q", std1}}, {"div.csv"}},
      {"sweep", {{"bound", "Thm1"}, {"class", {{"type", "compact"}, {"M", 2.0}}}, {"n", 50}}, {"sweep.csv"}},
      {"dichotomy", {{"K", 2.0}, {"r_grid", {5.0, 10.0, 15.0}}}, {"dichotomy.csv"}},
      {"entropy",
       {{"family", {{"type", "theta_grid"}, {"lo", -1.0}, {"hi", 1.0}, {"count", 21}}},
        {"epsilons", {0.05, 0.1, 0.2, 0.4}},
        {"n", 100},
        {"risk_trials", 10}},
       {"entropy.csv"}},
      {"seq",
       {{"net", {{"type", "theta_grid"}, {"lo", -1.0}, {"hi", 1.0}, {"count", 2}}}, {"truth", mix}, {"length", 100}},
       {"seq.csv"}},
  };
  std::size_t compared = 0;
  std::vector<std::string> csv_paths;
  for (const auto& cmd : commands) {
    const fs::path cfg = root / (cmd.name + ".json");
    std::ofstream(cfg) << cmd.config.dump(2);
    std::vector<fs::path> dirs;
    int run = 0;
    for (const char* threads : {"1", "4", "1", "4"}) {
      const fs::path dir = root / (cmd.name + "_" + std::to_string(run++) + "_t" + threads);
      const std::string line = std::string("\"") + GMDIV_CLI_PATH + "\" " + cmd.name + " --config \"" + cfg.string() +
                               "\" --seed 17 --threads " + threads + " --out \"" + dir.string() + "\" > \"" +
                               (root / "stdout.txt").string() + "\" 2>&1";
      const int rc = std::system(line.c_str());
      c.expect(rc == 0, cmd.name + " exited with " + std::to_string(rc));
      dirs.push_back(dir);
    }
    for (const auto& csv : cmd.csvs) {
      const std::string ref = slurp(dirs[0] / csv);
      c.expect(!ref.empty(), cmd.name + " wrote an empty " + csv);
      for (std::size_t i = 1; i < dirs.size(); ++i) {
        c.expect(slurp(dirs[i] / csv) == ref, cmd.name + " " + csv + " differs in run " + std::to_string(i));
        ++compared;
      }
      csv_paths.push_back((dirs[0] / csv).string());
    }
  }
  // report merges the produced tables.
  const fs::path cfg = root / "report.json";
  std::ofstream(cfg) << json{{"inputs", csv_paths}}.dump(2);
  std::vector<std::string> reports;
  for (const char* threads : {"1", "4"}) {
    const fs::path dir = root / (std::string("report_t") + threads);
    const std::string line = std::string("\"") + GMDIV_CLI_PATH + "\" report --config \"" + cfg.string() +
                             "\" --seed 17 --threads " + threads + " --out \"" + dir.string() + "\" > /dev/null 2>&1";
    c.expect(std::system(line.c_str()) == 0, "report failed");
    reports.push_back(slurp(dir / "report.json"));
  }
  c.expect(!reports[0].empty() && reports[0] == reports[1], "report output differs");
  fs::remove_all(root);
  c.note(std::to_string(compared + 1) + " byte comparisons across threads {1, 4}");
  return c.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form Gaussian agreement", closed_forms},
      {"tightness of the compact bound", tightness},
      {"bound sweeps", sweeps},
      {"Renyi machinery", renyi},
      {"dichotomy", dichotomy},
      {"pointwise inequalities", inequalities},
      {"gradient check", gradients},
      {"Plancherel consistency", plancherel},
      {"estimation lab", estimation},
      {"CLI reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first << ", "
              << num(seconds_since(t0)) << " s): " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
