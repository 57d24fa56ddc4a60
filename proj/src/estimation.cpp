#include "gmdiv/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmdiv/divergence.hpp"
#include "gmdiv/errors.hpp"
#include "gmdiv/parallel.hpp"
#include "gmdiv/record.hpp"

namespace gmdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double top = -kInf;
  for (double x : xs) top = std::max(top, x);
  if (top == -kInf) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

void require_eps(double eps, const char* what) {
  if (!(eps > 0.0)) throw DomainError(std::string(what) + ": radius must be positive");
}

DistanceMatrix submatrix(const DistanceMatrix& dist, const std::vector<std::size_t>& idx) {
  DistanceMatrix out(idx.size(), std::vector<double>(idx.size(), 0.0));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) out[a][b] = dist[idx[a]][idx[b]];
  }
  return out;
}

Net make_net(const std::vector<GaussianMixture>& candidates, const DistanceMatrix& dist,
             const std::vector<std::size_t>& chosen, double eps) {
  Net net;
  net.epsilon = eps;
  net.source_indices = chosen;
  for (std::size_t i : chosen) net.elements.push_back(candidates[i]);
  net.distance_cache = submatrix(dist, chosen);
  return net;
}

}  // namespace

DistanceMatrix pairwise_hellinger(const std::vector<GaussianMixture>& family, double tol) {
  const std::size_t n = family.size();
  DistanceMatrix dist(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    values[k] = hellinger_distance(family[pairs[k].first], family[pairs[k].second], tol);
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    dist[pairs[k].first][pairs[k].second] = values[k];
    dist[pairs[k].second][pairs[k].first] = values[k];
  }
  return dist;
}

nlohmann::json to_json(const Net& net) {
  nlohmann::json j;
  j["epsilon"] = net.epsilon;
  j["size"] = net.elements.size();
  j["source_indices"] = net.source_indices;
  j["elements"] = nlohmann::json::array();
  for (const auto& e : net.elements) j["elements"].push_back(nlohmann::json::parse(to_record(e)));
  j["distance_cache"] = net.distance_cache;
  return j;
}

std::vector<std::size_t> greedy_cover_indices(const DistanceMatrix& dist, double eps,
                                              std::size_t start,
                                              const std::vector<std::size_t>* subset) {
  require_eps(eps, "greedy_cover");
  std::vector<std::size_t> pool;
  if (subset) {
    pool = *subset;
  } else {
    pool.resize(dist.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  }
  if (pool.empty()) return {};
  if (std::find(pool.begin(), pool.end(), start) == pool.end()) start = pool.front();

  std::vector<std::size_t> centers{start};
  std::vector<double> nearest(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) nearest[k] = dist[pool[k]][start];
  while (true) {
    std::size_t far = 0;
    for (std::size_t k = 1; k < pool.size(); ++k) {
      if (nearest[k] > nearest[far]) far = k;
    }
    if (!(nearest[far] > eps)) break;
    const std::size_t c = pool[far];
    centers.push_back(c);
    for (std::size_t k = 0; k < pool.size(); ++k) nearest[k] = std::min(nearest[k], dist[pool[k]][c]);
  }
  return centers;
}

Net greedy_cover(const std::vector<GaussianMixture>& candidates, double eps, double tol) {
  require_eps(eps, "greedy_cover");
  if (candidates.empty()) throw InputError("greedy_cover: no candidates");
  return greedy_cover(candidates, pairwise_hellinger(candidates, tol), eps);
}

Net greedy_cover(const std::vector<GaussianMixture>& candidates, const DistanceMatrix& dist,
                 double eps) {
  require_eps(eps, "greedy_cover");
  if (candidates.empty()) throw InputError("greedy_cover: no candidates");
  if (dist.size() != candidates.size()) throw InputError("greedy_cover: distance matrix size mismatch");
  return make_net(candidates, dist, greedy_cover_indices(dist, eps), eps);
}

std::vector<std::size_t> local_cover_indices(const DistanceMatrix& dist, std::size_t center,
                                             double eta) {
  require_eps(eta, "local_cover");
  if (center >= dist.size()) throw InputError("local_cover: center index out of range");
  std::vector<std::size_t> ball;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (dist[center][j] <= eta) ball.push_back(j);
  }
  return greedy_cover_indices(dist, 0.5 * eta, center, &ball);
}

Net local_cover(const std::vector<GaussianMixture>& candidates, const GaussianMixture& center,
                double eta, double tol) {
  require_eps(eta, "local_cover");
  const std::string center_record = to_record(center);
  std::vector<double> to_center(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    to_center[i] = to_record(candidates[i]) == center_record
                       ? 0.0
                       : hellinger_distance(center, candidates[i], tol);
  });
  std::vector<std::size_t> ball;
  std::size_t start = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (to_center[i] <= eta) {
      if (start == candidates.size() && to_record(candidates[i]) == center_record) start = ball.size();
      ball.push_back(i);
    }
  }
  Net net;
  net.epsilon = 0.5 * eta;
  if (ball.empty()) return net;

  std::vector<GaussianMixture> members;
  for (std::size_t i : ball) members.push_back(candidates[i]);
  const auto dist = pairwise_hellinger(members, tol);
  const auto chosen = greedy_cover_indices(dist, 0.5 * eta, start == candidates.size() ? 0 : start);
  net = make_net(members, dist, chosen, 0.5 * eta);
  for (auto& s : net.source_indices) s = ball[s];
  return net;
}

std::size_t local_covering_number(const DistanceMatrix& dist, const std::vector<std::size_t>& centers,
                                  double eps, const std::vector<double>& eta_grid) {
  require_eps(eps, "local_covering_number");
  std::vector<double> etas{eps};
  for (double eta : eta_grid) {
    if (eta >= eps) etas.push_back(eta);
  }
  std::size_t best = 0;
  for (std::size_t c : centers) {
    for (double eta : etas) best = std::max(best, local_cover_indices(dist, c, eta).size());
  }
  return best;
}

Selection hellinger_project(const GaussianMixture& f, const Net& net, double tol) {
  if (net.elements.empty()) throw InputError("hellinger_project: empty net");
  std::vector<double> d(net.elements.size());
  parallel_for(d.size(), [&](std::size_t i) { d[i] = hellinger_distance(f, net.elements[i], tol); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] < d[best]) best = i;
  }
  return {best, net.elements[best]};
}

Selection batch_net_mle(const Net& net, const std::vector<Point>& data) {
  if (net.elements.empty()) throw InputError("batch_net_mle: empty net");
  if (data.empty()) throw InputError("batch_net_mle: no data");
  std::size_t best = 0;
  double best_ll = -kInf;
  for (std::size_t i = 0; i < net.elements.size(); ++i) {
    double ll = 0.0;
    for (const auto& x : data) ll += net.elements[i].log_density(x);
    if (i == 0 || ll > best_ll) {
      best = i;
      best_ll = ll;
    }
  }
  return {best, net.elements[best]};
}

ForecastTrace sequential_forecaster(const Net& net, const std::vector<Point>& stream,
                                    const std::optional<GaussianMixture>& truth) {
  const std::size_t N = net.elements.size();
  if (N == 0) throw InputError("sequential_forecaster: empty net");
  const double log_n = std::log(static_cast<double>(N));
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ForecastTrace trace;
  std::vector<double> log_post(N, -log_n);  // normalized log posterior
  std::vector<double> loss_sum(N, 0.0);     // sum of -log q_i(X_s)
  std::vector<double> lq(N);
  double true_sum = 0.0;
  double pred_sum = 0.0;
  for (const auto& x : stream) {
    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) w[i] = std::exp(log_post[i]);
    trace.weights.push_back(std::move(w));

    std::vector<double> joint(N);
    for (std::size_t i = 0; i < N; ++i) {
      lq[i] = net.elements[i].log_density(x);
      joint[i] = log_post[i] + lq[i];
      loss_sum[i] -= lq[i];
    }
    const double log_pred = log_sum_exp(joint);
    for (std::size_t i = 0; i < N; ++i) log_post[i] = joint[i] - log_pred;
    pred_sum += log_pred;
    trace.log_predictive.push_back(log_pred);

    const double best_loss = *std::min_element(loss_sum.begin(), loss_sum.end());
    trace.best_expert_regret.push_back(-pred_sum - best_loss);
    if (truth) {
      const double lt = truth->log_density(x);
      true_sum += lt;
      trace.log_true.push_back(lt);
      trace.cum_regret.push_back(true_sum - pred_sum);
      trace.regret_bound.push_back(log_n + true_sum + best_loss);
    } else {
      trace.log_true.push_back(nan);
      trace.cum_regret.push_back(nan);
      trace.regret_bound.push_back(nan);
    }
  }
  if (!stream.empty()) {
    trace.final_regret = truth ? trace.cum_regret.back() : trace.best_expert_regret.back();
  }
  return trace;
}

RateFunctional rate_functional(const std::vector<double>& epsilons,
                               const std::vector<std::size_t>& cover_sizes, bool local,
                               std::size_t n) {
  if (epsilons.empty()) throw InputError("rate_functional: empty epsilon grid");
  if (epsilons.size() != cover_sizes.size()) {
    throw InputError("rate_functional: epsilon grid and cover sizes differ in length");
  }
  if (n == 0) throw InputError("rate_functional: n must be at least 1");
  RateFunctional out;
  out.epsilons = epsilons;
  out.n = n;
  out.local = local;
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (cover_sizes[k] == 0) throw InputError("rate_functional: cover sizes must be at least 1");
    if (!(epsilons[k] > 0.0)) throw InputError("rate_functional: epsilons must be positive");
    const double lc = std::log(static_cast<double>(cover_sizes[k]));
    out.log_cover.push_back(lc);
    const double e2 = epsilons[k] * epsilons[k];
    const double v = local ? e2 + lc / dn : dn * e2 + lc;
    if (k == 0 || v < out.value) {
      out.value = v;
      out.argmin = k;
    }
  }
  out.epsilon_star = epsilons[out.argmin];
  return out;
}

nlohmann::json to_json(const RateFunctional& rate) {
  return {{"epsilons", rate.epsilons}, {"log_cover", rate.log_cover}, {"n", rate.n},
          {"local", rate.local},       {"value", rate.value},         {"argmin", rate.argmin},
          {"epsilon_star", rate.epsilon_star}};
}

RiskEstimate estimate_batch_risk(const Net& net, const std::vector<GaussianMixture>& candidates,
                                 std::size_t n, std::size_t trials, std::uint64_t seed,
                                 double tol) {
  if (net.elements.empty()) throw InputError("estimate_batch_risk: empty net");
  if (candidates.empty()) throw InputError("estimate_batch_risk: no candidates");
  if (n == 0 || trials < 2) throw InputError("estimate_batch_risk: need n >= 1 and trials >= 2");
  const std::size_t C = candidates.size();
  const std::size_t N = net.elements.size();
  std::vector<double> h2(C * N);
  parallel_for(C * N, [&](std::size_t k) {
    const double h = hellinger_distance(candidates[k / N], net.elements[k % N], tol);
    h2[k] = h * h;
  });
  std::vector<double> loss(C * trials);
  parallel_for(C * trials, [&](std::size_t k) {
    const std::size_t c = k / trials;
    const auto data = candidates[c].sample(n, derive_seed(seed, k));
    loss[k] = h2[c * N + batch_net_mle(net, data).index];
  });

  RiskEstimate out;
  out.n = n;
  out.trials = trials;
  for (std::size_t c = 0; c < C; ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < trials; ++t) mean += loss[c * trials + t];
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double e = loss[c * trials + t] - mean;
      var += e * e;
    }
    var /= static_cast<double>(trials - 1);
    out.mean.push_back(mean);
    out.half_width.push_back(1.96 * std::sqrt(var / static_cast<double>(trials)));
    if (mean > out.mean[out.worst]) out.worst = c;
  }
  return out;
}

std::vector<GaussianMixture> theta_grid_family(double lo, double hi, std::size_t count) {
  if (count == 0) throw InputError("theta_grid: count must be at least 1");
  if (!(hi >= lo)) throw InputError("theta_grid: need lo <= hi");
  const double M = std::max(std::abs(lo), std::abs(hi));
  std::vector<GaussianMixture> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double theta =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    out.emplace_back(MixingDistribution(1, {Atom{{theta}, 1.0}}, Compact{M}));
  }
  return out;
}

std::vector<GaussianMixture> atom_grid_family(double M, std::size_t locations,
                                              const std::vector<double>& weights) {
  if (!(M >= 0.0)) throw InputError("atom_grid: M must be non-negative");
  if (locations == 0) throw InputError("atom_grid: need at least one location");
  for (double w : weights) {
    if (!(w > 0.0 && w < 1.0)) throw InputError("atom_grid: weights must lie in (0, 1)");
  }
  std::vector<double> grid(locations);
  for (std::size_t k = 0; k < locations; ++k) {
    grid[k] = locations == 1 ? 0.0
                             : -M + 2.0 * M * static_cast<double>(k) / static_cast<double>(locations - 1);
  }
  std::vector<GaussianMixture> out;
  for (double a : grid) out.emplace_back(MixingDistribution(1, {Atom{{a}, 1.0}}, Compact{M}));
  for (std::size_t i = 0; i < locations; ++i) {
    for (std::size_t j = i + 1; j < locations; ++j) {
      for (double w : weights) {
        out.emplace_back(
            MixingDistribution(1, {Atom{{grid[i]}, 1.0 - w}, Atom{{grid[j]}, w}}, Compact{M}));
      }
    }
  }
  return out;
}

std::vector<GaussianMixture> dichotomy_grid_family(double K, const std::vector<double>& rs) {
  std::vector<GaussianMixture> out;
  out.emplace_back(MixingDistribution(1, {Atom{{0.0}, 1.0}}, Subgaussian{K}));
  for (double r : rs) out.emplace_back(dichotomy_family(K, r));
  return out;
}

}  // namespace gmdiv
