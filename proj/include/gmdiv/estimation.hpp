#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "gmdiv/mixture.hpp"

namespace gmdiv {

/// Symmetric matrix of pairwise Hellinger distances (not squared).
using DistanceMatrix = std::vector<std::vector<double>>;

/// Fills all pairs in parallel; zero diagonal, exact symmetry.
DistanceMatrix pairwise_hellinger(const std::vector<GaussianMixture>& family, double tol = 0.0);

/// A finite Hellinger epsilon-cover.
struct Net {
  std::vector<GaussianMixture> elements;
  double epsilon = 0.0;
  DistanceMatrix distance_cache;
  std::vector<std::size_t> source_indices;  // positions in the candidate list
};

nlohmann::json to_json(const Net& net);

/// Farthest-point greedy over a precomputed distance matrix.
///
/// Starts at `start`, then repeatedly adds the candidate farthest from the
/// chosen centers (first index on ties) until every candidate lies within eps.
/// Restricted to `subset` when given. The centers are also eps-separated.
std::vector<std::size_t> greedy_cover_indices(const DistanceMatrix& dist, double eps,
                                              std::size_t start = 0,
                                              const std::vector<std::size_t>* subset = nullptr);

Net greedy_cover(const std::vector<GaussianMixture>& candidates, double eps, double tol = 0.0);
Net greedy_cover(const std::vector<GaussianMixture>& candidates, const DistanceMatrix& dist,
                 double eps);

/// Greedy eta/2-cover of the candidates inside the Hellinger ball B(center, eta).
/// The cover starts from the center when the center is itself a candidate.
Net local_cover(const std::vector<GaussianMixture>& candidates, const GaussianMixture& center,
                double eta, double tol = 0.0);

/// Same on a precomputed matrix, with the center given by its candidate index.
std::vector<std::size_t> local_cover_indices(const DistanceMatrix& dist, std::size_t center,
                                             double eta);

/// max over the given centers and over eta in {eps} U {eta in eta_grid : eta >= eps}
/// of |local_cover_indices(dist, center, eta)|.
std::size_t local_covering_number(const DistanceMatrix& dist, const std::vector<std::size_t>& centers,
                                  double eps, const std::vector<double>& eta_grid);

struct Selection {
  std::size_t index;
  GaussianMixture element;
};

/// Net element closest to f in Hellinger distance (first index on ties).
Selection hellinger_project(const GaussianMixture& f, const Net& net, double tol = 0.0);

/// Net element with the largest log-likelihood of the data (first index on ties).
Selection batch_net_mle(const Net& net, const std::vector<Point>& data);

struct ForecastTrace {
  std::vector<std::vector<double>> weights;  // posterior over the net before step t
  std::vector<double> log_predictive;
  std::vector<double> log_true;              // NaN without a true density
  std::vector<double> cum_regret;            // sum of log_true - log_predictive
  std::vector<double> regret_bound;          // log N + min_i sum (log_true - log q_i)
  std::vector<double> best_expert_regret;    // cumulative log-loss minus that of the best element
  double final_regret = 0.0;
};

/// Bayesian mixture forecaster with a uniform prior over the net.
ForecastTrace sequential_forecaster(const Net& net, const std::vector<Point>& stream,
                                    const std::optional<GaussianMixture>& truth = std::nullopt);

struct RateFunctional {
  std::vector<double> epsilons;
  std::vector<double> log_cover;
  std::size_t n = 0;
  bool local = true;
  double value = 0.0;          // exact minimum over the grid
  std::size_t argmin = 0;      // first minimizing index
  double epsilon_star = 0.0;
};

/// local: min eps^2 + log N_loc(eps) / n.  sequential: min n eps^2 + log N(eps).
RateFunctional rate_functional(const std::vector<double>& epsilons,
                               const std::vector<std::size_t>& cover_sizes, bool local,
                               std::size_t n);

nlohmann::json to_json(const RateFunctional& rate);

struct RiskEstimate {
  std::vector<double> mean;        // per candidate: mean H^2 of the net MLE
  std::vector<double> half_width;  // 95% normal half-width
  std::size_t worst = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
};

/// Monte Carlo risk of batch_net_mle under each supplied candidate. Trials run
/// in parallel with derived seeds.
RiskEstimate estimate_batch_risk(const Net& net, const std::vector<GaussianMixture>& candidates,
                                 std::size_t n, std::size_t trials, std::uint64_t seed,
                                 double tol = 0.0);

/// N(theta, 1) for count thetas evenly spaced on [lo, hi], tagged Compact(max |theta|).
std::vector<GaussianMixture> theta_grid_family(double lo, double hi, std::size_t count);

/// One- and two-atom mixtures on [-M, M]: every grid location alone, and every
/// pair a < b with weight w on b for w in the weight grid. Tagged Compact(M).
std::vector<GaussianMixture> atom_grid_family(double M, std::size_t locations,
                                              const std::vector<double>& weights);

/// N(0, 1) followed by f_{pi_r} for each r, tagged Subgaussian(K).
std::vector<GaussianMixture> dichotomy_grid_family(double K, const std::vector<double>& rs);

}  // namespace gmdiv
