#include "wcon/cbo.hpp"

#include "wcon/barycenter.hpp"
#include "wcon/ot.hpp"
#include "wcon/parallel.hpp"
#include "wcon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wcon {

double w2_to_target(const AtomicMeasure& mu, const AtomicMeasure& target) {
  return w2(mu, target);
}

Objective w2_objective(AtomicMeasure target) {
  return [target = std::move(target)](const AtomicMeasure& mu) {
    return w2_to_target(mu, target);
  };
}

std::vector<double> gibbs_weights(const std::vector<double>& objectives, double alpha) {
  if (objectives.empty()) throw std::invalid_argument("empty objective vector");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  double emin = std::numeric_limits<double>::infinity();
  for (double e : objectives) {
    if (!std::isfinite(e)) throw std::invalid_argument("non-finite objective value");
    emin = std::min(emin, e);
  }
  std::vector<double> w(objectives.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    w[i] = std::max(std::exp(-alpha * (objectives[i] - emin)),
                    std::numeric_limits<double>::min());
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

void CboConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (sigma1 < 0.0 || sigma2 < 0.0) throw std::invalid_argument("sigma1, sigma2 must be >= 0");
  if (N < 1 || n < 1 || k_max < 1 || d < 1)
    throw std::invalid_argument("N, n, d, k_max must be >= 1");
}

CboStep cbo_step(const Ensemble& ensemble, const Objective& objective,
                 const CboConfig& config, int k, const AtomicMeasure* warm_start) {
  config.validate();
  const std::size_t N = ensemble.size();
  const Index n = ensemble.agent(0).size();
  const Index d = ensemble.dim();
  for (const auto& a : ensemble.agents())
    if (a.size() != n || !a.is_uniform())
      throw std::invalid_argument("cbo_step requires uniform agents with equal n");

  CboIteration diag;
  diag.iter = k;

  diag.objectives.resize(N);
  parallel_for(N, [&](std::size_t i) { diag.objectives[i] = objective(ensemble.agent(i)); });
  diag.weights = gibbs_weights(diag.objectives, config.alpha);

  BarycenterProblem problem{ensemble, diag.weights, n, config.bary_tol,
                            config.bary_max_iter};
  AtomicMeasure init =
      (warm_start != nullptr && warm_start->size() == n && warm_start->dim() == d &&
       warm_start->is_uniform())
          ? *warm_start
          : default_barycenter_init(ensemble, diag.weights, n);
  const auto bary = free_support_barycenter(problem, init);

  diag.sigma.resize(N);
  diag.w2_to_barycenter.resize(N);
  std::vector<AtomicMeasure> next;
  next.reserve(N);
  for (std::size_t i = 0; i < N; ++i) next.push_back(ensemble.agent(i));

  parallel_for(N, [&](std::size_t i) {
    const auto& agent = ensemble.agent(i);
    const auto perm = optimal_assignment(agent, bary.measure);
    double cost = 0.0;
    for (Index l = 0; l < n; ++l)
      cost += (agent.points().row(l) - bary.measure.points().row(perm[l])).squaredNorm();
    cost /= static_cast<double>(n);
    const double dist = std::sqrt(std::max(cost, 0.0));
    diag.w2_to_barycenter[i] = dist;
    diag.sigma[i] = config.sigma1 * (dist + config.sigma2);

    auto rng = substream(config.seed, static_cast<std::uint64_t>(k), i);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector xi(d);
    if (!config.per_particle_noise)
      for (Index c = 0; c < d; ++c) xi(c) = normal(rng);

    Matrix pts(n, d);
    for (Index l = 0; l < n; ++l) {
      if (config.per_particle_noise)
        for (Index c = 0; c < d; ++c) xi(c) = normal(rng);
      pts.row(l) = agent.points().row(l) +
                   config.tau * (bary.measure.points().row(perm[l]) - agent.points().row(l)) +
                   diag.sigma[i] * xi.transpose();
    }
    next[i] = AtomicMeasure::uniform(std::move(pts));
  });

  diag.best_agent = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (diag.objectives[i] < diag.objectives[diag.best_agent])
      diag.best_agent = static_cast<int>(i);
  diag.best_objective = diag.objectives[diag.best_agent];
  diag.barycenter_objective = objective(bary.measure);

  return {Ensemble(std::move(next)), bary.measure, std::move(diag)};
}

RunRecord run_cbo(const Ensemble& ensemble, const Objective& objective,
                  const CboConfig& config) {
  config.validate();
  Ensemble current = ensemble;
  std::optional<AtomicMeasure> bary;
  std::vector<CboIteration> iterations;
  std::vector<RunRecord::Snapshot> snapshots;
  iterations.reserve(config.k_max);

  for (int k = 0; k < config.k_max; ++k) {
    auto step = cbo_step(current, objective, config, k, bary ? &*bary : nullptr);
    current = std::move(step.ensemble);
    bary = std::move(step.barycenter);
    iterations.push_back(std::move(step.diag));
    if (config.snapshot_every > 0 && (k + 1) % config.snapshot_every == 0)
      snapshots.push_back({k, current, *bary});
  }

  const int best = iterations.back().best_agent;
  return {std::move(iterations), std::move(snapshots), std::move(current), std::move(*bary),
          best};
}

Ensemble sample_initial_ensemble(const CboConfig& config) {
  config.validate();
  std::vector<AtomicMeasure> agents;
  agents.reserve(config.N);
  for (int i = 0; i < config.N; ++i) {
    auto rng = substream(config.seed, 0xFFFFFFFFFFFFFFFFULL, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix pts(config.n, config.d);
    for (Index l = 0; l < config.n; ++l)
      for (int c = 0; c < config.d; ++c) pts(l, c) = normal(rng);
    agents.push_back(AtomicMeasure::uniform(std::move(pts)));
  }
  return Ensemble(std::move(agents));
}

AtomicMeasure make_target(const std::string& shape, int M, std::uint64_t seed, double noise) {
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  auto rng = std::mt19937_64(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uangle(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> ucomp(0, 3);
  Matrix pts(M, 2);

  if (shape == "gaussians4") {
    // equal mixture of isotropic normals at (+-2, +-2), std 0.3
    const double cx[4] = {-2.0, -2.0, 2.0, 2.0};
    const double cy[4] = {-2.0, 2.0, -2.0, 2.0};
    for (int m = 0; m < M; ++m) {
      const int c = ucomp(rng);
      pts(m, 0) = cx[c] + 0.3 * noise * normal(rng);
      pts(m, 1) = cy[c] + 0.3 * noise * normal(rng);
    }
  } else if (shape == "circles") {
    // concentric circles, radii 1 and 0.5, radial noise std 0.02
    for (int m = 0; m < M; ++m) {
      const double r0 = (m < (M + 1) / 2) ? 1.0 : 0.5;
      const double theta = uangle(rng);
      const double r = r0 + 0.02 * noise * normal(rng);
      pts(m, 0) = r * std::cos(theta);
      pts(m, 1) = r * std::sin(theta);
    }
  } else if (shape == "moons") {
    // interleaved half-circles of radius 1, second offset by (1, -0.5)
    std::uniform_real_distribution<double> uhalf(0.0, std::numbers::pi);
    for (int m = 0; m < M; ++m) {
      const double theta = uhalf(rng);
      if (m < (M + 1) / 2) {
        pts(m, 0) = std::cos(theta);
        pts(m, 1) = std::sin(theta);
      } else {
        pts(m, 0) = 1.0 - std::cos(theta);
        pts(m, 1) = 0.5 - std::sin(theta);
      }
      pts(m, 0) += 0.02 * noise * normal(rng);
      pts(m, 1) += 0.02 * noise * normal(rng);
    }
  } else if (shape == "ring") {
    // unit circle, radial noise std 0.02
    for (int m = 0; m < M; ++m) {
      const double theta = uangle(rng);
      const double r = 1.0 + 0.02 * noise * normal(rng);
      pts(m, 0) = r * std::cos(theta);
      pts(m, 1) = r * std::sin(theta);
    }
  } else {
    throw std::invalid_argument("unknown target shape: " + shape);
  }
  return AtomicMeasure::uniform(std::move(pts));
}

}  // namespace wcon
