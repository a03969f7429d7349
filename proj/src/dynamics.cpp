#include "wcon/dynamics.hpp"

#include "wcon/ot.hpp"
#include "wcon/parallel.hpp"

#include <cmath>

namespace wcon {
namespace {

Index resolve_n_support(const Ensemble& ensemble, Index requested) {
  if (requested > 0) return requested;
  Index common = ensemble.agent(0).size();
  Index maxn = common;
  bool equal = true;
  for (const auto& a : ensemble.agents()) {
    if (a.size() != common) equal = false;
    maxn = std::max(maxn, a.size());
  }
  return equal ? common : maxn;
}

}  // namespace

WeightFn constant_weights() {
  return [](const Ensemble& e) { return std::vector<double>(e.size(), 1.0); };
}

ConsensusStep consensus_step(const Ensemble& ensemble, const ConsensusConfig& config) {
  if (!(config.tau > 0.0 && config.tau < 1.0))
    throw std::invalid_argument("tau must lie in (0, 1)");

  const auto lambda = normalize_weights(config.weight_fn(ensemble));
  const Index n_support = resolve_n_support(ensemble, config.n_support);

  BarycenterProblem problem{ensemble, lambda, n_support, config.bary_tol,
                            config.bary_max_iter};
  const auto bary =
      free_support_barycenter(problem, default_barycenter_init(ensemble, lambda, n_support));

  const std::size_t N = ensemble.size();
  std::vector<double> dist(N);
  std::vector<AtomicMeasure> next;
  next.reserve(N);
  for (std::size_t i = 0; i < N; ++i) next.push_back(ensemble.agent(i));  // placeholders

  parallel_for(N, [&](std::size_t i) {
    const auto res = solve_ot(ensemble.agent(i), bary.measure);
    dist[i] = res.w2;
    next[i] = displacement_interpolation(res.coupling, ensemble.agent(i), bary.measure,
                                         config.tau, config.merge_tol);
  });

  return {Ensemble(std::move(next)),
          {lambda, bary.measure, std::move(dist), bary.functional}};
}

TrajectoryRecord run_consensus(const Ensemble& ensemble, const ConsensusConfig& config) {
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");

  Ensemble current = ensemble;
  std::vector<TrajectoryRecord::Entry> entries;
  for (int k = 1; k <= config.steps; ++k) {
    auto step = consensus_step(current, config);
    current = std::move(step.ensemble);
    const double diam = ensemble_diameter(current);
    TrajectoryRecord::Entry entry{k,
                                  diam,
                                  std::move(step.diag.weights),
                                  std::move(step.diag.w2_to_barycenter),
                                  step.diag.barycenter_functional,
                                  std::move(step.diag.barycenter),
                                  std::nullopt};
    if (config.snapshot_every > 0 && k % config.snapshot_every == 0)
      entry.snapshot = current;
    entries.push_back(std::move(entry));
    if (diam < 1e-12) break;  // consensus reached
  }
  return {std::move(entries), std::move(current)};
}

double ensemble_diameter(const Ensemble& ensemble) {
  const std::size_t N = ensemble.size();
  if (N < 2) return 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) pairs.emplace_back(i, j);
  std::vector<double> dist(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    dist[k] = w2(ensemble.agent(pairs[k].first), ensemble.agent(pairs[k].second));
  });
  double best = 0.0;
  for (double v : dist) best = std::max(best, v);
  return best;
}

}  // namespace wcon
