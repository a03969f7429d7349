#pragma once

#include "wcon/measure.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wcon {

/// Objective E evaluated on one agent.
using Objective = std::function<double(const AtomicMeasure&)>;

/// E(mu) = W2(mu, target).
double w2_to_target(const AtomicMeasure& mu, const AtomicMeasure& target);
Objective w2_objective(AtomicMeasure target);

/// Normalized Gibbs weights proportional to exp(-alpha * E_i), computed by
/// subtracting min(E) before exponentiation. alpha = 0 gives uniform
/// weights. Fully underflowed weights are clamped to the smallest positive
/// normal double so downstream weight validation keeps its positivity
/// invariant.
std::vector<double> gibbs_weights(const std::vector<double>& objectives, double alpha);

struct CboConfig {
  int N = 1;           // agents
  Index n = 1;         // particles per agent
  int d = 1;           // ambient dimension
  double tau = 0.1;    // in (0, 1)
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double alpha = 1.0;
  int k_max = 1;
  std::uint64_t seed = 0;
  int snapshot_every = 0;
  bool per_particle_noise = false;  // default: one rigid noise vector per agent
  double bary_tol = 1e-9;
  int bary_max_iter = 100;

  void validate() const;
};

/// Per-iteration diagnostics, recorded before the noise is applied.
struct CboIteration {
  int iter = 0;
  std::vector<double> objectives;
  std::vector<double> weights;
  std::vector<double> sigma;
  std::vector<double> w2_to_barycenter;
  int best_agent = 0;
  double best_objective = 0.0;
  double barycenter_objective = 0.0;
};

struct CboStep {
  Ensemble ensemble;
  AtomicMeasure barycenter;
  CboIteration diag;
};

/// One iteration of the Gibbs-weighted consensus update with per-agent
/// stochastic perturbation: weights, weighted barycenter, per-agent optimal
/// assignment to the barycenter, then
///   x <- x + tau (xbar_G(l) - x) + sigma^i xi^i,
/// with sigma^i = sigma1 (W2(mu^i, bar) + sigma2) and one xi^i per agent.
/// k indexes the RNG substream; warm_start seeds the barycenter solver.
CboStep cbo_step(const Ensemble& ensemble, const Objective& objective,
                 const CboConfig& config, int k,
                 const AtomicMeasure* warm_start = nullptr);

struct RunRecord {
  struct Snapshot {
    int iter;
    Ensemble ensemble;
    AtomicMeasure barycenter;
  };
  std::vector<CboIteration> iterations;
  std::vector<Snapshot> snapshots;
  Ensemble final_ensemble;
  AtomicMeasure final_barycenter;
  int final_best_agent = 0;
};

/// Runs k_max iterations; deterministic given (inputs, seed, build).
RunRecord run_cbo(const Ensemble& ensemble, const Objective& objective,
                  const CboConfig& config);

/// N agents of n particles each, drawn i.i.d. standard normal in R^d.
Ensemble sample_initial_ensemble(const CboConfig& config);

/// Target point clouds for the shape-approximation experiments.
/// Shapes: gaussians4, moons, circles, ring. noise scales the per-shape
/// default jitter (1 = default, 0 = exact shape).
AtomicMeasure make_target(const std::string& shape, int M, std::uint64_t seed,
                          double noise = 1.0);

}  // namespace wcon
