#pragma once

#include "wcon/barycenter.hpp"
#include "wcon/measure.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace wcon {

/// Weight rule lambda evaluated on the whole ensemble; returns one positive
/// weight per agent (any scale, normalized downstream).
using WeightFn = std::function<std::vector<double>(const Ensemble&)>;

/// lambda(mu) = 1 for every agent.
WeightFn constant_weights();

struct ConsensusConfig {
  double tau = 0.1;  // in (0, 1)
  int steps = 1;
  WeightFn weight_fn = constant_weights();
  Index n_support = 0;  // 0 = common n when agents share it, else max n_i
  double bary_tol = 1e-9;
  int bary_max_iter = 100;
  double merge_tol = 1e-12;
  int snapshot_every = 0;  // 0 = no ensemble snapshots
  std::uint64_t seed = 0;  // reserved; the scheme itself is deterministic
};

struct StepDiagnostics {
  std::vector<double> weights;  // normalized
  AtomicMeasure barycenter;
  std::vector<double> w2_to_barycenter;
  double barycenter_functional = 0.0;
};

struct ConsensusStep {
  Ensemble ensemble;
  StepDiagnostics diag;
};

/// One explicit-Euler consensus step: weights, one shared weighted
/// barycenter, then each agent moves the fraction tau along a geodesic
/// toward it.
ConsensusStep consensus_step(const Ensemble& ensemble, const ConsensusConfig& config);

struct TrajectoryRecord {
  struct Entry {
    int step = 0;  // 1-based, state after the step
    double diameter = 0.0;
    std::vector<double> weights;
    std::vector<double> w2_to_barycenter;
    double barycenter_functional = 0.0;
    AtomicMeasure barycenter;
    std::optional<Ensemble> snapshot;
  };
  std::vector<Entry> entries;
  Ensemble final_ensemble;
};

/// Applies consensus_step config.steps times; stops early once the
/// ensemble diameter drops below 1e-12.
TrajectoryRecord run_consensus(const Ensemble& ensemble, const ConsensusConfig& config);

/// Max pairwise W2 distance among agents; 0 for N = 1.
double ensemble_diameter(const Ensemble& ensemble);

}  // namespace wcon
