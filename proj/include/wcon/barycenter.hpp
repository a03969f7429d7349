#pragma once

#include "wcon/measure.hpp"
#include "wcon/ot.hpp"

#include <vector>

namespace wcon {

/// Weighted free-support barycenter problem: minimize
/// sum_i lambda_i W2^2(mu^i, candidate) over n_support-atom candidates.
struct BarycenterProblem {
  Ensemble agents;
  std::vector<double> weights;  // positive, any scale
  Index n_support = 1;
  double tol = 1e-9;
  int max_iter = 100;
};

struct BarycenterResult {
  AtomicMeasure measure;
  double functional = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> functional_history;  // one value per fixed-point sweep
};

/// Rescales positive weights to sum to 1.
std::vector<double> normalize_weights(const std::vector<double>& weights);

/// sum_i lambda_i W2^2(mu^i, candidate) with normalized weights.
double barycenter_functional(const AtomicMeasure& candidate, const Ensemble& agents,
                             const std::vector<double>& weights);

/// Default initial candidate: copy of the agent with the largest weight
/// (ties -> lowest index), resized to n_support uniform atoms.
AtomicMeasure default_barycenter_init(const Ensemble& agents,
                                      const std::vector<double>& weights, Index n_support);

/// Fixed-point iteration: OT from the candidate to each agent, then each
/// candidate atom moves to the weighted average of its transport targets.
/// Stops when the functional decreases by less than tol or at max_iter.
BarycenterResult free_support_barycenter(const BarycenterProblem& problem,
                                         const AtomicMeasure& init);

/// Pair barycenter with weights (1-t, t): displacement interpolation along
/// an optimal coupling from mu to nu.
AtomicMeasure mccann_pair_barycenter(const AtomicMeasure& mu, const AtomicMeasure& nu,
                                     double t);

}  // namespace wcon
