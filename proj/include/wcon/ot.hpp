#pragma once

#include "wcon/measure.hpp"

#include <vector>

namespace wcon {

inline constexpr double kMarginalTol = 1e-9;

/// Sparse transport plan between two atomic measures. Row sums equal the
/// source weights and column sums the target weights within kMarginalTol.
struct Coupling {
  struct Entry {
    Index i;      // source atom
    Index j;      // target atom
    double mass;  // > 0
  };
  std::vector<Entry> entries;
  Index source_n = 0;
  Index target_n = 0;
};

struct TransportResult {
  Coupling coupling;
  double cost = 0.0;  // squared-distance transport cost
  double w2 = 0.0;    // sqrt(cost)
};

/// Entry (l, m) = |x_l - y_m|^2.
Matrix cost_matrix(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// Throws if the coupling is not a feasible plan for (mu, nu).
void validate_coupling(const Coupling& coupling, const AtomicMeasure& mu,
                       const AtomicMeasure& nu, double tol = kMarginalTol);

/// Exact quadratic-cost optimal transport. Uses the assignment solver when
/// both measures are uniform with equal atom count, the transportation
/// simplex otherwise; n = 1 on either side short-circuits to the product
/// coupling.
TransportResult solve_ot(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// W2 distance (= solve_ot(mu, nu).w2).
double w2(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// Minimum-cost permutation for uniform measures with equal n.
/// perm[l] is the target atom matched to source atom l.
std::vector<Index> optimal_assignment(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// Push-forward of the coupling under (x, y) -> (1-t) x + t y. Output atoms
/// closer than merge_tol are merged with summed mass.
AtomicMeasure displacement_interpolation(const Coupling& coupling, const AtomicMeasure& mu,
                                         const AtomicMeasure& nu, double t,
                                         double merge_tol = 1e-12);

}  // namespace wcon
