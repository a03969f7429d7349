#pragma once

#include "wcon/measure.hpp"

namespace wcon {

/// Euclidean distance from q to Conv(rows of hull).
/// Solves the simplex-constrained least-squares feasibility problem
/// q = sum_k a_k h_k, a >= 0, sum a = 1 via Wolfe's min-norm-point method.
double hull_distance(const Matrix& hull, const Vector& q);

/// True iff every row of queries lies in Conv(rows of hull) within tol.
bool convex_hull_contains(const Matrix& hull, const Matrix& queries, double tol = kHullTol);

}  // namespace wcon
