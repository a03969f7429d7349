#include "wcon/hull.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wcon {
namespace {

// Min-norm point of the affine hull of the selected rows of P, as
// barycentric coefficients. KKT system solved by a rank-revealing
// decomposition; the Gram matrix may be singular for collinear corrals.
Vector affine_minimizer(const Matrix& P, const std::vector<int>& sel) {
  const int m = static_cast<int>(sel.size());
  Matrix kkt(m + 1, m + 1);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) kkt(a, b) = P.row(sel[a]).dot(P.row(sel[b]));
  kkt.row(m).setOnes();
  kkt.col(m).setOnes();
  kkt(m, m) = 0.0;
  Vector rhs = Vector::Zero(m + 1);
  rhs(m) = 1.0;
  Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  return sol.head(m);
}

}  // namespace

double hull_distance(const Matrix& hull, const Vector& q) {
  if (hull.rows() == 0) throw std::invalid_argument("empty hull point set");
  if (hull.cols() != q.size()) throw std::invalid_argument("hull/query dimension mismatch");

  // Shift so the problem becomes: min-norm point of Conv(rows of P).
  Matrix P = hull.rowwise() - q.transpose();
  const int m = static_cast<int>(P.rows());

  Vector sq = P.rowwise().squaredNorm();
  int start = 0;
  sq.minCoeff(&start);
  std::vector<int> sel{start};
  Vector alpha(1);
  alpha(0) = 1.0;
  Vector x = P.row(start);

  const double scale = 1.0 + sq.maxCoeff();
  const double eps = 1e-12 * scale;
  const int max_major = 50 * m + 100;

  for (int it = 0; it < max_major; ++it) {
    if (x.squaredNorm() <= eps) break;
    Vector dots = P * x;
    int j = 0;
    const double dmin = dots.minCoeff(&j);
    if (x.squaredNorm() <= dmin + eps) break;  // Wolfe optimality test
    if (std::find(sel.begin(), sel.end(), j) != sel.end()) break;

    sel.push_back(j);
    alpha.conservativeResize(sel.size());
    alpha(sel.size() - 1) = 0.0;

    for (int inner = 0; inner < m + 2; ++inner) {
      Vector beta = affine_minimizer(P, sel);
      if ((beta.array() > 1e-12).all()) {
        alpha = beta;
        break;
      }
      // Step toward beta until the first coefficient hits zero.
      double theta = 1.0;
      for (int k = 0; k < beta.size(); ++k)
        if (beta(k) <= 1e-12 && alpha(k) > beta(k))
          theta = std::min(theta, alpha(k) / (alpha(k) - beta(k)));
      alpha = (1.0 - theta) * alpha + theta * beta;

      std::vector<int> keep;
      for (int k = 0; k < alpha.size(); ++k)
        if (alpha(k) > 1e-12) keep.push_back(k);
      if (keep.empty()) {
        int kmax = 0;
        alpha.maxCoeff(&kmax);
        keep.push_back(kmax);
      }
      if (static_cast<int>(keep.size()) == alpha.size()) break;
      std::vector<int> new_sel;
      Vector new_alpha(static_cast<Index>(keep.size()));
      for (std::size_t t = 0; t < keep.size(); ++t) {
        new_sel.push_back(sel[keep[t]]);
        new_alpha(static_cast<Index>(t)) = alpha(keep[t]);
      }
      sel = std::move(new_sel);
      alpha = new_alpha / new_alpha.sum();
    }

    x.setZero();
    for (std::size_t k = 0; k < sel.size(); ++k) x += alpha(static_cast<Index>(k)) * P.row(sel[k]).transpose();
  }

  return x.norm();
}

bool convex_hull_contains(const Matrix& hull, const Matrix& queries, double tol) {
  if (hull.cols() != queries.cols())
    throw std::invalid_argument("hull/query dimension mismatch");
  for (Index r = 0; r < queries.rows(); ++r)
    if (hull_distance(hull, queries.row(r).transpose()) > tol) return false;
  return true;
}

}  // namespace wcon
