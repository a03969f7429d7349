#include "wcon/measure.hpp"

#include <cmath>

namespace wcon {

AtomicMeasure::AtomicMeasure(Matrix points, Vector weights) {
  if (points.rows() == 0) throw std::invalid_argument("measure needs at least one atom");
  if (points.cols() < 1) throw std::invalid_argument("measure dimension must be >= 1");
  if (points.rows() != weights.size())
    throw std::invalid_argument("points/weights length mismatch");
  if (!points.allFinite()) throw std::invalid_argument("non-finite coordinate");
  if (!weights.allFinite()) throw std::invalid_argument("non-finite weight");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("negative weight");

  Index kept = (weights.array() > 0.0).count();
  if (kept == 0) throw std::invalid_argument("all weights are zero");

  if (kept == points.rows()) {
    points_ = std::move(points);
    weights_ = std::move(weights);
  } else {
    points_.resize(kept, points.cols());
    weights_.resize(kept);
    Index r = 0;
    for (Index l = 0; l < points.rows(); ++l) {
      if (weights(l) > 0.0) {
        points_.row(r) = points.row(l);
        weights_(r) = weights(l);
        ++r;
      }
    }
  }

  if (std::abs(weights_.sum() - 1.0) > kWeightSumTol)
    throw std::invalid_argument("weights do not sum to 1");
}

AtomicMeasure AtomicMeasure::uniform(Matrix points) {
  if (points.rows() == 0) throw std::invalid_argument("measure needs at least one atom");
  const Index n = points.rows();
  return AtomicMeasure(std::move(points), Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

bool AtomicMeasure::is_uniform(double tol) const {
  const double w = 1.0 / static_cast<double>(size());
  return (weights_.array() - w).abs().maxCoeff() <= tol;
}

double AtomicMeasure::second_moment() const {
  return weights_.dot(points_.rowwise().squaredNorm());
}

AtomicMeasure dirac(const Vector& x) {
  Matrix pts(1, x.size());
  pts.row(0) = x;
  return AtomicMeasure::uniform(std::move(pts));
}

AtomicMeasure dirac(std::initializer_list<double> coords) {
  Vector x(static_cast<Index>(coords.size()));
  Index i = 0;
  for (double c : coords) x(i++) = c;
  return dirac(x);
}

Ensemble::Ensemble(std::vector<AtomicMeasure> agents) : agents_(std::move(agents)) {
  if (agents_.empty()) throw std::invalid_argument("ensemble needs at least one agent");
  const Index d = agents_.front().dim();
  for (const auto& a : agents_)
    if (a.dim() != d) throw std::invalid_argument("ensemble dimension mismatch");
}

Matrix Ensemble::support_union() const {
  Index total = 0;
  for (const auto& a : agents_) total += a.size();
  Matrix out(total, dim());
  Index r = 0;
  for (const auto& a : agents_) {
    out.middleRows(r, a.size()) = a.points();
    r += a.size();
  }
  return out;
}

double point_set_diameter(const Matrix& points) {
  double best = 0.0;
  for (Index i = 0; i < points.rows(); ++i)
    for (Index j = i + 1; j < points.rows(); ++j)
      best = std::max(best, (points.row(i) - points.row(j)).norm());
  return best;
}

double support_diameter(const Ensemble& ensemble) {
  return point_set_diameter(ensemble.support_union());
}

}  // namespace wcon
