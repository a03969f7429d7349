#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wcon {

using Matrix = Eigen::MatrixXd;  // atoms as rows
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kHullTol = 1e-9;

/// Atomic probability measure on R^d: a weighted point cloud.
/// Weights are strictly positive and sum to 1 within kWeightSumTol;
/// exactly-zero weights are stripped at construction.
class AtomicMeasure {
 public:
  AtomicMeasure(Matrix points, Vector weights);

  /// n atoms, each with weight 1/n.
  static AtomicMeasure uniform(Matrix points);

  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }

  bool is_uniform(double tol = 1e-12) const;

  /// Sum_l w_l |x_l|^2
  double second_moment() const;

 private:
  Matrix points_;
  Vector weights_;
};

/// Single Dirac measure at x.
AtomicMeasure dirac(const Vector& x);
AtomicMeasure dirac(std::initializer_list<double> coords);

/// Ordered collection of N agents sharing one ambient dimension.
class Ensemble {
 public:
  explicit Ensemble(std::vector<AtomicMeasure> agents);

  const std::vector<AtomicMeasure>& agents() const { return agents_; }
  const AtomicMeasure& agent(std::size_t i) const { return agents_.at(i); }
  std::size_t size() const { return agents_.size(); }
  Index dim() const { return agents_.front().dim(); }

  /// All support points of all agents stacked into one matrix.
  Matrix support_union() const;

 private:
  std::vector<AtomicMeasure> agents_;
};

/// Max Euclidean distance between any two rows.
double point_set_diameter(const Matrix& points);

/// diam of Conv(union of supports) = max pairwise support-point distance.
double support_diameter(const Ensemble& ensemble);

}  // namespace wcon
