#include "wcon/barycenter.hpp"

#include "wcon/parallel.hpp"

#include <cmath>
#include <limits>

namespace wcon {
namespace {

// Coincident candidate atoms make the assignment path ill-posed; spread
// them by a 1e-12 * diam offset on the first coordinate.
Matrix spread_coincident(Matrix pts) {
  const double diam = point_set_diameter(pts);
  if (diam == 0.0 && pts.rows() > 1) {
    for (Index l = 1; l < pts.rows(); ++l) pts(l, 0) += 1e-12 * static_cast<double>(l);
    return pts;
  }
  int bumped = 0;
  for (Index l = 0; l < pts.rows(); ++l)
    for (Index k = l + 1; k < pts.rows(); ++k)
      if ((pts.row(l) - pts.row(k)).norm() <= 1e-12 * diam)
        pts(k, 0) += 1e-12 * diam * static_cast<double>(++bumped);
  return pts;
}

}  // namespace

std::vector<double> normalize_weights(const std::vector<double>& weights) {
  if (weights.empty()) throw std::invalid_argument("empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("weights must be positive and finite");
    sum += w;
  }
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / sum;
  return out;
}

double barycenter_functional(const AtomicMeasure& candidate, const Ensemble& agents,
                             const std::vector<double>& weights) {
  if (weights.size() != agents.size())
    throw std::invalid_argument("weights/agents length mismatch");
  std::vector<double> costs(agents.size());
  parallel_for(agents.size(),
               [&](std::size_t i) { costs[i] = solve_ot(agents.agent(i), candidate).cost; });
  double f = 0.0;
  for (std::size_t i = 0; i < agents.size(); ++i) f += weights[i] * costs[i];
  return f;
}

AtomicMeasure default_barycenter_init(const Ensemble& agents,
                                      const std::vector<double>& weights, Index n_support) {
  if (weights.size() != agents.size())
    throw std::invalid_argument("weights/agents length mismatch");
  std::size_t best = 0;
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (weights[i] > weights[best]) best = i;
  const Matrix& src = agents.agent(best).points();
  Matrix pts(n_support, agents.dim());
  for (Index l = 0; l < n_support; ++l) pts.row(l) = src.row(l % src.rows());
  return AtomicMeasure::uniform(std::move(pts));
}

BarycenterResult free_support_barycenter(const BarycenterProblem& problem,
                                         const AtomicMeasure& init) {
  if (problem.n_support < 1 || problem.max_iter < 1 || !(problem.tol > 0.0))
    throw std::invalid_argument("invalid barycenter problem parameters");
  if (init.size() != problem.n_support)
    throw std::invalid_argument("init atom count does not match n_support");
  if (!init.is_uniform()) throw std::invalid_argument("init must have uniform weights");
  if (init.dim() != problem.agents.dim())
    throw std::invalid_argument("init/agents dimension mismatch");

  const auto lambda = normalize_weights(problem.weights);
  const std::size_t N = problem.agents.size();
  if (lambda.size() != N) throw std::invalid_argument("weights/agents length mismatch");
  const Index n = problem.n_support;
  const Index d = problem.agents.dim();

  AtomicMeasure cand = AtomicMeasure::uniform(spread_coincident(init.points()));
  std::vector<double> history;
  double f_prev = std::numeric_limits<double>::infinity();

  std::vector<double> costs(N);
  std::vector<Matrix> targets(N);   // per agent: row l = conditional mean of atom l's mass
  std::vector<Vector> row_mass(N);  // incoming mass per candidate atom

  for (int it = 1;; ++it) {
    parallel_for(N, [&](std::size_t i) {
      const auto res = solve_ot(cand, problem.agents.agent(i));
      costs[i] = res.cost;
      Matrix sum = Matrix::Zero(n, d);
      Vector mass = Vector::Zero(n);
      for (const auto& e : res.coupling.entries) {
        sum.row(e.i) += e.mass * problem.agents.agent(i).points().row(e.j);
        mass(e.i) += e.mass;
      }
      targets[i] = std::move(sum);
      row_mass[i] = std::move(mass);
    });

    double f = 0.0;
    for (std::size_t i = 0; i < N; ++i) f += lambda[i] * costs[i];
    history.push_back(f);

    const bool converged = (f <= problem.tol) || (f_prev - f < problem.tol);
    if (converged || it >= problem.max_iter)
      return {cand, f, it, converged, std::move(history)};

    Matrix next(n, d);
    for (Index l = 0; l < n; ++l) {
      Vector acc = Vector::Zero(d);
      double denom = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if (row_mass[i](l) > 0.0) {
          acc += lambda[i] * (targets[i].row(l) / row_mass[i](l)).transpose();
          denom += lambda[i];
        }
      }
      if (denom > 0.0)
        next.row(l) = (acc / denom).transpose();
      else
        next.row(l) = cand.points().row(l);
    }
    cand = AtomicMeasure::uniform(spread_coincident(std::move(next)));
    f_prev = f;
  }
}

AtomicMeasure mccann_pair_barycenter(const AtomicMeasure& mu, const AtomicMeasure& nu,
                                     double t) {
  const auto res = solve_ot(mu, nu);
  return displacement_interpolation(res.coupling, mu, nu, t);
}

}  // namespace wcon
