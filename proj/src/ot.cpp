#include "wcon/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace wcon {
namespace {

// Shortest-augmenting-path assignment solver (Jonker-Volgenant style
// successive shortest paths with dual potentials). Exact for dense
// square cost matrices, O(n^3).
std::vector<Index> solve_lap(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = C(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<Index> perm(n);
  for (int j = 1; j <= n; ++j)
    if (p[j]) perm[p[j] - 1] = j - 1;
  return perm;
}

struct Arc {
  int i;  // source
  int j;  // sink
  double flow;
};

// Transportation simplex on the dense bipartite graph. Supplies are
// epsilon-perturbed so every pivot is nondegenerate; the optimal basis is
// then re-solved against the unperturbed marginals (tree flows are
// uniquely determined by the marginals).
std::vector<Arc> transport_simplex(const Matrix& C, const Vector& a0, const Vector& b0) {
  const int n1 = static_cast<int>(C.rows());
  const int n2 = static_cast<int>(C.cols());
  const int nv = n1 + n2;

  const double delta =
      1e-9 * std::min(a0.minCoeff(), b0.minCoeff()) / static_cast<double>(nv + 1);
  Vector a = a0, b = b0;
  double extra = 0.0;
  for (int i = 0; i < n1; ++i) {
    a(i) += delta * (i + 1);
    extra += delta * (i + 1);
  }
  b(n2 - 1) += extra;

  // Northwest-corner initial basis: exactly n1 + n2 - 1 arcs.
  std::vector<Arc> basis;
  basis.reserve(nv - 1);
  {
    Vector ra = a, rb = b;
    int i = 0, j = 0;
    while (true) {
      const double m = std::min(ra(i), rb(j));
      basis.push_back({i, j, m});
      ra(i) -= m;
      rb(j) -= m;
      if (i == n1 - 1 && j == n2 - 1) break;
      if (ra(i) <= rb(j) && i < n1 - 1)
        ++i;
      else if (j < n2 - 1)
        ++j;
      else
        ++i;
    }
  }

  std::vector<std::vector<int>> adj(nv);
  std::vector<double> u(n1), v(n2);
  std::vector<int> parent(nv), parent_arc(nv);

  const double opt_tol = 1e-11 * (1.0 + C.cwiseAbs().maxCoeff());
  const int max_pivots = 2000 * nv + 10000;

  for (int pivot = 0;; ++pivot) {
    if (pivot >= max_pivots) throw std::runtime_error("transport simplex: pivot limit reached");

    for (auto& l : adj) l.clear();
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      adj[basis[k].i].push_back(k);
      adj[n1 + basis[k].j].push_back(k);
    }

    // Duals from the tree: u_i + v_j = c_ij on basic arcs.
    {
      std::vector<char> seen(nv, 0);
      std::queue<int> q;
      u[0] = 0.0;
      seen[0] = 1;
      q.push(0);
      while (!q.empty()) {
        const int x = q.front();
        q.pop();
        for (int k : adj[x]) {
          const int y = (x == basis[k].i) ? n1 + basis[k].j : basis[k].i;
          if (seen[y]) continue;
          seen[y] = 1;
          if (y >= n1)
            v[y - n1] = C(basis[k].i, basis[k].j) - u[basis[k].i];
          else
            u[y] = C(basis[k].i, basis[k].j) - v[basis[k].j];
          q.push(y);
        }
      }
    }

    // Entering arc: most negative reduced cost, row-major tie break.
    int bi = -1, bj = -1;
    double best = -opt_tol;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const double r = C(i, j) - u[i] - v[j];
        if (r < best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;  // optimal

    // Unique tree path from the entering source to the entering sink.
    std::fill(parent.begin(), parent.end(), -1);
    {
      std::queue<int> q;
      parent[bi] = bi;
      q.push(bi);
      while (!q.empty()) {
        const int x = q.front();
        q.pop();
        if (x == n1 + bj) break;
        for (int k : adj[x]) {
          const int y = (x == basis[k].i) ? n1 + basis[k].j : basis[k].i;
          if (parent[y] >= 0) continue;
          parent[y] = x;
          parent_arc[y] = k;
          q.push(y);
        }
      }
    }

    // Walk back from the sink; arcs traversed source->sink along the
    // forward path lose theta, sink->source gain theta.
    std::vector<int> minus_arcs, plus_arcs;
    for (int y = n1 + bj; y != bi; y = parent[y]) {
      const int k = parent_arc[y];
      const int x = parent[y];
      if (x == basis[k].i)
        minus_arcs.push_back(k);
      else
        plus_arcs.push_back(k);
    }
    std::reverse(minus_arcs.begin(), minus_arcs.end());

    int leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (int k : minus_arcs)
      if (basis[k].flow < theta) {
        theta = basis[k].flow;
        leaving = k;
      }
    if (leaving < 0) throw std::runtime_error("transport simplex: unbounded pivot");

    for (int k : minus_arcs) basis[k].flow -= theta;
    for (int k : plus_arcs) basis[k].flow += theta;
    basis[leaving] = {bi, bj, theta};
  }

  // Re-solve the optimal tree against the unperturbed marginals by leaf
  // elimination; flows on a spanning tree are determined by the marginals.
  {
    for (auto& l : adj) l.clear();
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      adj[basis[k].i].push_back(k);
      adj[n1 + basis[k].j].push_back(k);
    }
    std::vector<int> deg(nv);
    for (int x = 0; x < nv; ++x) deg[x] = static_cast<int>(adj[x].size());
    std::vector<char> arc_done(basis.size(), 0);
    Vector ra = a0, rb = b0;
    std::queue<int> leaves;
    for (int x = 0; x < nv; ++x)
      if (deg[x] == 1) leaves.push(x);
    while (!leaves.empty()) {
      const int x = leaves.front();
      leaves.pop();
      if (deg[x] != 1) continue;
      int arc = -1;
      for (int k : adj[x])
        if (!arc_done[k]) arc = k;
      if (arc < 0) continue;
      const double f = (x < n1) ? ra(x) : rb(x - n1);
      basis[arc].flow = std::max(f, 0.0);
      arc_done[arc] = 1;
      ra(basis[arc].i) -= f;
      rb(basis[arc].j) -= f;
      const int y = (x == basis[arc].i) ? n1 + basis[arc].j : basis[arc].i;
      if (--deg[y] == 1) leaves.push(y);
      deg[x] = 0;
    }
  }

  return basis;
}

double entries_cost(const Coupling& coupling, const Matrix& C) {
  double cost = 0.0;
  for (const auto& e : coupling.entries) cost += e.mass * C(e.i, e.j);
  return cost;
}

}  // namespace

Matrix cost_matrix(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("cost_matrix: dimension mismatch");
  Matrix C(mu.size(), nu.size());
  for (Index l = 0; l < mu.size(); ++l)
    C.row(l) = (nu.points().rowwise() - mu.points().row(l)).rowwise().squaredNorm();
  return C;
}

void validate_coupling(const Coupling& coupling, const AtomicMeasure& mu,
                       const AtomicMeasure& nu, double tol) {
  if (coupling.source_n != mu.size() || coupling.target_n != nu.size())
    throw std::invalid_argument("coupling size mismatch");
  Vector row = Vector::Zero(mu.size());
  Vector col = Vector::Zero(nu.size());
  for (const auto& e : coupling.entries) {
    if (e.i < 0 || e.i >= mu.size() || e.j < 0 || e.j >= nu.size())
      throw std::invalid_argument("coupling index out of range");
    if (!(e.mass > 0.0)) throw std::invalid_argument("coupling mass must be positive");
    row(e.i) += e.mass;
    col(e.j) += e.mass;
  }
  if ((row - mu.weights()).cwiseAbs().maxCoeff() > tol ||
      (col - nu.weights()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("coupling marginals do not match");
}

TransportResult solve_ot(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("solve_ot: dimension mismatch");
  const Index n1 = mu.size();
  const Index n2 = nu.size();

  TransportResult res;
  res.coupling.source_n = n1;
  res.coupling.target_n = n2;
  const Matrix C = cost_matrix(mu, nu);

  if (n1 == 1) {
    for (Index j = 0; j < n2; ++j) res.coupling.entries.push_back({0, j, nu.weights()(j)});
  } else if (n2 == 1) {
    for (Index i = 0; i < n1; ++i) res.coupling.entries.push_back({i, 0, mu.weights()(i)});
  } else if (n1 == n2 && mu.is_uniform() && nu.is_uniform()) {
    const auto perm = solve_lap(C);
    const double m = 1.0 / static_cast<double>(n1);
    for (Index l = 0; l < n1; ++l) res.coupling.entries.push_back({l, perm[l], m});
  } else {
    const auto arcs = transport_simplex(C, mu.weights(), nu.weights());
    for (const auto& arc : arcs)
      if (arc.flow > 0.0) res.coupling.entries.push_back({arc.i, arc.j, arc.flow});
  }

  res.cost = entries_cost(res.coupling, C);
  res.w2 = std::sqrt(std::max(res.cost, 0.0));
  return res;
}

double w2(const AtomicMeasure& mu, const AtomicMeasure& nu) { return solve_ot(mu, nu).w2; }

std::vector<Index> optimal_assignment(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (mu.dim() != nu.dim())
    throw std::invalid_argument("optimal_assignment: dimension mismatch");
  if (mu.size() != nu.size())
    throw std::invalid_argument("optimal_assignment: atom counts differ");
  if (!mu.is_uniform() || !nu.is_uniform())
    throw std::invalid_argument("optimal_assignment: measures must be uniform");
  return solve_lap(cost_matrix(mu, nu));
}

AtomicMeasure displacement_interpolation(const Coupling& coupling, const AtomicMeasure& mu,
                                         const AtomicMeasure& nu, double t,
                                         double merge_tol) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("interpolation parameter out of [0, 1]");
  validate_coupling(coupling, mu, nu);

  const std::size_t m = coupling.entries.size();
  Matrix pts(static_cast<Index>(m), mu.dim());
  Vector mass(static_cast<Index>(m));
  Index out = 0;
  for (const auto& e : coupling.entries) {
    Vector z = ((1.0 - t) * mu.points().row(e.i) + t * nu.points().row(e.j)).transpose();
    // merge with an earlier coincident atom if any
    Index hit = -1;
    for (Index k = 0; k < out; ++k)
      if ((pts.row(k).transpose() - z).norm() <= merge_tol) {
        hit = k;
        break;
      }
    if (hit >= 0) {
      mass(hit) += e.mass;
    } else {
      pts.row(out) = z.transpose();
      mass(out) = e.mass;
      ++out;
    }
  }
  pts.conservativeResize(out, Eigen::NoChange);
  mass.conservativeResize(out);
  mass /= mass.sum();
  return AtomicMeasure(std::move(pts), std::move(mass));
}

}  // namespace wcon
