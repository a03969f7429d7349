#include <doctest.h>

#include "wcon/cbo.hpp"
#include "wcon/hull.hpp"
#include "wcon/ot.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace wcon;

namespace {

CboConfig base_config(int N, Index n, int d) {
  CboConfig cfg;
  cfg.N = N;
  cfg.n = n;
  cfg.d = d;
  cfg.tau = 0.1;
  cfg.alpha = 1.0;
  cfg.k_max = 1;
  cfg.seed = 123;
  return cfg;
}

}  // namespace

TEST_CASE("gibbs_weights") {
  const auto uniform = gibbs_weights({3.0, 1.0, 7.0}, 0.0);
  for (double w : uniform) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const auto tied = gibbs_weights({1.0, 1.0}, 5.0);
  CHECK(tied[0] == 0.5);
  CHECK(tied[1] == 0.5);

  const auto w = gibbs_weights({0.0, 1.0}, std::log(2.0));
  CHECK(w[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  CHECK_THROWS_AS(gibbs_weights({0.0, std::nan("")}, 1.0), std::invalid_argument);
}

TEST_CASE("gibbs weight shift invariance and argmax alignment") {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> E(6);
    for (double& e : E) e = u(rng);
    const double alpha = 0.5 + u(rng);
    const auto w = gibbs_weights(E, alpha);

    std::vector<double> shifted = E;
    for (double& e : shifted) e += 3.7;
    const auto ws = gibbs_weights(shifted, alpha);
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(ws[i] == doctest::Approx(w[i]).epsilon(1e-12));

    const auto argmin = std::min_element(E.begin(), E.end()) - E.begin();
    const auto argmax = std::max_element(w.begin(), w.end()) - w.begin();
    CHECK(argmin == argmax);
  }
}

TEST_CASE("w2_to_target") {
  const auto mu = testutil::uniform2({{0, 0}, {1, 1}});
  CHECK(w2_to_target(mu, mu) == 0.0);
  CHECK(w2_to_target(dirac({0.0, 0.0}), dirac({3.0, 4.0})) == 5.0);
  const auto a = AtomicMeasure::uniform(testutil::points2({{0.0}, {1.0}}));
  const auto b = AtomicMeasure::uniform(testutil::points2({{2.0}, {3.0}}));
  CHECK(w2_to_target(a, b) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("noise-free Dirac agents with constant objective follow Euler") {
  auto cfg = base_config(4, 1, 1);
  cfg.sigma1 = 0.0;
  const Objective constant = [](const AtomicMeasure&) { return 1.0; };
  Ensemble e({dirac({0.0}), dirac({1.0}), dirac({3.0}), dirac({4.0})});
  const auto step = cbo_step(e, constant, cfg, 0);
  const double mean = 2.0;
  for (int i = 0; i < 4; ++i) {
    const double x = e.agent(i).points()(0, 0);
    CHECK(step.ensemble.agent(i).points()(0, 0) ==
          doctest::Approx(x + cfg.tau * (mean - x)).epsilon(1e-12));
  }
}

TEST_CASE("noise-free identical agents are a fixed point") {
  std::mt19937_64 rng(101);
  const auto m = testutil::random_uniform_measure(rng, 6, 2);
  auto cfg = base_config(3, 6, 2);
  cfg.sigma1 = 0.0;
  const auto step = cbo_step(Ensemble({m, m, m}), w2_objective(dirac({0.0, 0.0})), cfg, 0);
  for (const auto& a : step.ensemble.agents())
    CHECK(w2(a, m) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("large alpha drives the barycenter to the best agent") {
  auto cfg = base_config(2, 1, 1);
  cfg.sigma1 = 0.0;
  cfg.alpha = 1e6;
  Ensemble e({dirac({0.0}), dirac({2.0})});
  const Objective mean_abs = [](const AtomicMeasure& m) {
    return std::abs(m.points().mean());
  };
  const auto step = cbo_step(e, mean_abs, cfg, 0);
  CHECK(step.barycenter.points()(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(step.ensemble.agent(0).points()(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(step.ensemble.agent(1).points()(0, 0) == doctest::Approx(2.0 - 2.0 * cfg.tau).epsilon(1e-6));
  CHECK(step.diag.best_agent == 0);
}

TEST_CASE("run_cbo composition and determinism") {
  auto cfg = base_config(3, 4, 2);
  cfg.sigma1 = 0.2;
  cfg.sigma2 = 0.1;
  cfg.k_max = 1;
  const auto target = make_target("ring", 16, 7);
  const auto objective = w2_objective(target);
  const auto e = sample_initial_ensemble(cfg);

  const auto rec1 = run_cbo(e, objective, cfg);
  const auto one = cbo_step(e, objective, cfg, 0);
  for (std::size_t i = 0; i < e.size(); ++i)
    CHECK(rec1.final_ensemble.agent(i).points() == one.ensemble.agent(i).points());

  cfg.k_max = 5;
  const auto ra = run_cbo(e, objective, cfg);
  const auto rb = run_cbo(e, objective, cfg);
  for (std::size_t i = 0; i < e.size(); ++i)
    CHECK(ra.final_ensemble.agent(i).points() == rb.final_ensemble.agent(i).points());
  for (int k = 0; k < cfg.k_max; ++k) {
    CHECK(ra.iterations[k].best_objective == rb.iterations[k].best_objective);
    CHECK(ra.iterations[k].best_objective ==
          *std::min_element(ra.iterations[k].objectives.begin(),
                            ra.iterations[k].objectives.end()));
  }
}

TEST_CASE("noise-free constant-objective run contracts the diameter") {
  auto cfg = base_config(3, 1, 1);
  cfg.sigma1 = 0.0;
  cfg.k_max = 12;
  Ensemble e({dirac({0.0}), dirac({1.0}), dirac({5.0})});
  const Objective constant = [](const AtomicMeasure&) { return 2.0; };
  const auto rec = run_cbo(e, constant, cfg);
  for (const auto& it : rec.iterations) CHECK(it.best_objective == 2.0);
  // Dirac agents with uniform weights follow Euclidean consensus exactly
  double lo = rec.final_ensemble.agent(0).points()(0, 0);
  double hi = lo;
  for (const auto& a : rec.final_ensemble.agents()) {
    lo = std::min(lo, a.points()(0, 0));
    hi = std::max(hi, a.points()(0, 0));
  }
  CHECK(hi - lo == doctest::Approx(5.0 * std::pow(1.0 - cfg.tau, 12)).epsilon(1e-9));
}

TEST_CASE("noise scaling: doubling sigma1 doubles each recorded sigma") {
  auto cfg = base_config(3, 4, 2);
  cfg.sigma1 = 0.3;
  cfg.sigma2 = 0.1;
  const auto e = sample_initial_ensemble(cfg);
  const auto objective = w2_objective(make_target("ring", 8, 5));
  const auto s1 = cbo_step(e, objective, cfg, 0);
  cfg.sigma1 = 0.6;
  const auto s2 = cbo_step(e, objective, cfg, 0);
  for (std::size_t i = 0; i < e.size(); ++i)
    CHECK(s2.diag.sigma[i] == doctest::Approx(2.0 * s1.diag.sigma[i]).epsilon(1e-12));
}

TEST_CASE("noise-free support containment") {
  auto cfg = base_config(4, 8, 2);
  cfg.sigma1 = 0.0;
  cfg.alpha = 2.0;
  cfg.k_max = 15;
  const auto e = sample_initial_ensemble(cfg);
  const Matrix hull = e.support_union();
  const auto objective = w2_objective(make_target("ring", 16, 3));
  const auto rec = run_cbo(e, objective, cfg);
  for (const auto& a : rec.final_ensemble.agents())
    CHECK(convex_hull_contains(hull, a.points(), 1e-9));
}

TEST_CASE("cbo_step rejects non-uniform or unequal agents") {
  auto cfg = base_config(2, 2, 1);
  const Objective constant = [](const AtomicMeasure&) { return 0.0; };
  Ensemble unequal({AtomicMeasure::uniform(testutil::points2({{0.0}, {1.0}})), dirac({0.0})});
  CHECK_THROWS_AS(cbo_step(unequal, constant, cfg, 0), std::invalid_argument);
}

TEST_CASE("make_target") {
  const auto ring = make_target("ring", 4, 9, 0.0);
  for (Index i = 0; i < 4; ++i)
    CHECK(ring.points().row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));

  const auto g = make_target("gaussians4", 4000, 11);
  CHECK(std::abs(g.points().col(0).mean()) < 0.1);
  CHECK(std::abs(g.points().col(1).mean()) < 0.1);

  const auto a = make_target("moons", 64, 13);
  const auto b = make_target("moons", 64, 13);
  CHECK(a.points() == b.points());

  const auto c = make_target("circles", 50, 1, 0.0);
  int inner = 0, outer = 0;
  for (Index i = 0; i < 50; ++i) {
    const double r = c.points().row(i).norm();
    if (std::abs(r - 0.5) < 1e-12) ++inner;
    if (std::abs(r - 1.0) < 1e-12) ++outer;
  }
  CHECK(inner + outer == 50);
  CHECK(inner > 0);
  CHECK(outer > 0);

  CHECK_THROWS_AS(make_target("pentagon", 10, 0), std::invalid_argument);
}
