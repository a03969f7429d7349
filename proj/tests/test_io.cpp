#include <doctest.h>

#include "wcon/io.hpp"

#include "test_util.hpp"

#include <sstream>

using namespace wcon;

TEST_CASE("point cloud round trip is exact") {
  std::mt19937_64 rng(103);
  for (int rep = 0; rep < 10; ++rep) {
    const auto m = testutil::random_weighted_measure(rng, 1 + rep, 1 + rep % 3, 3.0);
    std::stringstream ss;
    write_point_cloud(ss, m);
    const auto back = read_point_cloud(ss);
    REQUIRE(back.size() == m.size());
    CHECK((back.points() - m.points()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((back.weights() - m.weights()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("comments and uniform default") {
  std::stringstream ss("# a comment\n0 0\n1 1\n");
  const auto m = read_point_cloud(ss);
  CHECK(m.size() == 2);
  CHECK(m.dim() == 2);
  CHECK(m.weights()(0) == 0.5);
}

TEST_CASE("declared dimension disambiguates a weight column") {
  std::stringstream ss("# d=1\n0 0.25\n1 0.75\n");
  const auto m = read_point_cloud(ss);
  CHECK(m.dim() == 1);
  CHECK(m.weights()(1) == 0.75);
}

TEST_CASE("malformed input is rejected") {
  std::stringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_point_cloud(empty), std::invalid_argument);
  std::stringstream garbled("0 0\n1 x\n");
  CHECK_THROWS_AS(read_point_cloud(garbled), std::invalid_argument);
  std::stringstream ragged("0 0\n1\n");
  CHECK_THROWS_AS(read_point_cloud(ragged), std::invalid_argument);
}

TEST_CASE("format_double survives a parse round trip") {
  for (double v : {0.1, 1.0 / 3.0, 2e-17, -123.456789012345678, 1e300}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("coupling export") {
  const auto mu = AtomicMeasure::uniform(testutil::points2({{0.0}, {1.0}}));
  const auto nu = AtomicMeasure::uniform(testutil::points2({{2.0}, {3.0}}));
  const auto res = solve_ot(mu, nu);
  std::stringstream ss;
  write_coupling(ss, res.coupling);
  int lines = 0;
  std::string line;
  while (std::getline(ss, line)) ++lines;
  CHECK(lines == 2);
}
