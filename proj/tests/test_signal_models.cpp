#include "dynsen/graph.hpp"
#include "dynsen/graph_generators.hpp"
#include "dynsen/random.hpp"
#include "dynsen/signal_models.hpp"
#include "dynsen/spectral.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

using dynsen::BandlimitedModel;
using dynsen::Graph;
using dynsen::PiecewiseConstantModel;
using dynsen::Rng;
using dynsen::TimeGrid;

TEST_CASE("time grid starts at one sampling period", "[signal-models]") {
  TimeGrid grid;
  grid.n_train = 20;
  grid.n_test = 20;
  REQUIRE(grid.time(1) == grid.sampling_period);
  REQUIRE(grid.time(7) == 7.0 * grid.sampling_period);
  REQUIRE(grid.first_test_step() == 21);
  REQUIRE_THROWS_AS(grid.time(0), std::invalid_argument);
}

TEST_CASE("bandlimited signals have no energy above the cutoff", "[signal-models]") {
  Rng rng(101);
  const Graph g = dynsen::random_sensor_graph(64, rng);
  const auto s = dynsen::spectrum(g);
  const int m = 8;
  const BandlimitedModel model(s, m);
  const Eigen::VectorXd x = model.signal(0.7);
  const Eigen::VectorXd coeff = dynsen::gft(s, x);
  double tail_energy = 0.0;
  for (int i = m; i < 64; ++i) {
    REQUIRE(std::abs(coeff(i)) <= 1e-12);
    tail_energy += coeff(i) * coeff(i);
  }
  REQUIRE(tail_energy < 1e-20);
}

TEST_CASE("transform of a bandlimited signal returns its coefficients", "[signal-models]") {
  Rng rng(102);
  const Graph g = dynsen::random_sensor_graph(32, rng);
  const auto s = dynsen::spectrum(g);
  const int m = 6;
  const BandlimitedModel model(s, m);
  const double t = 1.3;
  const Eigen::VectorXd coeff = dynsen::gft(s, model.signal(t));
  const Eigen::VectorXd d = model.coefficients(t);
  for (int i = 0; i < m; ++i) REQUIRE(std::abs(coeff(i) - d(i)) < 1e-12);
}

TEST_CASE("coefficient formula evaluated independently", "[signal-models]") {
  Rng rng(103);
  const Graph g = dynsen::random_sensor_graph(256, rng);
  const auto s = dynsen::spectrum(g);
  const int m = 16;
  const BandlimitedModel model(s, m);
  const double t = M_PI / 30.0;
  const Eigen::VectorXd d = model.coefficients(t);
  REQUIRE(d.size() == m);
  for (int i = 1; i <= m; ++i) {
    const double expect = std::sin(10.0 * t + (M_PI / m) * i) / t + 1.0;
    REQUIRE(std::abs(d(i - 1) - expect) < 1e-15);
  }
  // late times decay toward the unit offset
  const Eigen::VectorXd late = model.coefficients(1e9);
  for (int i = 0; i < m; ++i) REQUIRE(std::abs(late(i) - 1.0) < 1e-8);
  REQUIRE_THROWS_AS(model.coefficients(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(model.coefficients(-1.0), std::invalid_argument);
}

TEST_CASE("piecewise constant signals are flat on each cluster", "[signal-models]") {
  Rng rng(104);
  const Graph g = dynsen::random_sensor_graph(60, rng);
  const auto parts = dynsen::random_connected_partition(g, 3, rng);
  const PiecewiseConstantModel model(60, parts);
  const Eigen::VectorXd x = model.signal(2.1);
  for (const auto& cluster : parts) {
    const double v = x(cluster[0]);
    for (int node : cluster) REQUIRE(x(node) == v);
  }
  // the three cluster values are exactly the three coefficients
  const Eigen::VectorXd d = model.coefficients(2.1);
  for (int c = 0; c < 3; ++c) REQUIRE(x(parts[c][0]) == d(c));
}

TEST_CASE("cluster values match the closed forms", "[signal-models]") {
  const std::vector<std::vector<int>> parts{{0, 1}, {2}, {3, 4, 5}};
  const PiecewiseConstantModel model(6, parts);
  const double t = 5.0;
  const Eigen::VectorXd d = model.coefficients(t);
  const double e = std::exp(-t / 25.0);
  REQUIRE(std::abs(d(0) - 3.0 * (e * std::sin(t + M_PI / 3.0) + 1.0)) < 1e-15);
  REQUIRE(std::abs(d(1) - 3.0 * (e * std::sin(2.0 * t) + 1.0)) < 1e-15);
  REQUIRE(std::abs(d(2) - 3.0 * (e * std::sin(3.0 * t - M_PI / 3.0) + 1.0)) < 1e-15);
  // far in the future the envelope underflows and only the offset remains
  const Eigen::VectorXd late = model.coefficients(1e6);
  for (int c = 0; c < 3; ++c) REQUIRE(late(c) == 3.0);
}

TEST_CASE("piecewise model validates its clusters", "[signal-models]") {
  using Parts = std::vector<std::vector<int>>;
  REQUIRE_THROWS_AS(PiecewiseConstantModel(4, Parts{{0, 1}, {2, 3}}), std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstantModel(4, Parts{{0}, {1}, {}}), std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstantModel(4, Parts{{0, 1}, {1, 2}, {3}}), std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstantModel(5, Parts{{0, 1}, {2}, {3}}), std::invalid_argument);
  REQUIRE_NOTHROW(PiecewiseConstantModel(4, Parts{{0, 1}, {2}, {3}}));
}

TEST_CASE("random partitions cover the graph with connected pieces", "[signal-models]") {
  Rng rng(105);
  const Graph g = dynsen::random_sensor_graph(256, rng);
  const auto parts = dynsen::random_connected_partition(g, 3, rng);
  REQUIRE(parts.size() == 3);
  std::set<int> seen;
  for (const auto& p : parts) {
    REQUIRE(!p.empty());
    REQUIRE(std::is_sorted(p.begin(), p.end()));
    REQUIRE(oracles::induces_connected_subgraph(g, p));
    for (int v : p) REQUIRE(seen.insert(v).second);
  }
  REQUIRE(static_cast<int>(seen.size()) == 256);
}

TEST_CASE("partition edge cases and determinism", "[signal-models]") {
  Rng rng(106);
  const Graph g = dynsen::random_sensor_graph(12, rng);
  Rng a(9), b(9);
  const auto p1 = dynsen::random_connected_partition(g, 3, a);
  const auto p2 = dynsen::random_connected_partition(g, 3, b);
  REQUIRE(p1 == p2);
  Rng c(10);
  const auto whole = dynsen::random_connected_partition(g, 1, c);
  REQUIRE(whole.size() == 1);
  REQUIRE(static_cast<int>(whole[0].size()) == 12);
  const auto singletons = dynsen::random_connected_partition(g, 12, c);
  REQUIRE(singletons.size() == 12);
  for (const auto& p : singletons) REQUIRE(p.size() == 1);
  REQUIRE_THROWS_AS(dynsen::random_connected_partition(g, 0, c), std::invalid_argument);
  REQUIRE_THROWS_AS(dynsen::random_connected_partition(g, 13, c), std::invalid_argument);
}

TEST_CASE("noise injection is reproducible and well scaled", "[signal-models]") {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, 0.0, 9.0);
  Rng rng(201);
  const Eigen::VectorXd same = dynsen::add_noise(x, 0.0, rng);
  REQUIRE((same - x).cwiseAbs().maxCoeff() == 0.0);
  Rng a(77), b(77);
  const Eigen::VectorXd n1 = dynsen::add_noise(x, 0.1, a);
  const Eigen::VectorXd n2 = dynsen::add_noise(x, 0.1, b);
  REQUIRE((n1 - n2).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((n1 - x).cwiseAbs().maxCoeff() > 0.0);
  // empirical variance over a long draw
  const int big = 10000;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(big);
  Rng wide(31);
  const Eigen::VectorXd noise = dynsen::add_noise(zero, 0.1, wide);
  const double mean = noise.mean();
  const double var = (noise.array() - mean).square().sum() / (big - 1);
  REQUIRE(std::abs(var - 0.1) < 0.005);
  REQUIRE_THROWS_AS(dynsen::add_noise(x, -0.1, a), std::invalid_argument);
}

TEST_CASE("bandlimited trajectory varies smoothly in time", "[signal-models]") {
  Rng rng(107);
  const Graph g = dynsen::random_sensor_graph(64, rng);
  const auto s = dynsen::spectrum(g);
  const int m = 16;
  const BandlimitedModel model(s, m);
  const double dt = M_PI / 30.0;
  // the coefficient map t -> sin(10t + phase)/t + 1 has derivative bounded by
  // 10/t + 1/t^2 on [t, t+dt] with a nonincreasing envelope, so consecutive
  // signals differ by at most sqrt(M) * dt * (10/t + 1/t^2)
  double prev_bound = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 40; ++k) {
    const double t = k * dt;
    const Eigen::VectorXd diff = model.signal(t + dt) - model.signal(t);
    const double bound = std::sqrt(static_cast<double>(m)) * dt * (10.0 / t + 1.0 / (t * t));
    REQUIRE(diff.norm() <= bound + 1e-12);
    REQUIRE(bound <= prev_bound);
    prev_bound = bound;
  }
}
