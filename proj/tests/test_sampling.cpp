#include "dynsen/filters.hpp"
#include "dynsen/graph.hpp"
#include "dynsen/graph_generators.hpp"
#include "dynsen/linalg.hpp"
#include "dynsen/random.hpp"
#include "dynsen/sampling.hpp"
#include "dynsen/spectral.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

using dynsen::Graph;
using dynsen::GreedyOptions;
using dynsen::Rng;
using dynsen::SamplingOperator;

TEST_CASE("unfiltered sampling reads the chosen entries", "[sampling]") {
  Eigen::VectorXd x(6);
  x << 10, 11, 12, 13, 14, 15;
  SamplingOperator op;
  op.nodes = {2, 5};
  Rng rng(1);
  const Eigen::VectorXd c = dynsen::sample(op, x, 0.0, rng);
  REQUIRE(c.size() == 2);
  REQUIRE(c(0) == 12.0);
  REQUIRE(c(1) == 15.0);
  const Eigen::VectorXd zero = dynsen::sample(op, Eigen::VectorXd::Zero(6), 0.0, rng);
  REQUIRE(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampling validates the node set", "[sampling]") {
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  Rng rng(2);
  SamplingOperator op;
  op.nodes = {};
  REQUIRE_THROWS_AS(dynsen::sample(op, x, 0.0, rng), std::invalid_argument);
  op.nodes = {4};
  REQUIRE_THROWS_AS(dynsen::sample(op, x, 0.0, rng), std::invalid_argument);
  op.nodes = {1, 1};
  REQUIRE_THROWS_AS(dynsen::sample(op, x, 0.0, rng), std::invalid_argument);
  op.nodes = {1};
  REQUIRE_THROWS_AS(dynsen::sample(op, x, -1.0, rng), std::invalid_argument);
}

TEST_CASE("filtered sampling matches the dense product", "[sampling]") {
  Rng rng(3);
  const Graph g = dynsen::random_sensor_graph(16, rng);
  const auto s = dynsen::spectrum(g);
  dynsen::FilterSpec spec;
  spec.kind = dynsen::FilterKind::lowpass_cosine;
  const Eigen::MatrixXd filt =
      dynsen::exact_filter_matrix(s, dynsen::filter_response(spec, s.lambda_max()));
  const Eigen::VectorXd x = dynsen::gaussian_vector(16, 1.0, rng);
  SamplingOperator op;
  op.nodes = {0, 4, 9, 15};
  op.filter = &filt;
  const Eigen::VectorXd c = dynsen::sample(op, x, 0.0, rng);
  const Eigen::VectorXd full = filt * x;
  for (std::size_t i = 0; i < op.nodes.size(); ++i)
    REQUIRE(std::abs(c(static_cast<int>(i)) - full(op.nodes[i])) < 1e-14);
}

TEST_CASE("noise draws do not depend on sensor placement", "[sampling]") {
  // with G = I the measurement at node v equals x_v plus the v-th entry of a
  // full-length noise vector drawn from the generator, so two operators with
  // different nodes but the same seed see the same underlying noise field
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(12);
  SamplingOperator a;
  a.nodes = {0, 1, 2};
  SamplingOperator b;
  b.nodes = {9, 10, 11};
  Rng r1(55), r2(55), r3(55);
  const Eigen::VectorXd ca = dynsen::sample(a, x, 0.25, r1);
  const Eigen::VectorXd cb = dynsen::sample(b, x, 0.25, r2);
  const Eigen::VectorXd field = dynsen::gaussian_vector(12, 0.5, r3);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(ca(i) == field(a.nodes[i]));
    REQUIRE(cb(i) == field(b.nodes[i]));
  }
}

TEST_CASE("sampled dictionary picks rows of GA", "[sampling]") {
  Rng rng(4);
  const Eigen::MatrixXd a = dynsen::gaussian_matrix(10, 3, 1.0, rng);
  SamplingOperator op;
  op.nodes = {7, 2};
  const Eigen::MatrixXd sa = dynsen::sampled_dictionary(op, a);
  REQUIRE(sa.rows() == 2);
  REQUIRE((sa.row(0) - a.row(7)).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((sa.row(1) - a.row(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("subspace signals are recovered exactly from enough samples", "[sampling]") {
  Rng rng(5);
  const Graph g = dynsen::random_sensor_graph(32, rng);
  const auto s = dynsen::spectrum(g);
  const int m = 5;
  const Eigen::MatrixXd a = s.eigenvectors.leftCols(m);
  const Eigen::VectorXd d = dynsen::gaussian_vector(m, 1.0, rng);
  const Eigen::VectorXd x = a * d;
  SamplingOperator op;
  op.nodes = {1, 8, 13, 21, 30};
  const Eigen::VectorXd c = dynsen::sample(op, x, 0.0, rng);
  const Eigen::VectorXd xr = dynsen::reconstruct(op, a, c);
  REQUIRE((xr - x).cwiseAbs().maxCoeff() < 1e-8);
  // zero measurements reconstruct the zero signal
  const Eigen::VectorXd z = dynsen::reconstruct(op, a, Eigen::VectorXd::Zero(m));
  REQUIRE(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reconstruction agrees with a least squares oracle", "[sampling]") {
  Rng rng(6);
  const Eigen::MatrixXd a = dynsen::gaussian_matrix(20, 4, 1.0, rng);
  SamplingOperator op;
  op.nodes = {0, 3, 7, 11, 15, 19};
  const Eigen::VectorXd c = dynsen::gaussian_vector(6, 1.0, rng);
  const Eigen::VectorXd lib = dynsen::reconstruct(op, a, c);
  const Eigen::VectorXd ref = oracles::lsq_reconstruct(dynsen::sampled_dictionary(op, a), a, c);
  REQUIRE((lib - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degenerate sampling is reported", "[sampling]") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 2);
  a(4, 0) = 1.0;
  a(5, 1) = 1.0;
  SamplingOperator op;
  op.nodes = {0, 1};  // rows of A at these nodes vanish identically
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(2);
  REQUIRE_THROWS_AS(dynsen::reconstruct(op, a, c), std::runtime_error);
  REQUIRE_THROWS_WITH(dynsen::reconstruct(op, a, c), "reconstruct: degenerate sampling");
}

TEST_CASE("design matrix construction", "[sampling]") {
  Rng rng(7);
  const Eigen::MatrixXd a = dynsen::gaussian_matrix(9, 4, 1.0, rng);
  const Eigen::MatrixXd z = dynsen::build_Z(a);
  REQUIRE((z - a * a.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  REQUIRE((z - z.transpose()).cwiseAbs().maxCoeff() == 0.0);  // exact symmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z);
  REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
  const Eigen::MatrixXd g = oracles::random_psd(9, 9, rng);
  const Eigen::MatrixXd zg = dynsen::build_Z(a, g);
  REQUIRE((zg - g * a * a.transpose() * g.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  REQUIRE((zg - zg.transpose()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(dynsen::build_Z(a, Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("greedy on a diagonal matrix ranks the diagonal", "[sampling]") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(5, 5);
  z.diagonal() << 3.0, 9.0, 1.0, 7.0, 5.0;
  const auto sel = dynsen::greedy_select(z, 3);
  REQUIRE(sel.nodes == std::vector<int>{1, 3, 4});
  REQUIRE(sel.gains == std::vector<double>{9.0, 7.0, 5.0});
}

TEST_CASE("greedy gains are determinant ratios", "[sampling]") {
  Rng rng(8);
  const Eigen::MatrixXd z = oracles::random_psd(12, 12, rng);
  const auto sel = dynsen::greedy_select(z, 4);
  double prev_det = 1.0;
  std::vector<int> prefix;
  for (int j = 0; j < 4; ++j) {
    prefix.push_back(sel.nodes[j]);
    const double det = oracles::subset_det(z, prefix);
    const double ratio = det / prev_det;
    REQUIRE(std::abs(sel.gains[j] - ratio) < 1e-8 * std::max(1.0, std::abs(ratio)));
    prev_det = det;
  }
}

TEST_CASE("greedy is exhaustively optimal at each step", "[sampling]") {
  // the greedy guarantee: conditioned on the chosen prefix, the next pick has
  // the maximal determinant among all single-node extensions
  Rng rng(9);
  const Eigen::MatrixXd z = oracles::random_psd(10, 10, rng);
  const auto sel = dynsen::greedy_select(z, 4);
  std::vector<int> prefix;
  for (int j = 0; j < 4; ++j) {
    double best_ext = -1.0;
    for (int y = 0; y < 10; ++y) {
      if (std::find(prefix.begin(), prefix.end(), y) != prefix.end()) continue;
      std::vector<int> trial = prefix;
      trial.push_back(y);
      best_ext = std::max(best_ext, oracles::subset_det(z, trial));
    }
    std::vector<int> taken = prefix;
    taken.push_back(sel.nodes[j]);
    const double got = oracles::subset_det(z, taken);
    REQUIRE(got >= best_ext * (1.0 - 1e-9));
    prefix.push_back(sel.nodes[j]);
  }
}

TEST_CASE("greedy ties resolve to the lowest index", "[sampling]") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Identity(6, 6);
  const auto sel = dynsen::greedy_select(z, 3);
  REQUIRE(sel.nodes == std::vector<int>{0, 1, 2});
}

TEST_CASE("greedy selection is invariant to uniform scaling", "[sampling]") {
  Rng rng(10);
  const Eigen::MatrixXd z = oracles::random_psd(15, 15, rng);
  const auto a = dynsen::greedy_select(z, 5);
  const auto b = dynsen::greedy_select(Eigen::MatrixXd(1e6 * z), 5);
  REQUIRE(a.nodes == b.nodes);
}

TEST_CASE("rank deficiency raises or pads by option", "[sampling]") {
  Rng rng(11);
  const Eigen::MatrixXd z = oracles::random_psd(8, 2, rng);  // rank 2
  REQUIRE_THROWS_AS(dynsen::greedy_select(z, 5), std::runtime_error);
  GreedyOptions opts;
  opts.allow_rank_deficient = true;
  const auto sel = dynsen::greedy_select(z, 5, opts);
  REQUIRE(sel.nodes.size() == 5);
  REQUIRE(sel.gains[0] > 0.0);
  REQUIRE(sel.gains[1] > 0.0);
  for (int j = 2; j < 5; ++j) REQUIRE(sel.gains[j] == 0.0);
  // padded picks are the lowest unchosen indices in order
  std::vector<int> pad(sel.nodes.begin() + 2, sel.nodes.end());
  REQUIRE(std::is_sorted(pad.begin(), pad.end()));
  // all-zero matrix cannot start at all without the option
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 4);
  REQUIRE_THROWS_AS(dynsen::greedy_select(zero, 2), std::runtime_error);
  const auto padded = dynsen::greedy_select(zero, 2, opts);
  REQUIRE(padded.nodes == std::vector<int>{0, 1});
}

TEST_CASE("greedy argument validation", "[sampling]") {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Identity(4, 4);
  REQUIRE_THROWS_AS(dynsen::greedy_select(z, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(dynsen::greedy_select(z, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(dynsen::greedy_select(Eigen::MatrixXd::Zero(3, 4), 2), std::invalid_argument);
}

TEST_CASE("schur complements stay consistent through a long run", "[sampling]") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 10 + static_cast<int>(rng() % 11);
    const Eigen::MatrixXd z = oracles::random_psd(n, n, rng);
    const auto sel = dynsen::greedy_select(z, n / 2);
    std::vector<int> prefix;
    double log_det = 0.0;
    for (std::size_t j = 0; j < sel.nodes.size(); ++j) {
      prefix.push_back(sel.nodes[j]);
      log_det += std::log(sel.gains[j]);
      const double direct = std::log(oracles::subset_det(z, prefix));
      REQUIRE(std::abs(log_det - direct) < 1e-6 * std::max(1.0, std::abs(direct)));
    }
  }
}
