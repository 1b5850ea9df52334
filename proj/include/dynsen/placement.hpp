#pragma once

#include "dynsen/graph.hpp"
#include "dynsen/linalg.hpp"
#include "dynsen/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dynsen {

/// Hop limit meaning "anywhere in the sensor's own region".
inline constexpr int kInfiniteHops = std::numeric_limits<int>::max();

/// One sensor's relocation decision for a step. from_node == to_node means the
/// sensor stays put.
struct SensorMove {
  int sensor = 0;
  int from_node = 0;
  int to_node = 0;
  double score = 0.0;  ///< projection gain of to_node against the other sensors
};

struct PlacementStepResult {
  std::vector<int> positions;  ///< new position per sensor, same order as input
  std::vector<SensorMove> moves;
};

enum class Execution { sequential, parallel };

/// Selection matrix: row d holds dictionary atom d filtered by the sensing
/// matrix, so column y is the measurement signature of node y. sensing may be
/// nullptr for G = I.
inline Eigen::MatrixXd selection_matrix(const Eigen::MatrixXd& dictionary,
                                        const Eigen::MatrixXd* sensing) {
  if (sensing == nullptr) return dictionary.transpose();
  if (sensing->rows() != dictionary.rows() || sensing->cols() != dictionary.rows())
    throw std::invalid_argument("selection_matrix: dimension mismatch");
  return dictionary.transpose() * *sensing;
}

/// Orthonormal basis of the span of the signature columns at `nodes`.
inline Eigen::MatrixXd projection_basis(const Eigen::MatrixXd& n, const std::vector<int>& nodes) {
  if (nodes.empty()) return Eigen::MatrixXd(n.rows(), 0);
  Eigen::MatrixXd cols(n.rows(), nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 0 || nodes[i] >= n.cols())
      throw std::invalid_argument("projection_basis: node out of range");
    cols.col(static_cast<Eigen::Index>(i)) = n.col(nodes[i]);
  }
  return orthonormal_range_basis(cols);
}

/// Projection gain of candidate y given an orthonormal basis of the other
/// sensors' signature span: the squared norm of the component of column y
/// outside that span. Clamped at zero against rounding.
inline double psi_score_with_basis(const Eigen::MatrixXd& n, const Eigen::MatrixXd& basis, int y) {
  if (y < 0 || y >= n.cols()) throw std::invalid_argument("psi_score: node out of range");
  const auto col = n.col(y);
  double value = col.squaredNorm();
  if (basis.cols() > 0) value -= (basis.transpose() * col).squaredNorm();
  return std::max(value, 0.0);
}

/// Projection gain of candidate y against the signature columns at `others`.
/// y itself must not be one of the others.
inline double psi_score(const Eigen::MatrixXd& n, const std::vector<int>& others, int y) {
  for (int m : others)
    if (m == y) throw std::invalid_argument("psi_score: candidate is among the projected nodes");
  return psi_score_with_basis(n, projection_basis(n, others), y);
}

/// Candidate nodes for sensor i: its Voronoi region intersected with the
/// hop_limit-hop ball around its current position, ascending node order. The
/// current position is always a member.
inline std::vector<int> feasible_set(const Graph& graph, const VoronoiPartition& partition,
                                     int sensor, int hop_limit) {
  if (sensor < 0 || sensor >= static_cast<int>(partition.generators.size()))
    throw std::invalid_argument("feasible_set: sensor index out of range");
  if (hop_limit < 0) throw std::invalid_argument("feasible_set: hop limit must be nonnegative");
  const auto& region = partition.regions[sensor];
  if (hop_limit == kInfiniteHops) return region;
  const std::vector<int> dist = hop_distances_within(graph, partition.generators[sensor], hop_limit);
  std::vector<int> feasible;
  for (int v : region)
    if (dist[v] != kUnreachable) feasible.push_back(v);
  return feasible;
}

/// Best relocation for one sensor: argmax of the projection gain over its
/// feasible set, projecting against every other sensor's current signature.
/// The sensor keeps its position unless a candidate scores strictly higher;
/// among strictly better candidates the lowest node index wins.
inline SensorMove relocate_sensor(const Graph& graph, const Eigen::MatrixXd& n,
                                  const std::vector<int>& positions,
                                  const VoronoiPartition& partition, int sensor, int hop_limit) {
  const int current = positions[sensor];
  std::vector<int> others;
  others.reserve(positions.size() - 1);
  for (std::size_t j = 0; j < positions.size(); ++j)
    if (static_cast<int>(j) != sensor) others.push_back(positions[j]);
  const Eigen::MatrixXd basis = projection_basis(n, others);

  SensorMove move;
  move.sensor = sensor;
  move.from_node = current;
  move.to_node = current;
  move.score = psi_score_with_basis(n, basis, current);
  for (int y : feasible_set(graph, partition, sensor, hop_limit)) {
    if (y == current) continue;
    const double score = psi_score_with_basis(n, basis, y);
    if (score > move.score) {
      move.score = score;
      move.to_node = y;
    }
  }
  return move;
}

namespace detail {

inline void validate_positions(const Graph& graph, const std::vector<int>& positions) {
  if (positions.empty()) throw std::invalid_argument("placement: no sensors");
  std::vector<char> seen(graph.n_nodes(), 0);
  for (int q : positions) {
    if (q < 0 || q >= graph.n_nodes()) throw std::invalid_argument("placement: position out of range");
    if (seen[q]) throw std::invalid_argument("placement: duplicate sensor positions");
    seen[q] = 1;
  }
}

}  // namespace detail

/// Relocation decisions for the whole fleet against the shared snapshot
/// (positions, partition, signatures). Each sensor's decision is independent
/// of the others' decisions, so the parallel execution is schedule-free and
/// returns exactly the sequential result.
inline std::vector<SensorMove> relocate_all(const Graph& graph, const Eigen::MatrixXd& n,
                                            const std::vector<int>& positions,
                                            const VoronoiPartition& partition, int hop_limit,
                                            Execution execution = Execution::sequential) {
  detail::validate_positions(graph, positions);
  if (partition.generators != positions)
    throw std::invalid_argument("relocate_all: partition does not match positions");
  const int k = static_cast<int>(positions.size());
  std::vector<SensorMove> moves(k);
  if (execution == Execution::sequential || k == 1) {
    for (int i = 0; i < k; ++i) moves[i] = relocate_sensor(graph, n, positions, partition, i, hop_limit);
    return moves;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  const int n_threads = std::min<int>(k, hw > 0 ? static_cast<int>(hw) : 2);
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < k; i += n_threads)
        moves[i] = relocate_sensor(graph, n, positions, partition, i, hop_limit);
    });
  }
  for (auto& worker : workers) worker.join();
  return moves;
}

/// One full placement step: build signatures from the dictionary and sensing
/// matrix, partition the graph around the current positions, and relocate
/// every sensor within its own region. Regions are disjoint, so the new
/// positions stay distinct.
inline PlacementStepResult placement_step(const Graph& graph, const Eigen::MatrixXd& dictionary,
                                          const Eigen::MatrixXd* sensing,
                                          const std::vector<int>& positions, int hop_limit,
                                          Execution execution = Execution::sequential) {
  const Eigen::MatrixXd n = selection_matrix(dictionary, sensing);
  const VoronoiPartition partition = voronoi_partition(graph, positions);
  PlacementStepResult result;
  result.moves = relocate_all(graph, n, positions, partition, hop_limit, execution);
  result.positions.reserve(positions.size());
  for (const auto& move : result.moves) result.positions.push_back(move.to_node);
  return result;
}

/// Projection gains of the nodes taken in order: gains[j] is the gain of
/// nodes[j] against the span of nodes[0..j-1]. Summing them gives the total
/// subspace energy captured by the ordered selection.
inline std::vector<double> sequential_gains(const Eigen::MatrixXd& n, const std::vector<int>& nodes) {
  std::vector<double> gains;
  gains.reserve(nodes.size());
  std::vector<int> prefix;
  for (int y : nodes) {
    gains.push_back(psi_score(n, prefix, y));
    prefix.push_back(y);
  }
  return gains;
}

/// Comparison of one distributed relocation round against the centralized
/// greedy selection over all nodes, both scored as ordered projection gains.
struct GapReport {
  std::vector<int> centralized_nodes;
  std::vector<int> distributed_nodes;
  std::vector<double> centralized_gains;
  std::vector<double> distributed_gains;
  double centralized_total = 0.0;
  double distributed_total = 0.0;
  bool upper_holds = false;  ///< centralized >= distributed
  bool lower_holds = false;  ///< distributed >= centralized / K
};

/// Runs one distributed relocation from `positions` and compares its total
/// ordered gain with the centralized greedy total over all of V with the same
/// number of sensors.
inline GapReport gap_check(const Graph& graph, const Eigen::MatrixXd& n,
                           const std::vector<int>& positions, int hop_limit = kInfiniteHops) {
  detail::validate_positions(graph, positions);
  const int k = static_cast<int>(positions.size());

  GapReport report;
  const VoronoiPartition partition = voronoi_partition(graph, positions);
  const auto moves = relocate_all(graph, n, positions, partition, hop_limit);
  for (const auto& move : moves) report.distributed_nodes.push_back(move.to_node);
  report.distributed_gains = sequential_gains(n, report.distributed_nodes);

  GreedyOptions options;
  options.allow_rank_deficient = true;
  const GreedySelection greedy = greedy_select(build_Z(n.transpose()), k, options);
  report.centralized_nodes = greedy.nodes;
  report.centralized_gains = sequential_gains(n, report.centralized_nodes);

  for (double g : report.centralized_gains) report.centralized_total += g;
  for (double g : report.distributed_gains) report.distributed_total += g;

  const double tol = 1e-9 * std::max(1.0, report.centralized_total);
  report.upper_holds = report.centralized_total >= report.distributed_total - tol;
  report.lower_holds = report.distributed_total >= report.centralized_total / k - tol;
  return report;
}

}  // namespace dynsen
