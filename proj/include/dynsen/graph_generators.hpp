#pragma once

#include "dynsen/graph.hpp"
#include "dynsen/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dynsen {

namespace detail {

/// Gaussian-kernel k-nearest-neighbor graph over 2-D points: each point links
/// to its k nearest by Euclidean distance, edges are shared by union, and the
/// weight is exp(-d^2 / (2 sigma^2)) with sigma the mean k-NN distance.
/// May produce a disconnected graph; callers handle that.
inline std::vector<WeightedEdge> gaussian_knn_edges(const Eigen::MatrixX2d& points, int k) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) throw std::invalid_argument("gaussian_knn_edges: need at least two points");
  const int k_eff = std::min(k, n - 1);

  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  // k nearest neighbors per node; distance ties resolved toward lower index
  // by the stable sort so the construction is deterministic.
  std::vector<std::vector<int>> nearest(n);
  double sigma_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> order;
    order.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist(i, a) < dist(i, b); });
    order.resize(k_eff);
    for (int j : order) sigma_acc += dist(i, j);
    nearest[i] = std::move(order);
  }
  double sigma = sigma_acc / (static_cast<double>(n) * k_eff);
  if (sigma == 0.0) sigma = 1.0;  // all points coincide; keep weights finite

  std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j : nearest[i]) linked[std::min(i, j)][std::max(i, j)] = 1;

  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (linked[i][j]) edges.push_back({i, j, std::exp(-dist(i, j) * dist(i, j) / (2.0 * sigma * sigma))});
  return edges;
}

}  // namespace detail

/// k-nearest-neighbor graph over given coordinates. Throws if the result is
/// disconnected; regenerating the coordinates is up to the caller.
inline Graph knn_graph(const Eigen::MatrixX2d& points, int k) {
  return Graph::from_edges(static_cast<int>(points.rows()), detail::gaussian_knn_edges(points, k),
                           points);
}

/// Random sensor graph: n points uniform in the unit square, 6-nearest-neighbor
/// Gaussian-kernel weights. Coordinates are redrawn (up to 100 attempts) until
/// the graph is connected, so the returned graph always is.
inline Graph random_sensor_graph(int n, Rng& rng, int k = 6) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::MatrixX2d points(n, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      points(i, 0) = unit(rng);
      points(i, 1) = unit(rng);
    }
    try {
      return knn_graph(points, k);
    } catch (const std::invalid_argument&) {
      continue;  // disconnected draw; try again
    }
  }
  throw std::runtime_error("random_sensor_graph: no connected draw in 100 attempts");
}

/// Deterministic path graph, unit weights. Handy for small exact tests.
inline Graph path_graph(int n) {
  std::vector<WeightedEdge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, edges);
}

/// Deterministic 2-D grid graph with unit weights, rows*cols nodes, node
/// (r, c) at index r*cols + c, coordinates attached.
inline Graph grid_graph(int rows, int cols) {
  std::vector<WeightedEdge> edges;
  Eigen::MatrixX2d coords(rows * cols, 2);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      coords(v, 0) = static_cast<double>(c);
      coords(v, 1) = static_cast<double>(r);
      if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) edges.push_back({v, v + cols, 1.0});
    }
  }
  return Graph::from_edges(rows * cols, edges, coords);
}

}  // namespace dynsen
