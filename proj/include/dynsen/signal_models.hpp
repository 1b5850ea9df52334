#pragma once

#include "dynsen/graph.hpp"
#include "dynsen/random.hpp"
#include "dynsen/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dynsen {

/// Discrete time axis: step k (1-based) happens at t = k * sampling_period.
/// Training steps are 1..n_train, test steps continue at n_train+1.
struct TimeGrid {
  double sampling_period = std::numbers::pi / 30.0;
  int n_train = 0;
  int n_test = 0;

  double time(int step) const {
    if (step < 1) throw std::invalid_argument("TimeGrid: steps are 1-based");
    return step * sampling_period;
  }
  int first_test_step() const { return n_train + 1; }
};

/// Bandlimited signal source: x_t lives in the span of the first `bandwidth`
/// Laplacian eigenvectors, with oscillating coefficients whose amplitude
/// decays like 1/t.
class BandlimitedModel {
 public:
  BandlimitedModel(const Spectrum& s, int bandwidth) {
    if (bandwidth < 1 || bandwidth > s.eigenvectors.cols())
      throw std::invalid_argument("BandlimitedModel: bandwidth out of range");
    basis_ = s.eigenvectors.leftCols(bandwidth);
  }

  int bandwidth() const { return static_cast<int>(basis_.cols()); }

  /// Coefficient vector d_t: entry i (1-based in the formula) is
  /// (1/t) sin(10 t + (pi/M) i) + 1.
  Eigen::VectorXd coefficients(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("BandlimitedModel: t must be positive");
    const int m = bandwidth();
    Eigen::VectorXd d(m);
    for (int i = 1; i <= m; ++i) {
      const double phase = std::numbers::pi / m * i;
      d(i - 1) = std::sin(10.0 * t + phase) / t + 1.0;
    }
    return d;
  }

  Eigen::VectorXd signal(double t) const { return basis_ * coefficients(t); }

 private:
  Eigen::MatrixXd basis_;  // first M graph Fourier modes
};

/// Piecewise-constant signal source over exactly three connected clusters;
/// every node of a cluster carries the cluster's coefficient.
class PiecewiseConstantModel {
 public:
  PiecewiseConstantModel(int n_nodes, std::vector<std::vector<int>> clusters)
      : n_(n_nodes), clusters_(std::move(clusters)) {
    if (clusters_.size() != 3)
      throw std::invalid_argument("PiecewiseConstantModel: exactly three clusters required");
    std::vector<char> seen(n_, 0);
    for (const auto& cluster : clusters_) {
      if (cluster.empty()) throw std::invalid_argument("PiecewiseConstantModel: empty cluster");
      for (int v : cluster) {
        if (v < 0 || v >= n_) throw std::invalid_argument("PiecewiseConstantModel: node out of range");
        if (seen[v]) throw std::invalid_argument("PiecewiseConstantModel: clusters overlap");
        seen[v] = 1;
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw std::invalid_argument("PiecewiseConstantModel: clusters must cover all nodes");
  }

  const std::vector<std::vector<int>>& clusters() const { return clusters_; }

  /// Cluster coefficients: 3 (exp(-t/25) sin(i t + shift_i) + 1) with shifts
  /// (pi/3, 0, -pi/3) for clusters i = 1, 2, 3.
  Eigen::Vector3d coefficients(double t) const {
    const double envelope = std::exp(-t / 25.0);
    Eigen::Vector3d d;
    d(0) = 3.0 * (envelope * std::sin(1.0 * t + std::numbers::pi / 3.0) + 1.0);
    d(1) = 3.0 * (envelope * std::sin(2.0 * t) + 1.0);
    d(2) = 3.0 * (envelope * std::sin(3.0 * t - std::numbers::pi / 3.0) + 1.0);
    return d;
  }

  Eigen::VectorXd signal(double t) const {
    const Eigen::Vector3d d = coefficients(t);
    Eigen::VectorXd x(n_);
    for (int i = 0; i < 3; ++i)
      for (int v : clusters_[i]) x[v] = d(i);
    return x;
  }

 private:
  int n_;
  std::vector<std::vector<int>> clusters_;
};

/// Splits the vertex set into m nonempty parts, each inducing a connected
/// subgraph: m distinct seed nodes are drawn, then a randomly chosen region
/// absorbs an adjacent unassigned node until every node is assigned. Regions
/// stay connected because growth only ever crosses an edge.
inline std::vector<std::vector<int>> random_connected_partition(const Graph& graph, int m, Rng& rng) {
  const int n = graph.n_nodes();
  if (m < 1 || m > n) throw std::invalid_argument("random_connected_partition: m out of range");

  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i;
  std::vector<int> seeds;
  std::sample(nodes.begin(), nodes.end(), std::back_inserter(seeds), m, rng);

  std::vector<int> assignment(n, -1);
  std::vector<std::vector<int>> parts(m);
  // scan_pos[r]: members of part r before this index have no unassigned
  // neighbors left; assignment only shrinks the unassigned set, so the
  // position never needs to move backwards.
  std::vector<std::size_t> scan_pos(m, 0);
  std::vector<int> growable;
  for (int r = 0; r < m; ++r) {
    assignment[seeds[r]] = r;
    parts[r].push_back(seeds[r]);
    growable.push_back(r);
  }

  int assigned = m;
  while (assigned < n) {
    if (growable.empty())
      throw std::runtime_error("random_connected_partition: growth stalled on a connected graph");
    std::uniform_int_distribution<std::size_t> pick_region(0, growable.size() - 1);
    const std::size_t slot = pick_region(rng);
    const int r = growable[slot];

    int absorbed = -1;
    auto& part = parts[r];
    while (scan_pos[r] < part.size()) {
      std::vector<int> candidates;
      for (const auto& nb : graph.neighbors(part[scan_pos[r]]))
        if (assignment[nb.node] == -1) candidates.push_back(nb.node);
      if (!candidates.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        absorbed = candidates[pick(rng)];
        break;
      }
      ++scan_pos[r];
    }

    if (absorbed == -1) {
      growable[slot] = growable.back();
      growable.pop_back();
      continue;
    }
    assignment[absorbed] = r;
    part.push_back(absorbed);
    ++assigned;
  }

  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

/// x plus i.i.d. zero-mean Gaussian noise of the given variance.
inline Eigen::VectorXd add_noise(const Eigen::VectorXd& x, double variance, Rng& rng) {
  if (variance < 0.0) throw std::invalid_argument("add_noise: variance must be nonnegative");
  if (variance == 0.0) return x;
  return x + gaussian_vector(static_cast<int>(x.size()), std::sqrt(variance), rng);
}

}  // namespace dynsen
