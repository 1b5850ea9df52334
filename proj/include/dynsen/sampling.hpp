#pragma once

#include "dynsen/linalg.hpp"
#include "dynsen/random.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dynsen {

namespace detail {

inline void require_valid_nodes(const std::vector<int>& nodes, int n) {
  if (nodes.empty()) throw std::invalid_argument("sampling: node set must be nonempty");
  std::vector<char> seen(n, 0);
  for (int v : nodes) {
    if (v < 0 || v >= n) throw std::invalid_argument("sampling: node index out of range");
    if (seen[v]) throw std::invalid_argument("sampling: duplicate node index");
    seen[v] = 1;
  }
}

}  // namespace detail

/// Node-wise sampling: reads the sensing-filter output at K chosen nodes.
/// `filter` points at the dense sensing matrix G; nullptr means G = I.
/// The operator does not own the filter matrix.
struct SamplingOperator {
  std::vector<int> nodes;
  const Eigen::MatrixXd* filter = nullptr;
};

/// Measured vector c: additive white Gaussian noise on every node, then the
/// sensing filter, then row selection. The noise vector always has full length
/// N and is drawn before filtering, so the draw sequence does not depend on
/// where the sensors sit.
inline Eigen::VectorXd sample(const SamplingOperator& op, const Eigen::VectorXd& x,
                              double noise_variance, Rng& rng) {
  const int n = static_cast<int>(x.size());
  detail::require_valid_nodes(op.nodes, n);
  if (noise_variance < 0.0) throw std::invalid_argument("sample: variance must be nonnegative");
  Eigen::VectorXd noisy = x;
  if (noise_variance > 0.0) noisy += gaussian_vector(n, std::sqrt(noise_variance), rng);
  Eigen::VectorXd c(op.nodes.size());
  if (op.filter == nullptr) {
    for (std::size_t i = 0; i < op.nodes.size(); ++i) c[static_cast<Eigen::Index>(i)] = noisy[op.nodes[i]];
  } else {
    if (op.filter->rows() != n || op.filter->cols() != n)
      throw std::invalid_argument("sample: filter dimension mismatch");
    for (std::size_t i = 0; i < op.nodes.size(); ++i)
      c[static_cast<Eigen::Index>(i)] = op.filter->row(op.nodes[i]).dot(noisy);
  }
  return c;
}

/// Rows of (G A) at the operator's nodes: the K x D matrix S^T G A that maps
/// subspace coefficients to measurements.
inline Eigen::MatrixXd sampled_dictionary(const SamplingOperator& op, const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  detail::require_valid_nodes(op.nodes, n);
  Eigen::MatrixXd sa(op.nodes.size(), a.cols());
  for (std::size_t i = 0; i < op.nodes.size(); ++i) {
    if (op.filter == nullptr) {
      sa.row(static_cast<Eigen::Index>(i)) = a.row(op.nodes[i]);
    } else {
      sa.row(static_cast<Eigen::Index>(i)) = op.filter->row(op.nodes[i]) * a;
    }
  }
  return sa;
}

/// Best recovery under the subspace model: x = A (S^T G A)^+ c. The
/// pseudoinverse drops singular values below kSvdRelCutoff * sigma_max; an
/// all-zero sampled dictionary cannot be inverted at all.
inline Eigen::VectorXd reconstruct(const SamplingOperator& op, const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& c) {
  if (static_cast<std::size_t>(c.size()) != op.nodes.size())
    throw std::invalid_argument("reconstruct: measurement length mismatch");
  const Eigen::MatrixXd sa = sampled_dictionary(op, a);
  if (spectral_norm(sa) == 0.0) throw std::runtime_error("reconstruct: degenerate sampling");
  return a * (pseudo_inverse(sa) * c);
}

/// Design matrix Z = (G A)(G A)^T whose principal minors the greedy selection
/// maximizes. Exactly symmetric by construction.
inline Eigen::MatrixXd build_Z(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g) {
  if (g.rows() != a.rows() || g.cols() != a.rows())
    throw std::invalid_argument("build_Z: dimension mismatch");
  const Eigen::MatrixXd b = g * a;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(b.rows(), b.rows());
  z.selfadjointView<Eigen::Lower>().rankUpdate(b);
  return z.selfadjointView<Eigen::Lower>();
}

/// build_Z with G = I.
inline Eigen::MatrixXd build_Z(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(a.rows(), a.rows());
  z.selfadjointView<Eigen::Lower>().rankUpdate(a);
  return z.selfadjointView<Eigen::Lower>();
}

struct GreedyOptions {
  /// A gain below gain_floor_rel * max(diag(Z)) counts as numerically zero.
  double gain_floor_rel = 1e-12;
  /// With the floor reached before k picks: pad with zero-gain nodes (lowest
  /// index first) instead of failing. Off by default.
  bool allow_rank_deficient = false;
};

struct GreedySelection {
  std::vector<int> nodes;
  /// gains[j] is the determinant ratio det(Z_{M_j}) / det(Z_{M_{j-1}})
  /// achieved by the j-th pick (the Schur complement of the pick).
  std::vector<double> gains;
};

/// Greedy determinant maximization over principal submatrices of a PSD Z:
/// each step appends the node with the largest Schur complement with respect
/// to the already chosen set, ties going to the lowest index. Implemented as
/// an incremental Cholesky factorization restricted to the chosen pivots, so
/// a full run costs O(k^2 N).
inline GreedySelection greedy_select(const Eigen::MatrixXd& z, int k, GreedyOptions options = {}) {
  const int n = static_cast<int>(z.rows());
  if (z.cols() != n) throw std::invalid_argument("greedy_select: Z must be square");
  if (k < 1 || k > n) throw std::invalid_argument("greedy_select: k out of range");

  Eigen::VectorXd gain = z.diagonal();
  const double scale = gain.maxCoeff();
  if (!(scale > 0.0) && !options.allow_rank_deficient)
    throw std::runtime_error("greedy_select: rank deficient");
  const double floor = options.gain_floor_rel * std::max(scale, 0.0);

  std::vector<char> chosen(n, 0);
  // rows of the partial Cholesky factor; factor_rows[j] dotted with itself at
  // the chosen pivots reproduces the eliminated part of Z.
  std::vector<Eigen::VectorXd> factor_rows;
  GreedySelection sel;

  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_gain = floor;
    for (int y = 0; y < n; ++y) {
      if (!chosen[y]) {
        if (gain[y] > best_gain) {
          best_gain = gain[y];
          best = y;
        }
      }
    }
    if (best == -1) {
      if (!options.allow_rank_deficient) throw std::runtime_error("greedy_select: rank deficient");
      for (int y = 0; y < n && static_cast<int>(sel.nodes.size()) < k; ++y) {
        if (!chosen[y]) {
          chosen[y] = 1;
          sel.nodes.push_back(y);
          sel.gains.push_back(0.0);
        }
      }
      return sel;
    }

    chosen[best] = 1;
    sel.nodes.push_back(best);
    sel.gains.push_back(best_gain);

    // New factor row: (Z_{best,:} - sum of projections onto earlier rows),
    // normalized by sqrt of the pick's gain.
    Eigen::VectorXd row = z.row(best).transpose();
    for (const auto& prev : factor_rows) row -= prev[best] * prev;
    row /= std::sqrt(best_gain);
    for (int y = 0; y < n; ++y)
      if (!chosen[y]) gain[y] -= row[y] * row[y];
    factor_rows.push_back(std::move(row));
  }
  return sel;
}

}  // namespace dynsen
