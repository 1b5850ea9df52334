#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <stdexcept>

namespace dynsen {

/// Relative singular-value cutoff shared by every pseudo-inverse and rank
/// decision in the library: singular values below cutoff * sigma_max are
/// treated as zero.
inline constexpr double kSvdRelCutoff = 1e-10;

/// Moore-Penrose pseudo-inverse via SVD with the library-wide relative cutoff.
inline Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("pseudo_inverse: empty matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = kSvdRelCutoff * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Largest singular value, or 0 for an all-zero matrix.
inline double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

/// Orthonormal basis of range(m): the left singular vectors whose singular
/// values clear the relative cutoff. Returns an n x r matrix, r = rank.
inline Eigen::MatrixXd orthonormal_range_basis(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("orthonormal_range_basis: empty matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return Eigen::MatrixXd(m.rows(), 0);
  const double cutoff = kSvdRelCutoff * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Thin SVD left factor with exactly `count` columns (zero-padded if the
/// matrix has fewer). Used to seed dictionaries from a signal block.
inline Eigen::MatrixXd left_singular_vectors(const Eigen::MatrixXd& m, int count) {
  if (count < 1) throw std::invalid_argument("left_singular_vectors: count must be positive");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const Eigen::MatrixXd& u = svd.matrixU();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), count);
  const Eigen::Index take = std::min<Eigen::Index>(count, u.cols());
  out.leftCols(take) = u.leftCols(take);
  return out;
}

}  // namespace dynsen
