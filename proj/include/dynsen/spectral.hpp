#pragma once

#include "dynsen/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace dynsen {

/// Eigendecomposition of the combinatorial Laplacian, eigenvalues ascending.
/// Columns of `eigenvectors` form the graph Fourier basis; the first column is
/// the constant vector for a connected graph.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
};

/// Full Laplacian eigendecomposition. Eigenvector sign is fixed so that the
/// entry of largest magnitude (lowest index on ties) is positive, which makes
/// the basis reproducible across runs and platforms.
inline Spectrum spectrum(const Graph& graph) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.laplacian());
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectrum: eigendecomposition failed");
  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < s.eigenvectors.rows(); ++r) {
      const double mag = std::abs(s.eigenvectors(r, c));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (s.eigenvectors(pivot, c) < 0.0) s.eigenvectors.col(c) = -s.eigenvectors.col(c);
  }
  return s;
}

/// Graph Fourier transform: coefficients U^T x.
inline Eigen::VectorXd gft(const Spectrum& s, const Eigen::VectorXd& x) {
  if (x.size() != s.eigenvectors.rows()) throw std::invalid_argument("gft: dimension mismatch");
  return s.eigenvectors.transpose() * x;
}

/// Inverse graph Fourier transform: x = U coeffs.
inline Eigen::VectorXd igft(const Spectrum& s, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != s.eigenvectors.cols()) throw std::invalid_argument("igft: dimension mismatch");
  return s.eigenvectors * coeffs;
}

}  // namespace dynsen
