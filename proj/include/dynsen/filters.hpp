#pragma once

#include "dynsen/graph.hpp"
#include "dynsen/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dynsen {

enum class FilterKind {
  identity,        ///< G = I; sampling reads raw node values.
  lowpass_cosine,  ///< smooth low-pass: cos(pi/2 * lambda / lambda_max).
  custom,          ///< caller-supplied spectral response.
};

/// Spectral filter description. `chebyshev_order` is the polynomial degree J
/// used when the filter is applied without an eigendecomposition.
struct FilterSpec {
  FilterKind kind = FilterKind::identity;
  int chebyshev_order = 20;
  std::function<double(double)> custom_response;
};

/// Scalar response lambda -> g(lambda) for a FilterSpec on a graph whose
/// largest Laplacian eigenvalue is lambda_max.
inline std::function<double(double)> filter_response(const FilterSpec& spec, double lambda_max) {
  switch (spec.kind) {
    case FilterKind::identity:
      return [](double) { return 1.0; };
    case FilterKind::lowpass_cosine:
      if (!(lambda_max > 0.0)) throw std::invalid_argument("filter_response: lambda_max must be positive");
      return [lambda_max](double lambda) {
        return std::cos(std::numbers::pi / 2.0 * lambda / lambda_max);
      };
    case FilterKind::custom:
      if (!spec.custom_response) throw std::invalid_argument("filter_response: custom response not set");
      return spec.custom_response;
  }
  throw std::logic_error("filter_response: unknown kind");
}

/// Exact filter matrix U diag(g(lambda)) U^T from a precomputed spectrum.
inline Eigen::MatrixXd exact_filter_matrix(const Spectrum& s,
                                           const std::function<double(double)>& response) {
  Eigen::VectorXd diag(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < diag.size(); ++i) diag(i) = response(s.eigenvalues(i));
  return s.eigenvectors * diag.asDiagonal() * s.eigenvectors.transpose();
}

/// Upper bound on the largest Laplacian eigenvalue: power iteration with a
/// deterministic start vector, inflated by 1%. Never underestimates in
/// practice, which keeps Chebyshev arguments inside the approximation window.
inline double estimate_lambda_max(const Graph& graph, int iterations = 100) {
  const int n = graph.n_nodes();
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / n;
  v.normalize();
  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = graph.apply_laplacian(v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // edgeless graph
    v = w / norm;
    rayleigh = v.dot(graph.apply_laplacian(v));
  }
  return rayleigh * 1.01;
}

/// Chebyshev expansion coefficients c_0..c_J of `response` over [0, lambda_max],
/// computed by Gauss-Chebyshev quadrature with J+1 nodes (exact for the first
/// J+1 Chebyshev modes of the response).
inline std::vector<double> chebyshev_coefficients(const std::function<double(double)>& response,
                                                  double lambda_max, int order) {
  if (order < 1) throw std::invalid_argument("chebyshev_coefficients: order must be at least 1");
  const double a = lambda_max / 2.0;  // maps [-1, 1] onto [0, lambda_max]
  const int q_count = order + 1;
  std::vector<double> coeffs(order + 1, 0.0);
  for (int j = 0; j <= order; ++j) {
    double acc = 0.0;
    for (int q = 0; q < q_count; ++q) {
      const double theta = std::numbers::pi * (q + 0.5) / q_count;
      acc += std::cos(j * theta) * response(a * (std::cos(theta) + 1.0));
    }
    coeffs[j] = 2.0 / q_count * acc;
  }
  return coeffs;
}

/// Applies the Chebyshev polynomial filter to a signal using the three-term
/// recurrence on the shifted Laplacian (L - aI)/a, a = lambda_max/2. Cost is
/// J Laplacian products; no eigendecomposition. Because each product only
/// spreads mass one hop, the result of filtering a delta is exactly zero
/// beyond J hops.
inline Eigen::VectorXd chebyshev_filter_apply(const Graph& graph, const std::vector<double>& coeffs,
                                              double lambda_max, const Eigen::VectorXd& x) {
  if (coeffs.empty()) throw std::invalid_argument("chebyshev_filter_apply: empty coefficients");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("chebyshev_filter_apply: lambda_max must be positive");
  const double a = lambda_max / 2.0;
  const auto shifted = [&](const Eigen::VectorXd& v) {
    return Eigen::VectorXd((graph.apply_laplacian(v) - a * v) / a);
  };
  Eigen::VectorXd t_prev = x;            // T_0(L') x
  Eigen::VectorXd y = 0.5 * coeffs[0] * t_prev;
  if (coeffs.size() == 1) return y;
  Eigen::VectorXd t_curr = shifted(x);   // T_1(L') x
  y += coeffs[1] * t_curr;
  for (std::size_t j = 2; j < coeffs.size(); ++j) {
    Eigen::VectorXd t_next = 2.0 * shifted(t_curr) - t_prev;
    y += coeffs[j] * t_next;
    t_prev = std::move(t_curr);
    t_curr = std::move(t_next);
  }
  return y;
}

/// Dense matrix of the Chebyshev-approximated filter, built column by column.
inline Eigen::MatrixXd chebyshev_filter_matrix(const Graph& graph,
                                               const std::function<double(double)>& response,
                                               double lambda_max, int order) {
  const int n = graph.n_nodes();
  const auto coeffs = chebyshev_coefficients(response, lambda_max, order);
  Eigen::MatrixXd g(n, n);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < n; ++c) {
    delta[c] = 1.0;
    g.col(c) = chebyshev_filter_apply(graph, coeffs, lambda_max, delta);
    delta[c] = 0.0;
  }
  return g;
}

}  // namespace dynsen
