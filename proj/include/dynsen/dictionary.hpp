#pragma once

#include "dynsen/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dynsen {

/// Parameters of the online learner. Defaults follow the synthetic-data
/// setting; real-data runs override gamma and eta.
struct LearnerParams {
  double mu = 1.0;       ///< l1 sparsity weight on the coefficients
  double eta = 3.0;      ///< temporal regularization pulling A_t toward A_{t-1}
  double gamma = 1e-4;   ///< ISTA step size cap; the used step also honors 1/lambda_max
  double epsilon = 1e-8; ///< ISTA stop threshold on the squared update norm
  int max_iters = 1000;

  void validate() const {
    if (mu < 0.0) throw std::invalid_argument("LearnerParams: mu must be nonnegative");
    if (!(eta > 0.0)) throw std::invalid_argument("LearnerParams: eta must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("LearnerParams: gamma must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("LearnerParams: epsilon must be positive");
    if (max_iters < 1) throw std::invalid_argument("LearnerParams: max_iters must be positive");
  }
};

/// Entrywise soft thresholding: shrinks every entry toward zero by theta,
/// zeroing entries of magnitude below theta. Proximal operator of theta*l1.
inline Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& m, double theta) {
  if (theta < 0.0) throw std::invalid_argument("soft_threshold: theta must be nonnegative");
  return m.unaryExpr([theta](double v) {
    if (v >= theta) return v - theta;
    if (v <= -theta) return v + theta;
    return 0.0;
  });
}

/// Closed-form dictionary refresh: the minimizer of
///   ||X - A D||_F^2 + eta ||A - A_prev||_F^2
/// over A, namely (eta A_prev + X D^T)(eta I + D D^T)^{-1}. The system matrix
/// is positive definite for eta > 0, solved by LDLT.
inline Eigen::MatrixXd update_dictionary(const Eigen::MatrixXd& a_prev, const Eigen::MatrixXd& d_prev,
                                         const Eigen::MatrixXd& x_window, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("update_dictionary: eta must be positive");
  const Eigen::Index d = a_prev.cols();
  if (d_prev.rows() != d || x_window.rows() != a_prev.rows() || x_window.cols() != d_prev.cols())
    throw std::invalid_argument("update_dictionary: dimension mismatch");
  Eigen::MatrixXd system = d_prev * d_prev.transpose();
  system.diagonal().array() += eta;
  const Eigen::MatrixXd rhs = eta * a_prev + x_window * d_prev.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("update_dictionary: factorization failed");
  return ldlt.solve(rhs.transpose()).transpose();
}

struct IstaResult {
  Eigen::MatrixXd coefficients;
  int iterations = 0;
  bool converged = false;
  double gamma_used = 0.0;
  /// objective ||X - A D||_F^2 + mu ||D||_1 before the first update and after
  /// every iteration; nonincreasing when the step size respects the bound.
  std::vector<double> objective_trace;
};

/// Sparse-coding objective the ISTA loop descends.
inline double coding_objective(const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                               const Eigen::MatrixXd& x, double mu) {
  return (x - a * d).squaredNorm() + mu * d.cwiseAbs().sum();
}

/// ISTA for min_D ||X - A D||_F^2 + mu ||D||_1, warm-started at d_init:
/// gradient step on the quadratic followed by soft thresholding with gamma*mu.
/// The step actually taken is min(params.gamma, 1/lambda_max(A^T A)),
/// recomputed from the current dictionary, so descent is always guaranteed.
/// Stops when the squared Frobenius norm of the update falls below epsilon.
inline IstaResult ista_sparse_code(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& d_init, const LearnerParams& params) {
  params.validate();
  if (a.rows() != x.rows() || a.cols() != d_init.rows() || d_init.cols() != x.cols())
    throw std::invalid_argument("ista_sparse_code: dimension mismatch");

  IstaResult result;
  const double sigma = spectral_norm(a);
  const double lambda_max = sigma * sigma;
  result.gamma_used = lambda_max > 0.0 ? std::min(params.gamma, 1.0 / lambda_max) : params.gamma;

  Eigen::MatrixXd d = d_init;
  result.objective_trace.push_back(coding_objective(a, d, x, params.mu));
  for (int it = 0; it < params.max_iters; ++it) {
    const Eigen::MatrixXd gradient_step =
        d - 2.0 * result.gamma_used * (a.transpose() * (a * d - x));
    Eigen::MatrixXd next = soft_threshold(gradient_step, result.gamma_used * params.mu);
    const double change = (next - d).squaredNorm();
    d = std::move(next);
    ++result.iterations;
    result.objective_trace.push_back(coding_objective(a, d, x, params.mu));
    if (change < params.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.coefficients = std::move(d);
  return result;
}

/// Online dictionary learner: one closed-form dictionary refresh plus one ISTA
/// coefficient pass per time step, over a sliding window of the last D
/// signals. The first learn_step keeps the initial dictionary untouched.
class OnlineDictionaryLearner {
 public:
  OnlineDictionaryLearner(Eigen::MatrixXd a0, Eigen::MatrixXd d0, Eigen::MatrixXd x0,
                          LearnerParams params)
      : dictionary_(std::move(a0)),
        coefficients_(std::move(d0)),
        window_(std::move(x0)),
        params_(params) {
    params_.validate();
    const Eigen::Index d = dictionary_.cols();
    if (coefficients_.rows() != d || coefficients_.cols() != d)
      throw std::invalid_argument("OnlineDictionaryLearner: coefficients must be D x D");
    if (window_.rows() != dictionary_.rows() || window_.cols() != d)
      throw std::invalid_argument("OnlineDictionaryLearner: window must be N x D");
  }

  const Eigen::MatrixXd& dictionary() const { return dictionary_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  const Eigen::MatrixXd& window() const { return window_; }
  const LearnerParams& params() const { return params_; }
  int step_count() const { return step_; }

  /// Runs one alternation on the current window and returns the ISTA
  /// diagnostics; the refreshed dictionary is available via dictionary().
  IstaResult learn_step() {
    ++step_;
    if (step_ > 1)
      dictionary_ = update_dictionary(dictionary_, coefficients_, window_, params_.eta);
    IstaResult result = ista_sparse_code(dictionary_, window_, coefficients_, params_);
    coefficients_ = result.coefficients;
    return result;
  }

  /// Slides the window: drops the oldest signal, appends x as the newest.
  void push_signal(const Eigen::VectorXd& x) {
    if (x.size() != window_.rows())
      throw std::invalid_argument("OnlineDictionaryLearner: signal length mismatch");
    const Eigen::Index d = window_.cols();
    window_.leftCols(d - 1) = window_.rightCols(d - 1).eval();
    window_.col(d - 1) = x;
  }

 private:
  Eigen::MatrixXd dictionary_;   // N x D
  Eigen::MatrixXd coefficients_; // D x D
  Eigen::MatrixXd window_;       // N x D, newest signal in the last column
  LearnerParams params_;
  int step_ = 0;
};

}  // namespace dynsen
