#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "mgm/model.hpp"

namespace mgm {

/// One weighted elastic-net penalized regression. For the multinomial
/// family y holds category codes 0..classes-1.
struct GlmProblem {
  Family family = Family::gaussian;
  int classes = 1;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd weights;  // empty means unit weights
  double alpha = 1.0;
};

struct GlmControl {
  double tol = 1e-7;  // on the largest coefficient change between sweeps
  long max_sweeps = 100000;
  // fit_path stops once the deviance ratio exceeds 0.999 or grows by less
  // than a relative 1e-5, after at least 5 fits (the glmnet rules).
  bool early_stop = false;
};

struct GlmSolution {
  double lambda = 0.0;
  Eigen::VectorXd intercept;  // one per class
  Eigen::MatrixXd beta;       // columns × classes
  double loglik = 0.0;
  int s0 = 0;
  bool converged = true;
  double residual_sd = 1.0;  // gaussian only
  long sweeps = 0;
  std::vector<std::string> warnings;
};

/// Throws DataError when the problem is malformed.
void validate_problem(const GlmProblem& problem);

/// Smallest λ at which every penalized coefficient is zero. Throws
/// DegenerateResponseError for a constant response and ZeroLambdaMaxError
/// when no column has a nonzero gradient.
double lambda_max(const GlmProblem& problem);

/// Log-equally spaced descending sequence from `max` to `max * min_ratio`.
std::vector<double> log_spaced(double max, int n, double min_ratio);

/// λ path from lambda_max. The default ratio is 1e-4 when the weighted
/// sample size exceeds the column count and 1e-2 otherwise.
std::vector<double> lambda_path(const GlmProblem& problem, int n_lambda,
                                std::optional<double> min_ratio = {});

/// The unpenalized intercept-only fit (defined for degenerate responses).
GlmSolution intercept_only(const GlmProblem& problem);

GlmSolution fit_glm(const GlmProblem& problem, double lambda, const GlmSolution* warm = nullptr,
                    const GlmControl& control = {});

/// Warm-started fits along a strictly descending λ sequence. With
/// control.early_stop the result may cover only a prefix of the sequence.
std::vector<GlmSolution> fit_path(const GlmProblem& problem, const std::vector<double>& lambdas,
                                  const GlmControl& control = {});

/// n × classes linear predictor.
Eigen::MatrixXd linear_predictor(const GlmSolution& solution, const Eigen::MatrixXd& x);

/// Row-wise softmax of a linear predictor.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& eta);

/// Weighted log-likelihood Σ w_t log f(y_t) at the solution.
double log_likelihood(const GlmSolution& solution, const GlmProblem& problem);

/// Gradient of the normalized weighted negative log-likelihood with respect
/// to every coefficient (columns × classes).
Eigen::MatrixXd nll_gradient(const GlmSolution& solution, const GlmProblem& problem);

/// Penalized objective minimized by fit_glm.
double objective(const GlmSolution& solution, const GlmProblem& problem);

/// Largest violation of the elastic-net optimality conditions.
double kkt_residual(const GlmSolution& solution, const GlmProblem& problem);

}  // namespace mgm
