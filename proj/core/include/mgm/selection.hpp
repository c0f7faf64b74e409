#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mgm/glm.hpp"
#include "mgm/options.hpp"

namespace mgm {

/// -2 loglik + s0 log(n_eff) + 2 gamma s0 log(p_model).
double ebic(double loglik, int s0, double n_eff, int p_model, double gamma);

/// Balanced random fold labels 0..folds-1 for the rows with positive weight
/// (-1 for the others). Throws when a fold would hold fewer than 2 rows.
std::vector<int> assign_folds(const Eigen::VectorXd& weights, int n, int folds, std::uint64_t seed);

/// Weighted mean held-out loss: squared error / 2 (gaussian), deviance / 2
/// (poisson) or -log p (multinomial).
double heldout_loss(const GlmSolution& solution, const GlmProblem& problem,
                    const std::vector<int>& rows);

struct LambdaChoice {
  int index = 0;
  std::vector<double> lambdas;
  std::vector<double> criterion;
  std::vector<GlmSolution> path;  // fits on all rows
};

/// Fits the path on all rows and picks λ by EBIC or CV. Ties go to the
/// larger λ. n_eff is the sample size entering EBIC.
LambdaChoice select_lambda(const GlmProblem& problem, const std::vector<double>& lambdas,
                           const SelectionSpec& spec, double n_eff);

struct ThresholdResult {
  Eigen::MatrixXd beta;
  double tau = 0.0;  // largest threshold applied
};

/// Zeroes coefficients below τ = ŝ0 sqrt(log(p_model) / n_eff). Each column
/// (class) is thresholded with its own nonzero count.
ThresholdResult tau_threshold(const Eigen::MatrixXd& beta, double n_eff, int p_model, ThresholdMode mode);

struct AlphaChoice {
  double alpha = 1.0;
  double criterion = 0.0;
  LambdaChoice lambda;
};

/// Runs λ selection for each α and keeps the α with the smallest criterion;
/// ties go to the larger α. Throws ZeroLambdaMaxError when every α has a
/// zero λ_max.
AlphaChoice select_alpha(const GlmProblem& problem, const SelectionSpec& spec, double n_eff);

}  // namespace mgm
