#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mgm/design.hpp"
#include "mgm/model.hpp"
#include "mgm/options.hpp"

namespace mgm {

/// Outcome of one nodewise regression: the predictive model, its selection
/// metadata and the thresholded coefficients laid out over the raw design
/// columns (zero rows for dropped columns).
struct NodeFitResult {
  NodeModel model;
  NodeMeta meta;
  Eigen::MatrixXd raw_beta;  // raw columns × classes
  std::vector<std::string> warnings;
};

struct NodeFitRequest {
  int node = 0;
  VariableSpec spec;
  const DesignMatrix* design = nullptr;  // raw, unstandardized
  Eigen::VectorXd response;
  Eigen::VectorXd weights;  // empty means unit weights
  double n_eff = 0.0;
  double response_scale = 1.0;  // multiplies the training RMSE (gaussian sd)
  bool tolerate_degenerate = false;
};

/// Standardizes the design, selects α and λ, fits, and τ-thresholds.
/// A zero λ_max (and, when tolerated, a degenerate response) yields an
/// intercept-only node. Other errors are rethrown as NodeError.
NodeFitResult fit_node(const NodeFitRequest& request, const SelectionSpec& selection);

/// Intercept-only node with all coefficients zero.
NodeFitResult intercept_only_node(const NodeFitRequest& request);

/// Linear predictor (n × classes) of a node model on a raw design.
Eigen::MatrixXd node_linear_predictor(const NodeModel& model, const DesignMatrix& raw);

/// Linear predictor (classes) of a node model for one row of a raw design.
Eigen::VectorXd node_linear_predictor(const NodeModel& model, const DesignMatrix& raw, int row);

}  // namespace mgm
