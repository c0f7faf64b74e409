#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mgm/model.hpp"

namespace mgm {

/// RMSE of aligned vectors; weights (optional) make it a weighted mean.
double metric_rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& weights = {});
/// 1 - RSS/TSS without clamping; NaN for zero-variance truth.
double metric_r2_raw(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& weights = {});
/// R² clamped at 0 from below; NaN for zero-variance truth.
double metric_r2(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& weights = {});
/// Proportion of correct classification.
double metric_cc(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& weights = {});
/// (CC - max marginal) / (1 - max marginal) without clamping, marginals from
/// truth; NaN when truth has a single category.
double metric_ncc_raw(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred,
                      const Eigen::VectorXd& weights = {});
/// nCC clamped at 0 from below.
double metric_ncc(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& weights = {});

using MetricFn =
    std::function<double(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred, const Eigen::VectorXd& weights)>;

struct NamedMetric {
  std::string name;
  bool categorical = false;  // applied to categorical nodes, else to continuous ones
  MetricFn fn;
};

/// RMSE and R2 for continuous nodes, CC and nCC for categorical nodes.
std::vector<NamedMetric> default_metrics();

/// Looks up a built-in metric by name (RMSE, R2, CC, nCC).
NamedMetric builtin_metric(const std::string& name);

struct PredictionResult {
  Eigen::MatrixXd predicted;                  // n × p, NaN on rows that were not predicted
  std::vector<Eigen::MatrixXd> probabilities;  // per node, n × m for categorical nodes
  std::vector<bool> predicted_rows;
  std::vector<std::string> metric_names;
  Eigen::MatrixXd errors;  // p × metrics, NaN where a metric does not apply
  std::optional<std::vector<Eigen::MatrixXd>> tv_errors;  // per estimation point
};

PredictionResult predict(const MgmFit& fit, const Dataset& data,
                         const std::vector<NamedMetric>& metrics = default_metrics());
PredictionResult predict(const MvarFit& fit, const Dataset& data,
                         const std::vector<NamedMetric>& metrics = default_metrics());

enum class TvMethod { weighted, closest };

PredictionResult predict(const TvMgmFit& fit, const Dataset& data, TvMethod method,
                         const std::vector<NamedMetric>& metrics = default_metrics());
PredictionResult predict(const TvMvarFit& fit, const Dataset& data, TvMethod method,
                         const std::vector<NamedMetric>& metrics = default_metrics());

}  // namespace mgm
