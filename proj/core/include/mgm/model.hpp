#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgm/ndarray.hpp"
#include "mgm/options.hpp"

namespace mgm {

enum class VarKind { gaussian, poisson, categorical };

std::string_view to_string(VarKind kind);
VarKind parse_var_kind(std::string_view text);

struct VariableSpec {
  VarKind kind = VarKind::gaussian;
  int levels = 1;

  static VariableSpec gaussian() { return {VarKind::gaussian, 1}; }
  static VariableSpec poisson() { return {VarKind::poisson, 1}; }
  static VariableSpec categorical(int m) { return {VarKind::categorical, m}; }

  bool categorical() const { return kind == VarKind::categorical; }
  bool binary() const { return kind == VarKind::categorical && levels == 2; }

  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// Throws DataError unless levels ≥ 2 exactly for categorical variables.
void validate_specs(const std::vector<VariableSpec>& specs);

/// n×p mixed data matrix. Categorical columns hold 0-based integer codes.
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<VariableSpec> specs;
  std::optional<std::vector<double>> timepoints;
  std::optional<std::vector<int>> consec;
  std::vector<std::string> names;  // optional column names

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

/// Throws DataError on the first violated dataset invariant.
void validate_dataset(const Dataset& data);

/// Column names of a dataset, defaulting to x0, x1, ...
std::vector<std::string> column_names(const Dataset& data);

/// One interaction of order members.size(); params has one axis per member,
/// each of extent equal to that member's level count.
struct Factor {
  std::vector<int> members;
  NdArray params;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Parameters of the joint mixed density: per-variable thresholds (one per
/// category), gaussian standard deviations and interaction factors.
struct FactorModel {
  std::vector<VariableSpec> specs;
  std::vector<std::vector<double>> thresholds;
  std::vector<double> sds;
  std::vector<Factor> factors;

  int p() const { return static_cast<int>(specs.size()); }
};

struct ModelDiagnostics {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool valid() const { return violations.empty(); }
};

ModelDiagnostics validate_model(const FactorModel& model);

/// Lagged coefficients of a mixed VAR model. coefs has shape
/// p × p × max_level × max_level × |lags| indexed by (target, predictor,
/// target category, predictor category, lag index).
struct MvarCoefficients {
  std::vector<int> lags;
  NdArray coefs;

  MvarCoefficients() = default;
  MvarCoefficients(int p, int max_level, std::vector<int> lags);

  int p() const { return coefs.rank() == 5 ? coefs.shape()[0] : 0; }
  int max_level() const { return coefs.rank() == 5 ? coefs.shape()[2] : 0; }
  double& at(int target, int predictor, int tcat, int pcat, int lag_index);
  double at(int target, int predictor, int tcat, int pcat, int lag_index) const;
};

struct MvarModel {
  std::vector<VariableSpec> specs;
  MvarCoefficients coefficients;
  std::vector<std::vector<double>> thresholds;
  std::vector<double> sds;

  int p() const { return static_cast<int>(specs.size()); }
};

ModelDiagnostics validate_model(const MvarModel& model);

/// Edge sign; undefined is a distinct state, never 0.
enum class Sign : std::int8_t { negative = -1, positive = 1, undefined = 2 };

class SignMatrix {
 public:
  SignMatrix() = default;
  SignMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, Sign::undefined) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Sign& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  Sign operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend bool operator==(const SignMatrix&, const SignMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Sign> data_;
};

enum class Family { gaussian, poisson, multinomial };

Family family_for(const VariableSpec& spec);

/// Column scaling applied to a raw design before fitting: only the `kept`
/// raw columns enter the regression, as (x - center) / scale.
struct ScaleRecord {
  std::vector<int> kept;
  std::vector<double> center;
  std::vector<double> scale;
  std::vector<std::string> warnings;

  friend bool operator==(const ScaleRecord&, const ScaleRecord&) = default;
};

/// A fitted node regression, sufficient to predict from a raw design.
struct NodeModel {
  int node = 0;
  Family family = Family::gaussian;
  int classes = 1;
  ScaleRecord scaling;
  Eigen::VectorXd intercept;  // one per class
  Eigen::MatrixXd beta;       // kept columns × classes, after thresholding
  double residual_sd = 1.0;
};

struct NodeMeta {
  double lambda = 0.0;
  double alpha = 1.0;
  int s0 = 0;
  double deviance = 0.0;
  double n_eff = 0.0;
  double tau = 0.0;
  bool converged = true;
  double train_error = 0.0;  // RMSE (continuous) or CC (categorical)
};

/// Per-variable standardization applied before estimation (gaussian only).
struct VariableScaling {
  std::vector<double> mean;
  std::vector<double> sd;

  friend bool operator==(const VariableScaling&, const VariableScaling&) = default;
};

struct RawFactor {
  std::vector<int> members;
  NdArray params;
  double weight = 0.0;
};

struct MgmFit {
  std::vector<VariableSpec> specs;
  std::vector<std::string> names;
  MgmOptions options;
  Eigen::MatrixXd wadj;
  SignMatrix signs;
  std::vector<RawFactor> rawfactors;
  std::vector<Eigen::VectorXd> intercepts;
  std::vector<NodeMeta> nodemeta;
  std::vector<NodeModel> nodemodels;
  VariableScaling scaling;
  std::vector<std::string> warnings;

  int p() const { return static_cast<int>(specs.size()); }
};

struct MvarFit {
  std::vector<VariableSpec> specs;
  std::vector<std::string> names;
  std::vector<int> lags;
  MvarOptions options;
  std::vector<Eigen::MatrixXd> wadj;  // one p×p matrix per lag, columns predict rows
  std::vector<SignMatrix> signs;
  std::vector<Eigen::VectorXd> intercepts;
  std::vector<bool> inclusion_mask;
  std::vector<NodeMeta> nodemeta;
  std::vector<NodeModel> nodemodels;
  VariableScaling scaling;
  std::vector<std::string> warnings;

  int p() const { return static_cast<int>(specs.size()); }
};

template <class Fit>
struct TvFit {
  std::vector<double> estpoints;
  double bandwidth = 0.0;
  std::vector<Fit> fits;
  std::vector<double> local_n;
  std::vector<std::string> warnings;
};

using TvMgmFit = TvFit<MgmFit>;
using TvMvarFit = TvFit<MvarFit>;

}  // namespace mgm
