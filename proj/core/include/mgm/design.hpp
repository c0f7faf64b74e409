#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "mgm/model.hpp"

namespace mgm {

enum class ColumnKind {
  indicator,   // product of category indicators only; never rescaled
  count,       // involves poisson counts but no gaussian; centered only
  continuous,  // involves a gaussian variable; centered and scaled
};

/// Where a design column comes from: the source variables, the category of
/// each source (-1 for continuous sources) and the lag (0 for MGM designs).
struct ColumnMeta {
  std::vector<int> vars;
  std::vector<int> cats;
  int lag = 0;
  ColumnKind kind = ColumnKind::continuous;

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

/// One interaction term: every column with this group id was produced by it.
struct GroupMeta {
  std::vector<int> vars;
  int lag = 0;

  friend bool operator==(const GroupMeta&, const GroupMeta&) = default;
};

struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<int> group;
  std::vector<ColumnMeta> columns;
  std::vector<GroupMeta> groups;
  std::vector<bool> constant;

  int n() const { return static_cast<int>(x.rows()); }
  int q() const { return static_cast<int>(x.cols()); }
};

struct NodeDesign {
  DesignMatrix design;
  Eigen::VectorXd response;
  std::vector<int> rows;  // dataset row of each design row
};

struct VarDesign : NodeDesign {
  std::vector<bool> inclusion_mask;  // length n
};

struct DesignOptions {
  bool overparameterize = false;
  // Reject categorical predictors with unobserved categories. Prediction on
  // new data turns this off.
  bool require_all_levels = true;
};

/// Indicator block of a categorical column: m-1 columns (category 0 is the
/// reference) or m columns when overparameterized.
Eigen::MatrixXd encode_categorical(const Eigen::VectorXd& column, int levels,
                                   bool overparameterize, bool require_all_levels = true);

/// Means and sample sds of gaussian columns; identity for the others.
VariableScaling compute_variable_scaling(const Dataset& data);
Eigen::MatrixXd apply_variable_scaling(const Dataset& data, const VariableScaling& scaling);

/// Design for the regression on `target` in a k-order MGM: every other
/// variable plus all products of up to k-1 of them.
NodeDesign build_mgm_design(const Dataset& data, int target, int k, bool overparameterize);
NodeDesign build_mgm_design(const Dataset& data, const VariableScaling& scaling, int target, int k,
                            const DesignOptions& options);

/// Rows usable as VAR responses: all lagged predecessors exist and, when
/// consec is given, are certified consecutive.
std::vector<bool> usable_rows(int n, const std::optional<std::vector<int>>& consec,
                              const std::vector<int>& lags);

/// Lagged design for the VAR regression on `target` over the lag set.
VarDesign build_var_design(const Dataset& data, int target, const std::vector<int>& lags,
                           bool overparameterize);
VarDesign build_var_design(const Dataset& data, const VariableScaling& scaling, int target,
                           const std::vector<int>& lags, const DesignOptions& options);

struct StandardizedDesign {
  DesignMatrix design;
  ScaleRecord record;
};

/// Centers and scales continuous columns, centers count columns, leaves
/// indicators alone and drops zero-variance non-indicator columns.
StandardizedDesign standardize(const DesignMatrix& design);

/// Applies a recorded scaling to a raw design built the same way.
Eigen::MatrixXd apply_scaling(const DesignMatrix& raw, const ScaleRecord& record);

}  // namespace mgm
