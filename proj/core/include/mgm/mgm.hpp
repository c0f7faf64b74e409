#pragma once

#include <Eigen/Dense>

#include <vector>

#include "mgm/design.hpp"
#include "mgm/model.hpp"
#include "mgm/node_fit.hpp"
#include "mgm/options.hpp"

namespace mgm {

/// One regression's estimate of a factor, embedded in the full-level array
/// of the factor (axes in member order; reference cells stay zero).
struct FactorEstimate {
  int regression = 0;
  NdArray params;
  double block_mean_abs = 0.0;  // over the block's own entries
  bool nonzero = false;
};

/// Combines the d estimates of a factor. With aligned shapes the parameters
/// are averaged cell by cell and the weight is their mean absolute value;
/// otherwise the weight is the mean of the per-regression block means. AND
/// needs every estimate nonzero, OR at least one. A dropped factor has
/// weight 0 and zero parameters.
RawFactor combine_nodewise(const std::vector<int>& members, const std::vector<FactorEstimate>& estimates,
                           CombineRule rule, bool aligned);

struct EdgeAggregate {
  Eigen::MatrixXd wadj;
  SignMatrix signs;
};

/// Pairwise factors to edge weights and signs. estimates[f] are the
/// regression estimates behind combined[f].
EdgeAggregate aggregate_edges(const std::vector<VariableSpec>& specs, const std::vector<RawFactor>& combined,
                              const std::vector<std::vector<FactorEstimate>>& estimates, bool binary_sign);

struct FactorGraph {
  struct FactorNode {
    std::vector<int> members;
    double weight = 0.0;
  };
  struct Edge {
    int factor = 0;
    int variable = 0;
    double weight = 0.0;
  };
  int variables = 0;
  std::vector<FactorNode> factors;
  std::vector<Edge> edges;
};

/// Bipartite variable/factor graph of the nonzero raw factors.
FactorGraph extract_factor_graph(int p, const std::vector<RawFactor>& rawfactors);

/// Combination step shared by the stationary and time-varying estimators.
MgmFit assemble_mgm_fit(const std::vector<VariableSpec>& specs, const std::vector<std::string>& names,
                        const MgmOptions& options, const VariableScaling& scaling,
                        const std::vector<NodeDesign>& designs, std::vector<NodeFitResult> nodes);

/// Throws ModelError for invalid options.
void validate_options(const MgmOptions& options, int p);

/// Nodewise-regression estimate of a k-order MGM.
MgmFit fit_mgm(const Dataset& data, const MgmOptions& options);

}  // namespace mgm
