#pragma once

#include <vector>

#include "mgm/design.hpp"
#include "mgm/model.hpp"
#include "mgm/node_fit.hpp"
#include "mgm/options.hpp"

namespace mgm {

/// Throws ModelError for invalid options or lag sets.
void validate_options(const MvarOptions& options, const std::vector<int>& lags);

/// Builds the fit from per-node lagged designs and regressions.
MvarFit assemble_mvar_fit(const std::vector<VariableSpec>& specs, const std::vector<std::string>& names,
                          const std::vector<int>& lags, const MvarOptions& options,
                          const VariableScaling& scaling, const std::vector<VarDesign>& designs,
                          std::vector<NodeFitResult> nodes);

/// Mixed VAR estimate over the lag set; one joint regression per node.
MvarFit fit_mvar(const Dataset& data, const std::vector<int>& lags, const MvarOptions& options);

struct DirectedEdge {
  int source = 0;
  int target = 0;
  double weight = 0.0;
  Sign sign = Sign::undefined;
};

/// One source -> target edge list per lag; diagonal entries become self-loops.
std::vector<std::vector<DirectedEdge>> var_edge_tables(const MvarFit& fit);

}  // namespace mgm
