#pragma once

#include <cstdint>
#include <vector>

#include "mgm/model.hpp"
#include "mgm/ndarray.hpp"

namespace mgm {

struct GibbsOptions {
  int burn_in = 100;  // sweeps discarded before the first kept row
  int thin = 10;      // sweeps between kept rows
};

/// Gibbs sampler over the node conditionals of a factor model. Gaussian
/// sufficient statistics are x / sd, so a gaussian node given the rest is
/// normal with mean sd * eta and standard deviation sd.
Dataset sample_mgm(const FactorModel& model, int n, std::uint64_t seed, const GibbsOptions& options = {});

struct JointTable {
  NdArray probabilities;  // one axis per variable
  double log_normalizer = 0.0;
};

/// Exact joint distribution of an all-categorical model by enumeration.
JointTable exact_joint_small(const FactorModel& model);

/// Sequential sampler of a mixed VAR model. The first max(L) rows come from
/// the threshold-only marginals.
Dataset sample_mvar(const MvarModel& model, int n, std::uint64_t seed);

struct TvGibbsOptions {
  int burn_in = 100;        // sweeps under the first model
  int sweeps_per_row = 10;  // sweeps between emitted rows
};

/// Row t is drawn under models[t]; the chain carries over between rows.
Dataset sample_tvmgm(const std::vector<FactorModel>& models, int n, std::uint64_t seed,
                     const TvGibbsOptions& options = {});

/// Row t is drawn under models[t] given the lagged rows.
Dataset sample_tvmvar(const std::vector<MvarModel>& models, int n, std::uint64_t seed);

}  // namespace mgm
