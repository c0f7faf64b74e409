#pragma once

#include <Eigen/Dense>

#include <vector>

#include "mgm/model.hpp"
#include "mgm/options.hpp"

namespace mgm {

struct KernelWeights {
  Eigen::VectorXd weights;
  double t_e = 0.0;
  double sigma = 0.0;
  double local_n = 0.0;
};

/// Row positions on [0, 1]: the timepoints rescaled to their range, or
/// i / (n - 1) when the dataset has none.
std::vector<double> time_positions(const Dataset& data);

/// Gaussian kernel weights around t_e, scaled so that a point at t_e would
/// get weight 1. local_n is their sum.
KernelWeights kernel_weights(const std::vector<double>& positions, double t_e, double sigma);

/// `count` equally spaced points on [0, 1].
std::vector<double> equally_spaced_estpoints(int count);

/// Estimation points on [0, 1] pass through; if any value exceeds 1 all are
/// read on the raw time scale (timepoints, or 0-based row index) and rescaled.
std::vector<double> normalize_estpoints(const std::vector<double>& points, const Dataset& data);

TvMgmFit fit_tvmgm(const Dataset& data, const MgmOptions& options, const std::vector<double>& estpoints,
                   double bandwidth);

TvMvarFit fit_tvmvar(const Dataset& data, const std::vector<int>& lags, const MvarOptions& options,
                     const std::vector<double>& estpoints, double bandwidth);

enum class ModelType { mgm, mvar };

struct BwSelectOptions {
  ModelType type = ModelType::mgm;
  std::vector<double> bw_seq;
  int folds = 10;
  int foldsize = 10;
  MgmOptions mgm;
  MvarOptions mvar;
  std::vector<int> lags{1};
};

struct BwSelectResult {
  std::vector<double> bandwidths;
  std::vector<double> errors;  // mean over folds, test points and variables
  double selected = 0.0;
  std::vector<std::vector<int>> test_rows;  // dataset rows per fold
};

/// Test positions (0-based, into a list of `usable` rows) for every fold:
/// `foldsize` equally spaced picks from {j, ..., usable - foldsize + j - 1}
/// for fold j = 1..folds (1-based in that formula).
std::vector<std::vector<int>> bw_test_sets(int usable, int folds, int foldsize);

/// Time-stratified cross-validation over a bandwidth sequence. Test rows get
/// zero weight; each is predicted from a model estimated at its own time.
BwSelectResult bw_select(const Dataset& data, const BwSelectOptions& options);

}  // namespace mgm
